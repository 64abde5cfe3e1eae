#pragma once

#include "vdwlab/feshbach.hpp"
#include "vdwlab/spectral.hpp"
#include "vdwlab/system.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace vdw {

enum class SweepMethod { dense, feshbach, variational };
std::string to_string(SweepMethod m);
SweepMethod parse_sweep_method(const std::string& s);

enum class Abscissa { separation, coupling };
std::string to_string(Abscissa a);

/// One method at one abscissa. `value` is absent when the point failed.
struct SweepValue {
  std::optional<double> value;
  double residual = 0.0;
  std::string failure;
  /// Solver actually used for dense points (dense oracle or Lanczos).
  std::string solver;
};

struct SweepResult {
  Abscissa kind = Abscissa::separation;
  std::vector<double> abscissae;
  std::map<SweepMethod, std::vector<SweepValue>> energies;
  GridSpec grid;
  double tolerance = 0.0;

  bool has(SweepMethod m) const { return energies.count(m) != 0; }
  /// Abscissae and W of the points where `m` succeeded.
  std::pair<std::vector<double>, std::vector<double>> series(SweepMethod m) const;
};

using ConfigFactory = std::function<SystemConfig(double)>;

struct SweepSettings {
  GridSpec grid;
  SolverSettings solver;
  std::vector<SweepMethod> methods{SweepMethod::dense};
  Abscissa kind = Abscissa::separation;
  /// Adds the dense method whenever the full system fits the dense oracle.
  bool include_dense_when_feasible = true;
  std::optional<double> cutoff_radius;
  FixedPointOptions fixed_point;
  std::size_t jobs = 1;
};

/// W = E - E(inf) for every requested method at every abscissa. Failures are
/// recorded per point and the sweep carries on.
SweepResult run_sweep(const ConfigFactory& make, std::vector<double> abscissae, const SweepSettings& settings);

/// Two identical well1d atoms with coupling lambda (the abscissa is lambda).
SystemConfig drude_pair(double lambda);

/// Maps a coupling sweep to R = lambda^(-1/3), keeping abscissae increasing.
SweepResult recast_coupling_as_separation(const SweepResult& sweep);

struct FitOptions {
  /// Drops this many points of largest |W| before fitting.
  std::size_t exclude_largest = 2;
  std::optional<double> window_min;
  std::optional<double> window_max;
};

/// W ~ -c / R^p from log-log least squares; then W + c'/R^p' ~ d/R^q from a joint
/// fit of both terms. remainder_exponent is NaN when no remainder is resolved.
struct PowerLawFit {
  double exponent = 0.0;
  double coefficient = 0.0;
  double remainder_exponent = 0.0;
  double remainder_coefficient = 0.0;
  /// rms of log|W| about the leading law.
  double fit_residual = 0.0;
  /// rms relative error of the two-term model.
  double remainder_residual = 0.0;
  std::vector<double> abscissae;
};

PowerLawFit fit_power_law(const SweepResult& sweep, SweepMethod method, const FitOptions& options = {});
/// Same on raw (R, W) data.
PowerLawFit fit_power_law(std::vector<double> R, std::vector<double> W, const FitOptions& options = {});

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
};
/// Least squares of log y against log x; every y must be positive.
LogLogFit fit_log_log(const std::vector<double>& x, const std::vector<double>& y);

/// Decay of upper - lower (both from the sweep) against the abscissa:
/// returns the exponent q in upper - lower ~ e / R^q.
LogLogFit excess_decay(const SweepResult& sweep, SweepMethod upper, SweepMethod lower);

} // namespace vdw
