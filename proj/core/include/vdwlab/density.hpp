#pragma once

#include "vdwlab/wavefunction.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace vdw {

/// rho(x) = ∫|psi(.., x, ..)|^2 over all other electrons, on the local grid of
/// one electron. Sums of the density times the one-particle volume element
/// give the norm of psi. On radial grids the array holds |u|^2 per unit
/// radius (the radial probability), see radial_density for rho itself.
std::vector<double> one_electron_density(const WaveFunction& psi, std::size_t electron);

/// Radial probability |u(r)|^2 converted to the 3D density u^2 / (4 pi r^2).
std::vector<double> radial_density(const TensorGrid& grid, const std::vector<double>& probability);

struct DecayFit {
  /// Decay rate of the density, rho ~ exp(-rate r).
  double fitted_rate = 0.0;
  /// Amplitude convention, psi ~ exp(-rate r / 2).
  double amplitude_rate = 0.0;
  /// sqrt(E_{i,1} - E_i), comparable to amplitude_rate. NaN when not supplied.
  double theoretical_bound = 0.0;
  std::pair<double, double> fit_window{0.0, 0.0};
  double rms_log_error = 0.0;
  /// Log-density slope steepens along the window (Gaussian-like tail).
  bool superexponential = false;
  /// Amplitude decay faster than the bound.
  bool exceeds_bound = false;
  std::vector<std::string> warnings;
};

struct DecayFitOptions {
  /// Window starts where rho drops below this fraction of its maximum.
  double inner_fraction = 1e-2;
  /// Window ends where rho drops below this fraction (underflow guard).
  double outer_fraction = 1e-14;
  /// Window never extends beyond this fraction of the box half width.
  double wall_fraction = 0.75;
  std::optional<double> theoretical_bound;
};

/// Least-squares fit of log rho(r) against r = |x - center| (1D) or r (radial).
/// When the default window underflows it is shrunk and a warning recorded.
DecayFit fit_decay_rate(const WaveFunction& psi, double center, const DecayFitOptions& options = {});

/// Same fit on an already tabulated profile (r ascending).
DecayFit fit_decay_profile(const std::vector<double>& r, const std::vector<double>& rho,
                           double max_radius, const DecayFitOptions& options = {});

} // namespace vdw
