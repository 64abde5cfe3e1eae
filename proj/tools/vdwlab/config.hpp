#pragma once

#include "vdwlab/asymptotics.hpp"
#include "vdwlab/error.hpp"
#include "vdwlab/feshbach.hpp"
#include "vdwlab/spectral.hpp"
#include "vdwlab/system.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace vdw::cli {

/// Malformed config text; line and column are 1-based.
class ParseError : public ConfigError {
public:
  ParseError(const std::string& source, std::size_t line, std::size_t column, const std::string& what);
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

private:
  std::size_t line_;
  std::size_t column_;
};

enum class ScenarioKind { ground_state, sigma, feshbach, variational, sweep, stability, partition, combinatorics };
std::string to_string(ScenarioKind k);

struct SystemInput {
  std::vector<AtomSpec> atoms;
  std::optional<int> electrons;
  InteractionKind interaction = InteractionKind::dipole;
  std::optional<double> coupling;

  SystemConfig build() const;
};

struct GroundStateParams {
  SystemInput system;
  GridSpec grid;
  SolverSettings solver;
  std::size_t states = 1;
};

struct SigmaParams {
  AtomSpec atom_i;
  AtomSpec atom_j;
  Vec3 direction{0.0, 0.0, 1.0};
  /// More directions turn the run into an invariance check.
  std::vector<Vec3> directions;
  GridSpec grid;
  SolverSettings solver;
  std::optional<double> cutoff_R;
};

struct FeshbachParams {
  SystemInput system;
  GridSpec grid;
  SolverSettings solver;
  FixedPointOptions fixed_point;
  std::optional<double> cutoff_radius;
};

struct VariationalParams {
  SystemInput system;
  GridSpec grid;
  SolverSettings solver;
  std::optional<double> cutoff_radius;
};

struct SweepParams {
  SystemInput system;
  Abscissa abscissa = Abscissa::coupling;
  std::vector<double> values;
  std::vector<SweepMethod> methods{SweepMethod::dense};
  bool include_dense = true;
  GridSpec grid;
  SolverSettings solver;
  std::optional<double> cutoff_radius;
  /// Fit after recasting coupling values via R = lambda^(-1/3).
  bool recast = false;
  bool fit = true;
  SweepMethod fit_method = SweepMethod::dense;
  FitOptions fit_options;
  std::size_t jobs = 1;
};

struct StabilityParams {
  std::vector<AtomSpec> atoms;
  int n_max = 0;
  GridSpec grid;
  SolverSettings solver;
  bool property_E = true;
  bool property_Eprime = false;
};

struct PartitionParams {
  SystemInput system;
  GridSpec grid;
  std::optional<double> R;
  std::size_t random_samples = 10'000;
  std::vector<double> gradient_radii;
  std::size_t points_per_scale = 200;
  std::uint64_t seed = 7;
};

struct CombinatoricsParams {
  int Z = 1;
  int max_length = 3;
  std::size_t witness_trials = 0;
  std::size_t witness_max_size = 8;
  std::uint64_t seed = 7;
};

using ScenarioParams = std::variant<GroundStateParams, SigmaParams, FeshbachParams, VariationalParams, SweepParams,
                                    StabilityParams, PartitionParams, CombinatoricsParams>;

struct Scenario {
  std::string name;
  ScenarioKind kind = ScenarioKind::ground_state;
  /// Relative to the output directory.
  std::string output_path;
  ScenarioParams params;
};

struct RunConfig {
  std::vector<Scenario> scenarios;
  std::optional<std::uint64_t> seed;
};

/// Parses and validates JSON config text. Unknown keys, wrong types and
/// missing required parameters are errors naming the key path.
RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::filesystem::path& path);

/// Replaces every seed in the scenarios (solver start vectors, sampling).
void apply_seed(RunConfig& cfg, std::uint64_t seed);

} // namespace vdw::cli
