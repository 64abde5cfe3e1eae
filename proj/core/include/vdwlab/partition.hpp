#pragma once

#include "vdwlab/grid.hpp"
#include "vdwlab/system.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace vdw {

/// IMS partition of unity on configuration space R^{dN}: J_a for every
/// decomposition a of the N electrons over the M nuclei (electrons of A_j
/// within R^{3/4}/6 of y_j) and J_{i} for every electron (electron i at least
/// R^{3/4}/12 from all nuclei). F_b is the indicator of Omega_b^beta smoothed by
/// a product mollifier of radius R^{3/4}/48 and J_b = F_b / sqrt(sum F^2).
class ImsPartition {
public:
  ImsPartition(const SystemConfig& cfg, std::optional<double> R = std::nullopt);

  std::size_t members() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  double scale() const { return scale_; } ///< R^{3/4}
  double R() const { return R_; }
  int dim() const { return dim_; }
  std::size_t electrons() const { return electrons_; }
  /// Number of decompositions; members beyond this index are the one-electron sets.
  std::size_t decomposition_members() const { return decompositions_.size(); }

  /// F_b at a configuration x (dN coordinates, electron-major).
  std::vector<double> smoothed_indicators(std::span<const double> x) const;
  std::vector<double> evaluate(std::span<const double> x) const;
  /// Whether x lies in the claimed support Omega_b^{1/6} (decompositions) or
  /// Omega_{i}^{1/12} (one-electron sets).
  bool in_support(std::size_t member, std::span<const double> x) const;
  /// D_1 = 2 ||grad g_1||_{L^1} for the unit mollifier.
  double D1() const;

private:
  double distance_to(std::span<const double> x, std::size_t electron, std::size_t nucleus) const;
  /// (g_1 * indicator of the ball of radius beta)(r), r in units of the scale.
  double smoothed_ball(double r, double beta) const;

  /// smoothed_ball on its transition [beta - 1/48, beta + 1/48], tabulated at
  /// Chebyshev points and evaluated in barycentric form.
  struct Profile {
    double beta = 0.0;
    std::vector<double> x, f, w;
    double operator()(double r) const;
  };
  Profile tabulate(double beta) const;
  Profile inner_;
  Profile outer_;

  std::vector<Vec3> nuclei_;
  std::vector<Decomposition> decompositions_;
  std::vector<std::string> labels_;
  std::size_t electrons_ = 0;
  int dim_ = 1;
  double R_ = 1.0;
  double scale_ = 1.0;
  double normalization_ = 1.0;
};

struct PartitionOfUnity {
  std::vector<std::string> labels;
  /// J_b sampled on the configuration grid (one vector per member).
  std::vector<std::vector<double>> fields;
  std::size_t axes = 0;
  std::size_t points_per_axis = 0;
  double spacing = 0.0;
  double R = 0.0;
  double scale = 0.0;
  /// max over grid points of |sum J^2 - 1|
  double sum_defect = 0.0;
  /// The same at random off-grid configurations.
  double random_sum_defect = 0.0;
  std::size_t random_samples = 0;
  bool bounded = true; ///< 0 <= J <= 1 everywhere sampled
  std::size_t support_violations = 0;
  /// sup over interior grid points of sum_b |grad J_b|^2 by central differences.
  double gradient_sup = 0.0;
  /// D_1^2 N^2 / R^{3/2}
  double gradient_bound = 0.0;
};

struct PartitionOptions {
  std::optional<double> R;
  std::size_t random_samples = 10'000;
  std::uint64_t seed = 7;
};

/// Samples the partition on a dedicated grid of configuration space; `grid`
/// gives points per axis and the half width of the box. Refuses grids whose
/// spacing does not resolve the mollifier (at least 4 points across R^{3/4}/24).
PartitionOfUnity build_ims_partition(const SystemConfig& cfg, const GridSpec& grid,
                                     const PartitionOptions& options = {});

/// Smallest points_per_axis that resolves the mollifier on a box of the given half width.
std::size_t ims_minimum_points(double R, double half_width);

struct GradientScaling {
  std::vector<double> radii;
  std::vector<double> gradient_sup;
  double slope = 0.0;
  double max_bound_ratio = 0.0; ///< max of sup / (D_1^2 N^2 R^{-3/2})
};

/// Rescales the nuclei of `cfg` so that their separation is R for each R,
/// samples the partition with `points_per_scale` points per R^{3/4}, and fits
/// log sup sum |grad J|^2 against log R.
GradientScaling ims_gradient_scaling(const SystemConfig& cfg, const std::vector<double>& radii,
                                     std::size_t points_per_scale = 200);

} // namespace vdw
