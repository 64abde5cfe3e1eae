#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace vdw {

using Vec3 = std::array<double, 3>;

enum class Geometry {
  cartesian, ///< box [-L, L] per axis, endpoints are grid points
  radial     ///< s-wave reduction: r_k = (k+1) h on (0, L], u(0) = 0
};

/// Uniform grid for one particle coordinate.
struct GridSpec {
  int dim_per_particle = 1;
  std::size_t points_per_axis = 64;
  double half_width = 8.0;
  Geometry geometry = Geometry::cartesian;
  /// Largest tensor-grid size any operator on this grid may have.
  std::size_t point_budget = std::size_t{1} << 23;

  double spacing() const;
  /// Coordinate of grid index k along one axis (relative to the particle frame).
  double coordinate(std::size_t k) const;
  /// Throws ConfigError on violated invariants.
  void validate() const;
};

/// Tensor-product grid for a fixed number of particles. Every particle uses
/// the same GridSpec; each particle has its own frame origin so that model
/// atoms can be discretized around their own nucleus.
class TensorGrid {
public:
  TensorGrid() = default;
  /// Origins default to the coordinate origin for every particle.
  TensorGrid(GridSpec spec, std::size_t particles, std::vector<Vec3> origins = {});

  const GridSpec& spec() const noexcept { return spec_; }
  std::size_t particles() const noexcept { return origins_.size(); }
  int dim() const noexcept { return spec_.dim_per_particle; }
  std::size_t axes() const noexcept { return particles() * static_cast<std::size_t>(dim()); }
  std::size_t points_per_axis() const noexcept { return spec_.points_per_axis; }
  /// Number of grid points of one particle (points_per_axis^dim).
  std::size_t local_size() const noexcept { return local_size_; }
  /// Total number of coefficients. A zero-particle grid has one point.
  std::size_t size() const noexcept { return size_; }
  /// Volume element of the discrete L2 inner product.
  double cell_volume() const noexcept { return cell_volume_; }
  std::size_t stride(std::size_t axis) const;
  const std::vector<Vec3>& origins() const noexcept { return origins_; }
  const Vec3& origin(std::size_t particle) const { return origins_.at(particle); }

  /// Position of a particle for its local (flattened per-particle) index.
  Vec3 position(std::size_t particle, std::size_t local_index) const;
  /// Position relative to the particle frame origin.
  Vec3 displacement(std::size_t local_index) const;

  /// True when every particle uses the same frame (required for permutations).
  bool shared_frame() const;

  /// Grid for a subset of particles, in the given order.
  TensorGrid select(std::span<const std::size_t> particles) const;
  /// Particles of `a` followed by the particles of `b`.
  static TensorGrid concat(const TensorGrid& a, const TensorGrid& b);

  bool same_layout(const TensorGrid& other) const;
  std::string describe() const;

private:
  GridSpec spec_{};
  std::vector<Vec3> origins_;
  std::size_t local_size_ = 1;
  std::size_t size_ = 1;
  double cell_volume_ = 1.0;
};

/// Decomposes a flat index into per-particle local indices.
void split_index(const TensorGrid& grid, std::size_t flat, std::span<std::size_t> local);
/// Inverse of split_index.
std::size_t join_index(const TensorGrid& grid, std::span<const std::size_t> local);

} // namespace vdw
