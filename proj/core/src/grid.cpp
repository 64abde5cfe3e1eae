#include "vdwlab/grid.hpp"

#include "vdwlab/error.hpp"

#include <cmath>
#include <sstream>

namespace vdw {

double GridSpec::spacing() const {
  if (geometry == Geometry::radial) return half_width / static_cast<double>(points_per_axis);
  return 2.0 * half_width / static_cast<double>(points_per_axis - 1);
}

double GridSpec::coordinate(std::size_t k) const {
  const double h = spacing();
  if (geometry == Geometry::radial) return static_cast<double>(k + 1) * h;
  return -half_width + static_cast<double>(k) * h;
}

void GridSpec::validate() const {
  if (dim_per_particle != 1 && dim_per_particle != 3)
    throw ConfigError("grid: dim_per_particle must be 1 or 3");
  if (points_per_axis < 8) throw ConfigError("grid: points_per_axis must be >= 8");
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw ConfigError("grid: half_width must be positive");
  if (geometry == Geometry::radial && dim_per_particle != 1)
    throw ConfigError("grid: radial geometry carries one radial coordinate per particle");
}

TensorGrid::TensorGrid(GridSpec spec, std::size_t particles, std::vector<Vec3> origins)
    : spec_(spec), origins_(std::move(origins)) {
  spec_.validate();
  if (origins_.empty()) origins_.assign(particles, Vec3{0.0, 0.0, 0.0});
  if (origins_.size() != particles) throw ConfigError("grid: one origin per particle required");

  local_size_ = 1;
  for (int d = 0; d < spec_.dim_per_particle; ++d) local_size_ *= spec_.points_per_axis;

  const double per_axis = static_cast<double>(spec_.points_per_axis);
  const double required = std::pow(per_axis, static_cast<double>(axes()));
  if (required > static_cast<double>(spec_.point_budget))
    throw BudgetError("tensor grid exceeds the point budget", required,
                      static_cast<double>(spec_.point_budget));

  size_ = 1;
  for (std::size_t p = 0; p < particles; ++p) size_ *= local_size_;
  cell_volume_ = std::pow(spec_.spacing(), static_cast<double>(axes()));
}

std::size_t TensorGrid::stride(std::size_t axis) const {
  std::size_t s = 1;
  for (std::size_t a = axis + 1; a < axes(); ++a) s *= spec_.points_per_axis;
  return s;
}

Vec3 TensorGrid::displacement(std::size_t local_index) const {
  Vec3 r{0.0, 0.0, 0.0};
  const std::size_t n = spec_.points_per_axis;
  for (int d = spec_.dim_per_particle - 1; d >= 0; --d) {
    r[static_cast<std::size_t>(d)] = spec_.coordinate(local_index % n);
    local_index /= n;
  }
  return r;
}

Vec3 TensorGrid::position(std::size_t particle, std::size_t local_index) const {
  Vec3 r = displacement(local_index);
  const Vec3& o = origins_.at(particle);
  for (std::size_t c = 0; c < 3; ++c) r[c] += o[c];
  return r;
}

bool TensorGrid::shared_frame() const {
  for (const auto& o : origins_)
    if (o != origins_.front()) return false;
  return true;
}

TensorGrid TensorGrid::select(std::span<const std::size_t> particles) const {
  std::vector<Vec3> o;
  o.reserve(particles.size());
  for (std::size_t p : particles) o.push_back(origins_.at(p));
  return TensorGrid(spec_, particles.size(), std::move(o));
}

TensorGrid TensorGrid::concat(const TensorGrid& a, const TensorGrid& b) {
  if (a.particles() > 0 && b.particles() > 0) {
    const GridSpec& x = a.spec();
    const GridSpec& y = b.spec();
    if (x.dim_per_particle != y.dim_per_particle || x.points_per_axis != y.points_per_axis ||
        x.half_width != y.half_width || x.geometry != y.geometry)
      throw ConfigError("grid: cannot concatenate grids with different specs");
  }
  GridSpec spec = a.particles() > 0 ? a.spec() : b.spec();
  spec.point_budget = std::max(a.spec().point_budget, b.spec().point_budget);
  std::vector<Vec3> o = a.origins();
  o.insert(o.end(), b.origins().begin(), b.origins().end());
  const std::size_t n = o.size();
  return TensorGrid(spec, n, std::move(o));
}

bool TensorGrid::same_layout(const TensorGrid& other) const {
  return size_ == other.size_ && particles() == other.particles() &&
         std::abs(cell_volume_ - other.cell_volume_) <= 1e-14 * cell_volume_;
}

std::string TensorGrid::describe() const {
  std::ostringstream os;
  os << particles() << " particle(s) x " << spec_.points_per_axis << "^" << spec_.dim_per_particle
     << (spec_.geometry == Geometry::radial ? " radial" : " cartesian") << " points, L="
     << spec_.half_width << ", h=" << spec_.spacing();
  return os.str();
}

void split_index(const TensorGrid& grid, std::size_t flat, std::span<std::size_t> local) {
  const std::size_t m = grid.local_size();
  for (std::size_t p = grid.particles(); p-- > 0;) {
    local[p] = flat % m;
    flat /= m;
  }
}

std::size_t join_index(const TensorGrid& grid, std::span<const std::size_t> local) {
  std::size_t flat = 0;
  const std::size_t m = grid.local_size();
  for (std::size_t p = 0; p < grid.particles(); ++p) flat = flat * m + local[p];
  return flat;
}

} // namespace vdw
