#include "vdwlab/wavefunction.hpp"

#include "vdwlab/error.hpp"

#include <cmath>
#include <numeric>

namespace vdw {

namespace {

void require_same_layout(const WaveFunction& a, const WaveFunction& b, const char* what) {
  if (!a.grid().same_layout(b.grid()))
    throw PreconditionError(std::string(what) + ": wavefunctions live on different grids");
}

} // namespace

WaveFunction::WaveFunction(TensorGrid grid)
    : grid_(std::move(grid)), coefficients_(grid_.size(), 0.0) {}

WaveFunction::WaveFunction(TensorGrid grid, std::vector<double> coefficients)
    : grid_(std::move(grid)), coefficients_(std::move(coefficients)) {
  if (coefficients_.size() != grid_.size())
    throw PreconditionError("wavefunction: coefficient count does not match the grid");
}

WaveFunction WaveFunction::sample(const TensorGrid& grid,
                                  const std::function<double(std::span<const Vec3>)>& f) {
  WaveFunction out(grid);
  const std::size_t np = grid.particles();
  std::vector<std::size_t> local(np, 0);
  std::vector<Vec3> x(np);
  for (std::size_t p = 0; p < np; ++p) x[p] = grid.position(p, 0);
  auto c = out.mutable_coefficients();
  for (std::size_t i = 0; i < c.size(); ++i) {
    c[i] = f(x);
    // odometer increment over per-particle local indices
    for (std::size_t p = np; p-- > 0;) {
      if (++local[p] < grid.local_size()) {
        x[p] = grid.position(p, local[p]);
        break;
      }
      local[p] = 0;
      x[p] = grid.position(p, 0);
    }
  }
  return out;
}

double WaveFunction::norm() const {
  if (!norm_) {
    const double s = std::inner_product(coefficients_.begin(), coefficients_.end(),
                                        coefficients_.begin(), 0.0);
    norm_ = std::sqrt(s * grid_.cell_volume());
  }
  return *norm_;
}

WaveFunction& WaveFunction::normalize() {
  const double n = norm();
  if (!(n > 0.0)) throw PreconditionError("cannot normalize the zero vector");
  return *this *= 1.0 / n;
}

WaveFunction& WaveFunction::operator+=(const WaveFunction& other) { return axpy(1.0, other); }
WaveFunction& WaveFunction::operator-=(const WaveFunction& other) { return axpy(-1.0, other); }

WaveFunction& WaveFunction::operator*=(double a) {
  for (double& c : coefficients_) c *= a;
  norm_.reset();
  return *this;
}

WaveFunction& WaveFunction::axpy(double a, const WaveFunction& x) {
  require_same_layout(*this, x, "axpy");
  for (std::size_t i = 0; i < coefficients_.size(); ++i) coefficients_[i] += a * x.coefficients_[i];
  norm_.reset();
  return *this;
}

WaveFunction operator+(WaveFunction a, const WaveFunction& b) { return a += b; }
WaveFunction operator-(WaveFunction a, const WaveFunction& b) { return a -= b; }
WaveFunction operator*(double s, WaveFunction a) { return a *= s; }

double inner(const WaveFunction& a, const WaveFunction& b) {
  require_same_layout(a, b, "inner");
  const auto x = a.coefficients();
  const auto y = b.coefficients();
  return std::inner_product(x.begin(), x.end(), y.begin(), 0.0) * a.grid().cell_volume();
}

WaveFunction tensor_product(const WaveFunction& a, const WaveFunction& b) {
  TensorGrid g = TensorGrid::concat(a.grid(), b.grid());
  std::vector<double> c(a.size() * b.size());
  const auto x = a.coefficients();
  const auto y = b.coefficients();
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) c[i * y.size() + j] = x[i] * y[j];
  return WaveFunction(std::move(g), std::move(c));
}

WaveFunction pointwise_product(const WaveFunction& a, const WaveFunction& b) {
  require_same_layout(a, b, "pointwise_product");
  WaveFunction out = a;
  auto c = out.mutable_coefficients();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= b[i];
  return out;
}

double max_abs_difference(const WaveFunction& a, const WaveFunction& b) {
  require_same_layout(a, b, "max_abs_difference");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

void project_out(WaveFunction& v, const WaveFunction& direction) {
  v.axpy(-inner(direction, v), direction);
}

} // namespace vdw
