#pragma once

#include "vdwlab/grid.hpp"

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace vdw {

/// Real coefficient vector on a tensor grid. The inner product carries the
/// grid volume element, so a normalized state satisfies h^D * sum |c|^2 = 1.
class WaveFunction {
public:
  WaveFunction() = default;
  explicit WaveFunction(TensorGrid grid);
  WaveFunction(TensorGrid grid, std::vector<double> coefficients);

  /// Samples f at every grid point; f receives one position per particle.
  static WaveFunction sample(const TensorGrid& grid,
                             const std::function<double(std::span<const Vec3>)>& f);

  const TensorGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return coefficients_.size(); }
  std::span<const double> coefficients() const noexcept { return coefficients_; }
  /// Mutable view; invalidates the cached norm.
  std::span<double> mutable_coefficients() noexcept {
    norm_.reset();
    return coefficients_;
  }
  double operator[](std::size_t i) const { return coefficients_[i]; }

  /// Discrete L2 norm (cached until the next mutable access).
  double norm() const;
  /// Scales to unit norm; throws PreconditionError for the zero vector.
  WaveFunction& normalize();

  WaveFunction& operator+=(const WaveFunction& other);
  WaveFunction& operator-=(const WaveFunction& other);
  WaveFunction& operator*=(double a);
  /// this += a * x
  WaveFunction& axpy(double a, const WaveFunction& x);

private:
  TensorGrid grid_;
  std::vector<double> coefficients_;
  mutable std::optional<double> norm_;
};

WaveFunction operator+(WaveFunction a, const WaveFunction& b);
WaveFunction operator-(WaveFunction a, const WaveFunction& b);
WaveFunction operator*(double s, WaveFunction a);

/// Discrete L2 inner product. Throws PreconditionError on layout mismatch.
double inner(const WaveFunction& a, const WaveFunction& b);

/// (a ⊗ b)(x_a, x_b) = a(x_a) b(x_b), particles of a first.
WaveFunction tensor_product(const WaveFunction& a, const WaveFunction& b);

/// Pointwise product of two functions on the same grid.
WaveFunction pointwise_product(const WaveFunction& a, const WaveFunction& b);

/// Largest absolute coefficient difference.
double max_abs_difference(const WaveFunction& a, const WaveFunction& b);

/// Removes the component along the unit vector `direction`.
void project_out(WaveFunction& v, const WaveFunction& direction);

} // namespace vdw
