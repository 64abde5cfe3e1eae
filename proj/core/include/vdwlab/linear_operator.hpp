#pragma once

#include "vdwlab/wavefunction.hpp"

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace vdw {

/// Matrix-free real operator on a tensor grid. Instances are immutable and
/// the apply kernel must be reentrant.
class LinearOperator {
public:
  /// out = A in; `out` is fully overwritten.
  using Kernel = std::function<void(std::span<const double> in, std::span<double> out)>;

  LinearOperator() = default;
  LinearOperator(TensorGrid domain, Kernel kernel, std::string descriptor,
                 bool self_adjoint = true);

  static LinearOperator zero(TensorGrid domain);
  static LinearOperator identity(TensorGrid domain);
  /// Multiplication by a grid function.
  static LinearOperator diagonal(TensorGrid domain, std::vector<double> values,
                                 std::string descriptor);

  WaveFunction operator()(const WaveFunction& psi) const;
  void apply(std::span<const double> in, std::span<double> out) const;

  const TensorGrid& domain() const noexcept { return domain_; }
  std::size_t size() const noexcept { return domain_.size(); }
  const std::string& descriptor() const noexcept { return descriptor_; }
  bool is_self_adjoint() const noexcept { return self_adjoint_; }

  /// Diagonal values when the operator is a pure multiplication operator.
  const std::vector<double>* diagonal_values() const noexcept { return diagonal_.get(); }

  /// Expectation value <psi, A psi> / <psi, psi>.
  double expectation(const WaveFunction& psi) const;

private:
  TensorGrid domain_;
  Kernel kernel_;
  std::string descriptor_;
  bool self_adjoint_ = true;
  std::shared_ptr<const std::vector<double>> diagonal_;
};

/// a + b on a common domain.
LinearOperator operator+(const LinearOperator& a, const LinearOperator& b);
/// a - b on a common domain.
LinearOperator operator-(const LinearOperator& a, const LinearOperator& b);
/// A + s * Id.
LinearOperator shifted(const LinearOperator& a, double s);
/// A ⊗ 1 + 1 ⊗ B on the concatenated grid (particles of A first).
LinearOperator kron_sum(const LinearOperator& a, const LinearOperator& b);

/// Dense row-major matrix of the operator (columns from unit vectors).
std::vector<double> assemble_dense(const LinearOperator& op);

} // namespace vdw
