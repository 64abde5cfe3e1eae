#include "vdwlab/linear_operator.hpp"

#include "vdwlab/error.hpp"

#include <algorithm>

namespace vdw {

LinearOperator::LinearOperator(TensorGrid domain, Kernel kernel, std::string descriptor,
                               bool self_adjoint)
    : domain_(std::move(domain)), kernel_(std::move(kernel)), descriptor_(std::move(descriptor)),
      self_adjoint_(self_adjoint) {}

LinearOperator LinearOperator::zero(TensorGrid domain) {
  return LinearOperator::diagonal(domain, std::vector<double>(domain.size(), 0.0), "zero");
}

LinearOperator LinearOperator::identity(TensorGrid domain) {
  return LinearOperator::diagonal(domain, std::vector<double>(domain.size(), 1.0), "identity");
}

LinearOperator LinearOperator::diagonal(TensorGrid domain, std::vector<double> values,
                                        std::string descriptor) {
  if (values.size() != domain.size())
    throw PreconditionError("diagonal operator: value count does not match the grid");
  auto d = std::make_shared<const std::vector<double>>(std::move(values));
  LinearOperator op(
      std::move(domain),
      [d](std::span<const double> in, std::span<double> out) {
        const auto& v = *d;
        for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] * in[i];
      },
      std::move(descriptor));
  op.diagonal_ = d;
  return op;
}

void LinearOperator::apply(std::span<const double> in, std::span<double> out) const {
  if (in.size() != size() || out.size() != size())
    throw PreconditionError("operator '" + descriptor_ + "': vector length mismatch");
  kernel_(in, out);
}

WaveFunction LinearOperator::operator()(const WaveFunction& psi) const {
  if (psi.size() != size())
    throw PreconditionError("operator '" + descriptor_ + "': vector length mismatch");
  WaveFunction out(psi.grid());
  kernel_(psi.coefficients(), out.mutable_coefficients());
  return out;
}

double LinearOperator::expectation(const WaveFunction& psi) const {
  return inner(psi, (*this)(psi)) / inner(psi, psi);
}

namespace {

LinearOperator combine(const LinearOperator& a, const LinearOperator& b, double sign,
                       const char* symbol) {
  if (a.size() != b.size()) throw PreconditionError("operator sum: domain mismatch");
  std::string desc = "(" + a.descriptor() + ") " + symbol + " (" + b.descriptor() + ")";
  if (a.diagonal_values() && b.diagonal_values()) {
    std::vector<double> v = *a.diagonal_values();
    const auto& w = *b.diagonal_values();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += sign * w[i];
    return LinearOperator::diagonal(a.domain(), std::move(v), std::move(desc));
  }
  return LinearOperator(
      a.domain(),
      [a, b, sign](std::span<const double> in, std::span<double> out) {
        std::vector<double> tmp(in.size());
        a.apply(in, out);
        b.apply(in, tmp);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += sign * tmp[i];
      },
      std::move(desc), a.is_self_adjoint() && b.is_self_adjoint());
}

} // namespace

LinearOperator operator+(const LinearOperator& a, const LinearOperator& b) {
  return combine(a, b, 1.0, "+");
}

LinearOperator operator-(const LinearOperator& a, const LinearOperator& b) {
  return combine(a, b, -1.0, "-");
}

LinearOperator shifted(const LinearOperator& a, double s) {
  return LinearOperator(
      a.domain(),
      [a, s](std::span<const double> in, std::span<double> out) {
        a.apply(in, out);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += s * in[i];
      },
      a.descriptor() + " + " + std::to_string(s), a.is_self_adjoint());
}

LinearOperator kron_sum(const LinearOperator& a, const LinearOperator& b) {
  TensorGrid g = TensorGrid::concat(a.domain(), b.domain());
  const std::size_t na = a.size();
  const std::size_t nb = b.size();
  return LinearOperator(
      g,
      [a, b, na, nb](std::span<const double> in, std::span<double> out) {
        // (A ⊗ 1) acts along the slow index, (1 ⊗ B) along the fast one
        std::vector<double> col_in(na), col_out(na);
        for (std::size_t j = 0; j < nb; ++j) {
          for (std::size_t i = 0; i < na; ++i) col_in[i] = in[i * nb + j];
          a.apply(col_in, col_out);
          for (std::size_t i = 0; i < na; ++i) out[i * nb + j] = col_out[i];
        }
        std::vector<double> row_out(nb);
        for (std::size_t i = 0; i < na; ++i) {
          b.apply(in.subspan(i * nb, nb), row_out);
          for (std::size_t j = 0; j < nb; ++j) out[i * nb + j] += row_out[j];
        }
      },
      "(" + a.descriptor() + ") (+) (" + b.descriptor() + ")",
      a.is_self_adjoint() && b.is_self_adjoint());
}

std::vector<double> assemble_dense(const LinearOperator& op) {
  const std::size_t n = op.size();
  std::vector<double> m(n * n, 0.0);
  std::vector<double> e(n, 0.0), col(n);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    op.apply(e, col);
    e[j] = 0.0;
    for (std::size_t i = 0; i < n; ++i) m[i * n + j] = col[i];
  }
  return m;
}

} // namespace vdw
