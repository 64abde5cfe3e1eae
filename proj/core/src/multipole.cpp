#include "vdwlab/multipole.hpp"

#include "vdwlab/error.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace vdw {

namespace {

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Vec3 neg(const Vec3& a) { return {-a[0], -a[1], -a[2]}; }

// 1/|y + z| - 1/|y|
double shifted_inverse(const Vec3& y, const Vec3& z) {
  const double ny = norm(y);
  const Vec3 yz{y[0] + z[0], y[1] + z[1], y[2] + z[2]};
  const double nyz = norm(yz);
  return -(2.0 * dot(y, z) + dot(z, z)) / (ny * nyz * (ny + nyz));
}

} // namespace

double coulomb_pair_combination(const Vec3& z_l, const Vec3& z_m, const Vec3& y) {
  return shifted_inverse(y, sub(z_l, z_m)) - shifted_inverse(y, z_l) - shifted_inverse(y, neg(z_m));
}

double dipole_pair_term(const Vec3& z_l, const Vec3& z_m, const Vec3& y) {
  const double n = norm(y);
  const Vec3 u{y[0] / n, y[1] / n, y[2] / n};
  return dot(z_l, z_m) - 3.0 * dot(z_l, u) * dot(z_m, u);
}

MultipoleReport multipole_expand(const Vec3& z_l, const Vec3& z_m, const Vec3& y) {
  const double ny = norm(y);
  if (!(ny > 0.0)) throw PreconditionError("multipole: zero separation");
  const double limit = ny / 3.0;
  const double scale = std::max({norm(z_l), norm(z_m), norm(sub(z_l, z_m))});
  if (scale > limit)
    throw PreconditionError("multipole: displacements exceed |y|/3");

  MultipoleReport rep;
  rep.sup_norm_domain = limit;
  rep.dipole_term = dipole_pair_term(z_l, z_m, y);
  if (scale == 0.0) return rep;

  const Vec3 u{y[0] / ny, y[1] / ny, y[2] / ny};
  constexpr int rows = 64;
  constexpr int degree = 9;
  constexpr double x_max = 1.0 / 30.0;
  constexpr double x_min = 1.0 / 3e4;
  Eigen::MatrixXd a(rows, degree + 1);
  Eigen::VectorXd b(rows);
  for (int i = 0; i < rows; ++i) {
    // x = scale / t, log-spaced; s = x / x_max in [1e-3, 1]
    const double x = std::exp(std::log(x_max) + (std::log(x_min) - std::log(x_max)) * i / (rows - 1));
    const double s = x / x_max;
    const double t = scale / x;
    const double w = 1.0 / (s * s * s); // relative weighting against the leading cubic term
    for (int k = 0; k <= degree; ++k) a(i, k) = w * std::pow(s, k);
    b(i) = w * coulomb_pair_combination(z_l, z_m, {t * u[0], t * u[1], t * u[2]});
  }
  const Eigen::VectorXd col = a.colwise().norm();
  const Eigen::VectorXd c = (a * col.cwiseInverse().asDiagonal()).colPivHouseholderQr().solve(b).cwiseQuotient(col);
  // combination = sum_k c_k (scale / (x_max t))^k
  for (int k = 0; k < 5; ++k)
    rep.coefficients_by_order[static_cast<std::size_t>(k)] = c(k) * std::pow(scale / x_max, k);
  rep.fit_residual = (a * c - b).norm() / b.norm();
  return rep;
}

namespace {

using boost::math::quadrature::gauss;
using boost::math::quadrature::gauss_kronrod;

// ∫ rho(|z|) / |x + z| d^3z for a radial density, axis along x.
double radial_potential_adaptive(const std::function<double(double)>& rho, double a, double d) {
  auto shell = [&](double r) {
    auto inner = [&](double c) { return 1.0 / std::sqrt(d * d + r * r + 2.0 * d * r * c); };
    const double ang = gauss_kronrod<double, 61>::integrate(inner, -1.0, 1.0, 15, 1e-13);
    return 2.0 * std::numbers::pi * r * r * rho(r) * ang;
  };
  return gauss_kronrod<double, 61>::integrate(shell, 0.0, a, 15, 1e-13);
}

// Fixed-order rule for nested use; the integrands are analytic on the domain.
double radial_potential_fixed(const std::function<double(double)>& rho, double a, double d) {
  auto shell = [&](double r) {
    auto inner = [&](double c) { return 1.0 / std::sqrt(d * d + r * r + 2.0 * d * r * c); };
    return 2.0 * std::numbers::pi * r * r * rho(r) * gauss<double, 40>::integrate(inner, -1.0, 1.0);
  };
  return gauss<double, 40>::integrate(shell, 0.0, a);
}

} // namespace

NewtonReport newton_cancellation_check(const std::function<double(double)>& density, double support_radius,
                                       const std::vector<Vec3>& eval_points) {
  if (!(support_radius > 0.0)) throw PreconditionError("newton check: support radius must be positive");
  NewtonReport rep;
  rep.total_charge = gauss_kronrod<double, 61>::integrate(
      [&](double r) { return 4.0 * std::numbers::pi * r * r * density(r); }, 0.0, support_radius, 15, 1e-14);
  if (!(rep.total_charge > 0.0)) throw PreconditionError("newton check: density has no charge");
  auto unit = [&](double r) { return density(r) / rep.total_charge; };

  for (const Vec3& y : eval_points) {
    const double d = norm(y);
    if (!(d > support_radius)) throw PreconditionError("newton check: evaluation point inside the support");
    const double v = radial_potential_adaptive(density, support_radius, d);
    rep.potentials.push_back(v);
    const double expect = rep.total_charge / d;
    rep.max_relative_deviation = std::max(rep.max_relative_deviation, std::abs(v - expect) / expect);

    if (d > 2.0 * support_radius) {
      // 1/|y| - ∫rho/|y+z| - ∫rho/|y-z'| + ∫∫ rho rho' / |y + z - z'|
      const double single = radial_potential_adaptive(unit, support_radius, d);
      auto shell = [&](double r) {
        auto inner = [&](double c) {
          const double dist = std::sqrt(d * d + r * r + 2.0 * d * r * c);
          return radial_potential_fixed(unit, support_radius, dist);
        };
        return 2.0 * std::numbers::pi * r * r * unit(r) * gauss<double, 40>::integrate(inner, -1.0, 1.0);
      };
      const double both = gauss<double, 40>::integrate(shell, 0.0, support_radius);
      const double value = 1.0 / d - 2.0 * single + both;
      rep.neutral_pair.push_back(value);
      rep.neutral_pair_relative = std::max(rep.neutral_pair_relative, std::abs(value) * d);
    }
  }
  return rep;
}

NewtonReport newton_cancellation_check_shells(const std::vector<double>& radii, const std::vector<double>& weights,
                                              const std::vector<Vec3>& eval_points) {
  if (radii.size() != weights.size() || radii.empty()) throw PreconditionError("newton check: bad shell table");
  NewtonReport rep;
  double support = 0.0;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    rep.total_charge += weights[k];
    if (weights[k] != 0.0) support = std::max(support, radii[k]);
  }
  if (!(rep.total_charge > 0.0)) throw PreconditionError("newton check: density has no charge");
  // angular average of 1/|x + z| over the sphere |z| = r
  auto shell_average = [](double d, double r) {
    auto inner = [&](double c) { return 1.0 / std::sqrt(d * d + r * r + 2.0 * d * r * c); };
    return 0.5 * gauss_kronrod<double, 61>::integrate(inner, -1.0, 1.0, 10, 1e-14);
  };
  auto potential = [&](double d) {
    double v = 0.0;
    for (std::size_t k = 0; k < radii.size(); ++k)
      if (weights[k] != 0.0) v += weights[k] * shell_average(d, radii[k]);
    return v;
  };
  for (const Vec3& y : eval_points) {
    const double d = norm(y);
    if (!(d > support)) throw PreconditionError("newton check: evaluation point inside the support");
    const double v = potential(d);
    rep.potentials.push_back(v);
    const double expect = rep.total_charge / d;
    rep.max_relative_deviation = std::max(rep.max_relative_deviation, std::abs(v - expect) / expect);
    if (d > 2.0 * support) {
      const double q = rep.total_charge;
      // the potential is smooth on [d - support, d + support]; tabulate it at
      // Chebyshev points and interpolate (barycentric form)
      constexpr int nodes = 40;
      const double lo = d - support, hi = d + support;
      std::vector<double> xs(nodes), fs(nodes), ws(nodes);
      for (int j = 0; j < nodes; ++j) {
        const double th = std::numbers::pi * (j + 0.5) / nodes;
        xs[j] = 0.5 * (lo + hi) + 0.5 * (hi - lo) * std::cos(th);
        fs[j] = potential(xs[j]);
        ws[j] = (j % 2 ? -1.0 : 1.0) * std::sin(th);
      }
      auto interp = [&](double x) {
        double num = 0.0, den = 0.0;
        for (int j = 0; j < nodes; ++j) {
          const double dx = x - xs[j];
          if (dx == 0.0) return fs[j];
          num += ws[j] * fs[j] / dx;
          den += ws[j] / dx;
        }
        return num / den;
      };
      double both = 0.0;
      for (std::size_t k = 0; k < radii.size(); ++k) {
        if (weights[k] == 0.0) continue;
        const double r = radii[k];
        auto inner = [&](double c) { return interp(std::sqrt(d * d + r * r + 2.0 * d * r * c)); };
        both += weights[k] * 0.5 * gauss<double, 40>::integrate(inner, -1.0, 1.0);
      }
      const double value = 1.0 / d - 2.0 * v / q + both / (q * q);
      rep.neutral_pair.push_back(value);
      rep.neutral_pair_relative = std::max(rep.neutral_pair_relative, std::abs(value) * d);
    }
  }
  return rep;
}

} // namespace vdw
