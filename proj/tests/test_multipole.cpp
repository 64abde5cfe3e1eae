#include <doctest.h>

#include "vdwlab/error.hpp"
#include "vdwlab/multipole.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace vdw;

namespace {

double naive_combination(const Vec3& zl, const Vec3& zm, const Vec3& y) {
  auto inv = [](double a, double b, double c) { return 1.0 / std::sqrt(a * a + b * b + c * c); };
  return inv(y[0], y[1], y[2]) - inv(y[0] + zl[0], y[1] + zl[1], y[2] + zl[2]) -
         inv(y[0] - zm[0], y[1] - zm[1], y[2] - zm[2]) +
         inv(y[0] + zl[0] - zm[0], y[1] + zl[1] - zm[1], y[2] + zl[2] - zm[2]);
}

Vec3 random_in_ball(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  while (true) {
    Vec3 v{u(rng), u(rng), u(rng)};
    if (v[0] * v[0] + v[1] * v[1] + v[2] * v[2] <= 1.0) return {radius * v[0], radius * v[1], radius * v[2]};
  }
}

} // namespace

TEST_CASE("stable combination agrees with the naive formula") {
  const Vec3 zl{0.3, -0.2, 0.5};
  const Vec3 zm{-0.1, 0.4, 0.2};
  const Vec3 y{1.0, 2.0, 6.0};
  CHECK(coulomb_pair_combination(zl, zm, y) == doctest::Approx(naive_combination(zl, zm, y)).epsilon(1e-10));
}

TEST_CASE("multipole orders") {
  const auto zero = multipole_expand({0, 0, 0}, {0, 0, 0}, {0, 0, 10});
  for (double c : zero.coefficients_by_order) CHECK(c == 0.0);

  const auto r = multipole_expand({0, 0, 0.1}, {0, 0, 0.1}, {0, 0, 10});
  CHECK(std::abs(r.coefficients_by_order[3] - (-0.02)) < 1e-4);
  CHECK(r.dipole_term == doctest::Approx(-0.02));

  std::mt19937_64 rng(2024);
  double worst01 = 0.0, worst2 = 0.0, worst3 = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    Vec3 y = random_in_ball(rng, 1.0);
    const double n = std::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2]);
    for (double& c : y) c *= 10.0 / n;
    const Vec3 zl = random_in_ball(rng, 10.0 / 6.0);
    const Vec3 zm = random_in_ball(rng, 10.0 / 6.0);
    const auto m = multipole_expand(zl, zm, y);
    worst01 = std::max({worst01, std::abs(m.coefficients_by_order[0]), std::abs(m.coefficients_by_order[1])});
    worst2 = std::max(worst2, std::abs(m.coefficients_by_order[2]));
    worst3 = std::max(worst3, std::abs(m.coefficients_by_order[3] - dipole_pair_term(zl, zm, y)));
  }
  CHECK(worst01 <= 1e-10);
  CHECK(worst2 <= 1e-8);
  CHECK(worst3 <= 1e-4);

  CHECK_THROWS_AS(multipole_expand({0, 0, 4}, {0, 0, 0}, {0, 0, 10}), PreconditionError);
}

TEST_CASE("Newton's theorem by quadrature") {
  const double q = 2.5;
  const double vol = 4.0 / 3.0 * std::numbers::pi;
  const auto ball = newton_cancellation_check([&](double) { return q / vol; }, 1.0, {{0, 0, 2}, {1, 1, 1}});
  CHECK(ball.total_charge == doctest::Approx(q).epsilon(1e-12));
  CHECK(std::abs(ball.potentials[0] - q / 2.0) < 1e-6);
  CHECK(ball.max_relative_deviation < 1e-6);

  const double r0 = 1.5;
  const auto gauss = newton_cancellation_check([](double r) { return std::exp(-r * r); }, r0, {{0, 0, 3 * r0}});
  CHECK(gauss.max_relative_deviation <= 1e-6);
  REQUIRE(gauss.neutral_pair.size() == 1);
  CHECK(gauss.neutral_pair_relative <= 1e-8);

  CHECK_THROWS_AS(newton_cancellation_check([](double) { return 1.0; }, 1.0, {{0, 0, 0.5}}), PreconditionError);
}
