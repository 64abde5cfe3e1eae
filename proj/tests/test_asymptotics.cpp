#include <doctest.h>

#include "vdwlab/asymptotics.hpp"
#include "vdwlab/error.hpp"

#include <algorithm>
#include <cmath>

using namespace vdw;

namespace {

// normal modes of two unit oscillators with coupling lambda z1 z2 (mass 1/2)
double normal_mode_W(double lambda) { return std::sqrt(1.0 + lambda / 2) + std::sqrt(1.0 - lambda / 2) - 2.0; }

SweepSettings coupling_sweep(std::size_t n, double L) {
  SweepSettings st;
  st.grid.points_per_axis = n;
  st.grid.half_width = L;
  st.kind = Abscissa::coupling;
  st.solver.tolerance = 1e-10;
  return st;
}

const std::vector<double> kLambdas{0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4};

} // namespace

TEST_CASE("zero coupling gives W = 0 for every method") {
  SweepSettings st = coupling_sweep(24, 4.5);
  st.methods = {SweepMethod::dense, SweepMethod::feshbach, SweepMethod::variational};
  const auto r = run_sweep([](double) { return drude_pair(0.0); }, {1.0, 2.0}, st);
  for (const auto& [m, vals] : r.energies)
    for (const auto& v : vals) {
      REQUIRE(v.value);
      CHECK(std::abs(*v.value) <= 1e-10);
    }
}

TEST_CASE("coupling sweep: dense, Feshbach and variational against the normal modes") {
  SweepSettings st = coupling_sweep(32, 4.5);
  st.methods = {SweepMethod::feshbach, SweepMethod::variational};
  st.jobs = 2;
  const auto r = run_sweep(drude_pair, kLambdas, st);
  // the dense oracle joins on its own when the system is small enough
  REQUIRE(r.has(SweepMethod::dense));
  for (std::size_t k = 0; k < kLambdas.size(); ++k) {
    const auto& d = r.energies.at(SweepMethod::dense)[k];
    const auto& f = r.energies.at(SweepMethod::feshbach)[k];
    const auto& v = r.energies.at(SweepMethod::variational)[k];
    REQUIRE(d.value);
    REQUIRE(f.value);
    REQUIRE(v.value);
    CHECK(d.solver == "dense_oracle");
    CHECK(std::abs(*d.value - normal_mode_W(kLambdas[k])) <= 2e-4);
    CHECK(std::abs(*f.value - *d.value) <= 1e-8);
    CHECK(*v.value >= *d.value);
  }

  const SweepResult rs = recast_coupling_as_separation(r);
  CHECK(std::is_sorted(rs.abscissae.begin(), rs.abscissae.end()));
  const PowerLawFit fit = fit_power_law(rs, SweepMethod::dense);
  CHECK(fit.exponent == doctest::Approx(6.0).epsilon(0.05 / 6));
  CHECK(fit.coefficient == doctest::Approx(1.0 / 16).epsilon(0.01));
  // odd orders vanish for identical oscillators: the bound's excess goes like lambda^4 = R^-12
  const LogLogFit excess = excess_decay(rs, SweepMethod::variational, SweepMethod::dense);
  CHECK(excess.slope >= fit.exponent + 2.0);
}

TEST_CASE("normal-mode data recast to R: exponent and coefficient") {
  std::vector<double> R, W;
  for (double l : kLambdas) {
    R.insert(R.begin(), std::cbrt(1.0 / l));
    W.insert(W.begin(), normal_mode_W(l));
  }
  const PowerLawFit fit = fit_power_law(R, W);
  CHECK(fit.exponent == doctest::Approx(6.0).epsilon(0.05 / 6));
  CHECK(fit.coefficient == doctest::Approx(1.0 / 16).epsilon(0.01));
  // next term of the expansion is -5 lambda^4 / 1024
  CHECK(fit.remainder_exponent == doctest::Approx(12.0).epsilon(0.2 / 12));
  CHECK(fit.remainder_coefficient == doctest::Approx(-5.0 / 1024).epsilon(0.1));
  CHECK(fit.fit_residual > fit.remainder_residual);
}

TEST_CASE("synthetic power laws") {
  const double sigma = 0.37;
  std::vector<double> R;
  for (double r = 5.0; r <= 20.0; r += 1.5) R.push_back(r);

  std::vector<double> pure, with_tail;
  const double d = 2.0 * sigma;
  for (double r : R) {
    pure.push_back(-sigma / std::pow(r, 6));
    with_tail.push_back(-sigma / std::pow(r, 6) + d / std::pow(r, 7));
  }
  const PowerLawFit a = fit_power_law(R, pure);
  CHECK(a.exponent == doctest::Approx(6.0).epsilon(1e-3 / 6));
  CHECK(a.coefficient == doctest::Approx(sigma).epsilon(1e-3));
  CHECK(std::isnan(a.remainder_exponent));
  CHECK(a.abscissae.size() == R.size() - 2);

  const PowerLawFit b = fit_power_law(R, with_tail);
  CHECK(b.remainder_exponent == doctest::Approx(7.0).epsilon(0.1 / 7));
  CHECK(b.remainder_coefficient == doctest::Approx(d).epsilon(0.05));
  CHECK(b.fit_residual >= 0.0);
}

TEST_CASE("fit window and refusals") {
  std::vector<double> R{2, 3, 4, 5, 6, 7};
  std::vector<double> W;
  for (double r : R) W.push_back(-1.0 / std::pow(r, 6));

  FitOptions narrow;
  narrow.window_min = 3.5;
  CHECK_THROWS_AS(fit_power_law(R, W, narrow), PreconditionError); // 3 points left after exclusion
  narrow.exclude_largest = 0;
  CHECK(fit_power_law(R, W, narrow).abscissae.size() == 4);

  // repulsive at short range: the sign change lands in the window
  std::vector<double> W2 = W;
  W2[3] = 1e-4;
  CHECK_THROWS_AS(fit_power_law(R, W2), PreconditionError);
  FitOptions skip;
  skip.exclude_largest = 0;
  skip.window_min = 5.5;
  CHECK_THROWS_AS(fit_power_law(R, W2, skip), PreconditionError); // too few
  CHECK_THROWS_AS(fit_power_law({1, 2, 3}, {-1, -0.5, -0.2}), PreconditionError);
}

TEST_CASE("per-point failures are recorded and the sweep continues") {
  SweepSettings st = coupling_sweep(24, 4.5);
  st.methods = {SweepMethod::feshbach, SweepMethod::dense};
  st.cutoff_radius = 0.3; // keeps far less than half the norm
  const auto r = run_sweep(drude_pair, {0.1, 0.2}, st);
  for (std::size_t k = 0; k < 2; ++k) {
    const auto& f = r.energies.at(SweepMethod::feshbach)[k];
    CHECK_FALSE(f.value);
    CHECK_FALSE(f.failure.empty());
    CHECK(r.energies.at(SweepMethod::dense)[k].value);
  }
  CHECK(r.series(SweepMethod::feshbach).first.empty());

  CHECK_THROWS_AS(run_sweep(drude_pair, {0.2, 0.1}, st), PreconditionError);
  SweepResult separation = r;
  separation.kind = Abscissa::separation;
  CHECK_THROWS_AS(recast_coupling_as_separation(separation), PreconditionError);
}
