#include <doctest.h>

#include "vdwlab/dispersion.hpp"
#include "vdwlab/hamiltonian.hpp"
#include "vdwlab/symmetry.hpp"
#include "vdwlab/variational.hpp"

#include <Eigen/Dense>

#include <cmath>

using namespace vdw;

namespace {

GridSpec line(std::size_t n, double L) {
  GridSpec g;
  g.points_per_axis = n;
  g.half_width = L;
  return g;
}

SystemConfig drude_pair(double lambda) {
  SystemConfig cfg =
      SystemConfig::neutral({AtomSpec::well1d(-50.0), AtomSpec::well1d(50.0)}, InteractionKind::dipole);
  cfg.dipole_coupling = lambda;
  return cfg;
}

double dense_ground(const LinearOperator& h, SectorProjector sector = {}) {
  SolverSettings s;
  s.method = EigenMethod::dense_oracle;
  s.sector = std::move(sector);
  return ground_state(h, s).ground_energy();
}

} // namespace

TEST_CASE("test function at zero coupling") {
  const auto r = rayleigh_upper_bound(drude_pair(0.0), line(40, 6.0), SolverSettings{});
  CHECK(max_abs_difference(r.state, r.base_state) == 0.0);
  CHECK(std::abs(r.rayleigh_quotient) <= 1e-12);
  REQUIRE(r.correction_norms.size() == 1);
  CHECK(r.correction_norms[0].norm == 0.0);
}

TEST_CASE("Drude correction norm against the two-level oracle") {
  // z phi_0 = phi_1 / sqrt(2) for -d^2 + z^2, so I Psi = (lambda / 2) phi_1 phi_1 and the
  // excitation costs 4: ||R_perp I Psi|| = lambda / 8
  SolverSettings s;
  s.tolerance = 1e-10;
  for (double lambda : {0.1, 0.2}) {
    const auto r = rayleigh_upper_bound(drude_pair(lambda), line(200, 6.0), s);
    CHECK(r.correction_norms[0].norm == doctest::Approx(lambda / 8).epsilon(1e-4 / (lambda / 8)));
    CHECK(r.correction_norms[0].cutoff_support_defect == 0.0);
    CHECK(r.orthogonality_defect <= 1e-10);
    CHECK(r.norm_squared >= 1.0);
    CHECK(r.norm_squared == doctest::Approx(1.0 + lambda * lambda / 64).epsilon(1e-6));
  }
}

TEST_CASE("Drude bound against the normal modes and the dense oracle") {
  SolverSettings s;
  s.tolerance = 1e-10;
  const double lambda = 0.2;
  const double exact = std::sqrt(1.1) + std::sqrt(0.9) - 2.0;
  const auto fine = rayleigh_upper_bound(drude_pair(lambda), line(200, 6.0), s);
  CHECK(fine.rayleigh_quotient >= exact);
  CHECK(fine.rayleigh_quotient <= exact + 5e-4);
  CHECK(fine.decomposition_defect <= 1e-9);

  const GridSpec g = line(32, 6.0);
  for (double l : {0.05, 0.2, 0.4}) {
    const SystemConfig cfg = drude_pair(l);
    const auto r = rayleigh_upper_bound(cfg, g, s);
    const double w = dense_ground(build_full_hamiltonian(cfg, g)) - r.energy_infinity;
    CHECK(r.rayleigh_quotient >= w);
    CHECK(r.rayleigh_quotient <= r.bare_quotient + 1e-10);
    CHECK(r.decomposition_defect <= 1e-9);
  }
}

TEST_CASE("bound approaches -sigma lambda^2 with a lambda^4 correction") {
  SolverSettings s;
  s.tolerance = 1e-11;
  const GridSpec g = line(48, 6.0);
  const double sigma = sigma_coefficient(AtomSpec::well1d(0.0), AtomSpec::well1d(0.0), {0, 0, 1}, g, s).sigma;
  std::vector<double> xs, ys;
  for (double l : {0.05, 0.1, 0.2, 0.3, 0.4}) {
    const auto r = rayleigh_upper_bound(drude_pair(l), g, s);
    const double lead = -sigma * l * l;
    CHECK(std::abs(r.rayleigh_quotient / lead - 1.0) < 0.05);
    xs.push_back(std::log(l));
    ys.push_back(std::log(std::abs(r.rayleigh_quotient - lead)));
  }
  Eigen::MatrixXd a(xs.size(), 2);
  Eigen::VectorXd y(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = xs[i];
    y(i) = ys[i];
  }
  const Eigen::Vector2d fit = a.colPivHouseholderQr().solve(y);
  CHECK(fit(1) == doctest::Approx(4.0).epsilon(0.3 / 4.0));
}

TEST_CASE("soft-Coulomb pair: antisymmetrized quotient and dense bound") {
  SolverSettings s;
  s.tolerance = 1e-10;
  const GridSpec g = line(41, 10.0);
  const SystemConfig cfg = SystemConfig::neutral(
      {AtomSpec::softcoulomb1d(1, -6.0), AtomSpec::softcoulomb1d(1, 6.0)}, InteractionKind::softcoulomb);
  const auto r = rayleigh_upper_bound(cfg, g, s, {17.0});
  REQUIRE(r.antisymmetrized_quotient.has_value());
  // chi has support within R/3 of each nucleus, so the swapped copies do not overlap
  CHECK(*r.antisymmetrized_quotient == doctest::Approx(r.rayleigh_quotient).epsilon(1e-12));
  const TensorGrid tg = system_grid(cfg, g);
  const double w = dense_ground(build_full_hamiltonian(cfg, g),
                                [tg](std::span<double> c) { antisymmetrize_in_place(tg, c); }) -
                   r.energy_infinity;
  CHECK(r.rayleigh_quotient >= w);
  CHECK(r.rayleigh_quotient <= r.bare_quotient + 1e-10);
  CHECK(r.orthogonality_defect <= 1e-10);
  CHECK(r.decomposition_defect <= 1e-9);
}

TEST_CASE("three Drude atoms: pair corrections combine") {
  SolverSettings s;
  s.tolerance = 1e-10;
  SystemConfig cfg = SystemConfig::neutral(
      {AtomSpec::well1d(-60.0), AtomSpec::well1d(0.0), AtomSpec::well1d(60.0)}, InteractionKind::dipole);
  cfg.dipole_coupling = 0.2;
  const GridSpec g = line(12, 5.0);
  const auto r = rayleigh_upper_bound(cfg, g, s);
  REQUIRE(r.correction_norms.size() == 3);
  for (const auto& p : r.correction_norms) CHECK(p.norm > 0.0);
  const double w = dense_ground(build_full_hamiltonian(cfg, g)) - r.energy_infinity;
  CHECK(r.rayleigh_quotient >= w);
  CHECK(r.rayleigh_quotient <= r.bare_quotient + 1e-10);
  CHECK(r.decomposition_defect <= 1e-9);
  CHECK(r.orthogonality_defect <= 1e-10);
}
