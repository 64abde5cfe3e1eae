#include <doctest.h>

#include "vdwlab/density.hpp"
#include "vdwlab/dispersion.hpp"
#include "vdwlab/error.hpp"
#include "vdwlab/hamiltonian.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

using namespace vdw;

namespace {

GridSpec line(std::size_t n, double L) {
  GridSpec g;
  g.points_per_axis = n;
  g.half_width = L;
  return g;
}

GridSpec cube(std::size_t n, double L) {
  GridSpec g = line(n, L);
  g.dim_per_particle = 3;
  return g;
}

// Sum-over-states value of sigma for two identical atoms from the dense
// eigen-decomposition of the single-atom matrix.
double sum_over_states(const AtomSpec& atom, const GridSpec& g) {
  const auto h = build_ion_hamiltonian(atom, 1, g);
  const auto n = static_cast<Eigen::Index>(h.size());
  const auto d = assemble_dense(h);
  Eigen::MatrixXd m = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(d.data(), n, n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  Eigen::VectorXd z(n);
  for (Eigen::Index k = 0; k < n; ++k) z(k) = g.coordinate(static_cast<std::size_t>(k));
  const Eigen::VectorXd zphi = z.cwiseProduct(es.eigenvectors().col(0));
  const Eigen::VectorXd t = es.eigenvectors().transpose() * zphi; // <a|z|0>, unit-sum normalization
  double s = 0.0;
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) {
      if (a == 0 && b == 0) continue;
      const double gap = es.eigenvalues()(a) + es.eigenvalues()(b) - 2.0 * es.eigenvalues()(0);
      s += t(a) * t(a) * t(b) * t(b) / gap;
    }
  return s;
}

} // namespace

TEST_CASE("dipole coupling values") {
  DipoleCoupling f;
  f.dim = 3;
  const std::vector<Vec3> parallel{{0, 0, 1}, {0, 0, 1}};
  CHECK(f(parallel) == doctest::Approx(-2.0));
  const std::vector<Vec3> ortho{{1, 0, 0}, {0, 1, 0}};
  CHECK(f(ortho) == 0.0);
  f.direction_v = {0, 0, 2};
  CHECK_THROWS_AS(f.validate(), PreconditionError);
}

TEST_CASE("dipole coupling on the Drude ground state") {
  const GridSpec g = line(200, 8.0);
  const AtomState a = atom_ground_state(AtomSpec::well1d(0.0), g, SolverSettings{});
  const WaveFunction pp = tensor_product(a.spectrum.ground_vector(), a.spectrum.ground_vector());
  DipoleCoupling f;
  const WaveFunction b = dipole_coupling_apply(f, pp);
  // <z^2> = 1/2 for the unit oscillator
  CHECK(std::pow(b.norm(), 2) == doctest::Approx(0.25).epsilon(2e-3));
  CHECK_THROWS_AS(dipole_coupling_apply(f, a.spectrum.ground_vector()), PreconditionError);
}

TEST_CASE("Drude sigma against oracles") {
  SolverSettings s;
  s.tolerance = 1e-10;
  const GridSpec g = line(64, 8.0);
  const AtomSpec unit = AtomSpec::well1d(0.0);
  const double oracle = sum_over_states(unit, g);
  const auto r = sigma_coefficient(unit, unit, {0, 0, 1}, g, s);
  CHECK(std::abs(r.sigma - oracle) < 1e-8);
  CHECK(r.resolvent_residual <= s.tolerance);

  const auto fine = sigma_coefficient(unit, unit, {0, 0, 1}, line(256, 8.0), s);
  CHECK(std::abs(fine.sigma - 1.0 / 16.0) < 1e-3);
  CHECK(fine.sigma > 0.0);

  // omega = 1 and 2: <z^2> = 1/2, 1/4, gaps 2 and 4
  const AtomSpec stiff = AtomSpec::well1d(0.0, 4.0);
  const auto mixed = sigma_coefficient(unit, stiff, {0, 0, 1}, line(256, 8.0), s);
  CHECK(std::abs(mixed.sigma - (0.5 * 0.25) / 6.0) < 1e-3);
  const auto swapped = sigma_coefficient(stiff, unit, {0, 0, 1}, line(256, 8.0), s);
  CHECK(std::abs(mixed.sigma - swapped.sigma) < 1e-9);
}

TEST_CASE("cut-off states change sigma only slightly") {
  SigmaOptions o;
  o.cutoff_R = 60.0; // flat on |z| <= 8.6, i.e. the whole box
  const auto r = sigma_coefficient(AtomSpec::well1d(0.0), AtomSpec::well1d(0.0), {0, 0, 1}, line(64, 8.0),
                                   SolverSettings{}, o);
  REQUIRE(r.cutoff_difference.has_value());
  CHECK(std::abs(*r.cutoff_difference) < 1e-12);
  o.cutoff_R = 30.0;
  const auto r2 = sigma_coefficient(AtomSpec::well1d(0.0), AtomSpec::well1d(0.0), {0, 0, 1}, line(64, 8.0),
                                    SolverSettings{}, o);
  CHECK(std::abs(*r2.cutoff_difference) < 1e-6);
}

TEST_CASE("soft-Coulomb sigma is positive and symmetric") {
  const GridSpec g = line(32, 8.0);
  const AtomSpec h = AtomSpec::softcoulomb1d(1, 0.0);
  const AtomSpec he = AtomSpec::softcoulomb1d(2, 0.0);
  const auto a = sigma_coefficient(h, he, {0, 0, 1}, g, SolverSettings{});
  const auto b = sigma_coefficient(he, h, {0, 0, 1}, g, SolverSettings{});
  CHECK(a.sigma > 0.0);
  CHECK(std::abs(a.sigma - b.sigma) < 1e-8);
  CHECK(a.pair_gap > 1e-6);
}

TEST_CASE("degenerate atoms are refused") {
  SigmaOptions o;
  o.min_gap = 100.0;
  CHECK_THROWS_AS(sigma_coefficient(AtomSpec::well1d(0.0), AtomSpec::well1d(0.0), {0, 0, 1}, line(32, 8.0),
                                    SolverSettings{}, o),
                  DegeneracyError);
}

TEST_CASE("direction invariance in 3D") {
  SolverSettings s;
  s.tolerance = 1e-10;
  const GridSpec g = cube(10, 4.0);
  const AtomSpec iso = AtomSpec::harmonic3d({0, 0, 0});
  const double r = 1.0 / std::sqrt(3.0);
  const std::vector<Vec3> dirs{{0, 0, 1}, {1, 0, 0}, {r, r, r}, {0, 0, -1}};
  const auto ok = direction_invariance_check(iso, iso, dirs, g, s);
  CHECK(ok.direction_spread <= 1e-6);
  CHECK(ok.passed);
  CHECK(ok.sigma_by_direction[0] == doctest::Approx(ok.sigma_by_direction[3]).epsilon(1e-12));

  const AtomSpec aniso = AtomSpec::harmonic3d({0, 0, 0}, {1.0, 1.0, 3.0});
  const auto bad = direction_invariance_check(aniso, aniso, dirs, g, s);
  CHECK(bad.direction_spread > 10.0 * s.tolerance);
  CHECK_FALSE(bad.passed);

  CHECK_THROWS_AS(direction_invariance_check(AtomSpec::well1d(0.0), AtomSpec::well1d(0.0), dirs, line(16, 4.0), s),
                  PreconditionError);
}

TEST_CASE("one-electron density") {
  const GridSpec g = line(40, 4.0);
  const TensorGrid g1(g, 1);
  WaveFunction f = WaveFunction::sample(g1, [](std::span<const Vec3> x) { return std::exp(-x[0][0] * x[0][0]); });
  f.normalize();
  const WaveFunction u = random_state(g1, 5);
  const auto rho = one_electron_density(tensor_product(f, u), 0);
  double total = 0.0;
  for (std::size_t k = 0; k < rho.size(); ++k) {
    CHECK(rho[k] == doctest::Approx(f[k] * f[k]).epsilon(1e-12));
    total += rho[k] * g.spacing();
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

  const TensorGrid g3(line(10, 2.0), 3);
  const WaveFunction w = random_state(g3, 9);
  for (std::size_t e = 0; e < 3; ++e) {
    double t = 0.0;
    for (double v : one_electron_density(w, e)) t += v * g3.spec().spacing();
    CHECK(std::abs(t - 1.0) < 1e-8);
  }

  const AtomState drude = atom_ground_state(AtomSpec::well1d(0.0), line(201, 8.0), SolverSettings{});
  const auto p = one_electron_density(drude.spectrum.ground_vector(), 0);
  double worst = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) worst = std::max(worst, std::abs(p[k] - p[p.size() - 1 - k]));
  CHECK(worst < 1e-10);
}

TEST_CASE("decay fits") {
  const GridSpec g = line(401, 20.0);
  const TensorGrid g1(g, 1);
  const double alpha = 0.7;
  WaveFunction e = WaveFunction::sample(g1, [&](std::span<const Vec3> x) { return std::exp(-alpha * std::abs(x[0][0])); });
  e.normalize();
  const DecayFit fe = fit_decay_rate(e, 0.0);
  CHECK(fe.fitted_rate == doctest::Approx(2 * alpha).epsilon(0.01));
  CHECK_FALSE(fe.superexponential);

  GridSpec rg;
  rg.geometry = Geometry::radial;
  rg.points_per_axis = 2000;
  rg.half_width = 40.0;
  const auto hyd = ground_state(
      build_full_hamiltonian(SystemConfig::neutral({AtomSpec::coulomb3d(1)}, InteractionKind::coulomb), rg),
      SolverSettings{});
  DecayFitOptions o;
  o.theoretical_bound = std::sqrt(0.0 - hyd.ground_energy());
  const DecayFit fh = fit_decay_rate(hyd.ground_vector(), 0.0, o);
  CHECK(fh.amplitude_rate == doctest::Approx(0.5).epsilon(0.05));
  CHECK_FALSE(fh.superexponential);

  const AtomState drude = atom_ground_state(AtomSpec::well1d(0.0), line(201, 8.0), SolverSettings{});
  const DecayFit fd = fit_decay_rate(drude.spectrum.ground_vector(), 0.0);
  CHECK(fd.superexponential);
  CHECK(fd.exceeds_bound);
  CHECK(std::isnan(fd.theoretical_bound));
}
