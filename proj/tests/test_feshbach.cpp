#include <doctest.h>

#include "vdwlab/error.hpp"
#include "vdwlab/feshbach.hpp"
#include "vdwlab/hamiltonian.hpp"
#include "vdwlab/multipole.hpp"
#include "vdwlab/symmetry.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <memory>

using namespace vdw;

namespace {

GridSpec line(std::size_t n, double L) {
  GridSpec g;
  g.points_per_axis = n;
  g.half_width = L;
  return g;
}

SystemConfig drude_pair(double lambda, double separation = 100.0) {
  SystemConfig cfg = SystemConfig::neutral(
      {AtomSpec::well1d(-0.5 * separation), AtomSpec::well1d(0.5 * separation)}, InteractionKind::dipole);
  cfg.dipole_coupling = lambda;
  return cfg;
}

SystemConfig soft_pair(double separation) {
  return SystemConfig::neutral(
      {AtomSpec::softcoulomb1d(1, -0.5 * separation), AtomSpec::softcoulomb1d(1, 0.5 * separation)},
      InteractionKind::softcoulomb);
}

double normal_mode_energy(double lambda) { return std::sqrt(1 + lambda / 2) + std::sqrt(1 - lambda / 2); }

LinearOperator matrix_operator(std::vector<double> m, std::size_t n) {
  auto mat = std::make_shared<std::vector<double>>(std::move(m));
  GridSpec g = line(8, 1.0);
  g.points_per_axis = std::max<std::size_t>(n, 8);
  // one particle on an n-point axis needs n >= 8; pad with a large diagonal
  const std::size_t size = g.points_per_axis;
  return LinearOperator(
      TensorGrid(g, 1),
      [mat, n, size](std::span<const double> in, std::span<double> out) {
        for (std::size_t i = 0; i < size; ++i) {
          if (i >= n) {
            out[i] = 100.0 * in[i];
            continue;
          }
          double s = 0.0;
          for (std::size_t j = 0; j < n; ++j) s += (*mat)[i * n + j] * in[j];
          out[i] = s;
        }
      },
      "matrix");
}

} // namespace

TEST_CASE("smooth cutoff profile") {
  const SmoothCutoff chi(42.0);
  CHECK(chi(0.0) == 1.0);
  CHECK(chi(6.0) == 1.0);
  CHECK(chi(7.0 + 1e-9) == 0.0);
  double prev = 1.0;
  bool monotone = true, bounded = true;
  for (int k = 0; k <= 100; ++k) {
    const double v = chi(0.08 * k);
    monotone = monotone && v <= prev;
    bounded = bounded && v >= 0.0 && v <= 1.0;
    prev = v;
  }
  CHECK(monotone);
  CHECK(bounded);
  CHECK_THROWS_AS(SmoothCutoff(0.0), PreconditionError);
}

TEST_CASE("cut-off product states") {
  const GridSpec g = line(48, 6.0);
  SolverSettings s;
  const SystemConfig cfg = drude_pair(0.0);
  const auto a0 = Decomposition::canonical(cfg);
  // cutoff flat on the whole box
  const CutoffState wide = build_cutoff_product(cfg, a0, g, s, {100.0});
  const WaveFunction exact = tensor_product(cluster_ground_state(cfg, a0, 0, g, s).state,
                                            cluster_ground_state(cfg, a0, 1, g, s).state);
  CHECK(max_abs_difference(WaveFunction(wide.base_state.grid(),
                                        std::vector<double>(exact.coefficients().begin(), exact.coefficients().end())),
                           wide.base_state) < 1e-12);

  const CutoffState tight = build_cutoff_product(cfg, a0, g, s, {42.0});
  CHECK(tight.product_defect <= 1e-6);
  CHECK(tight.eigen_defects[0] <= 1e-6);
  CHECK(tight.cutoff_defects[0] <= 1e-6);

  CHECK_THROWS_AS(build_cutoff_product(cfg, a0, g, s, {0.5}), PreconditionError);
}

TEST_CASE("swapped decompositions have disjoint supports") {
  const GridSpec g = line(41, 10.0);
  const SystemConfig cfg = soft_pair(12.0);
  const auto decs = atomic_decompositions(cfg);
  REQUIRE(decs.size() == 2);
  SolverSettings s;
  const auto a = build_cutoff_product(cfg, decs[0], g, s, {35.0});
  const auto b = build_cutoff_product(cfg, decs[1], g, s, {35.0});
  CHECK(max_abs_difference(pointwise_product(a.base_state, b.base_state), WaveFunction(a.base_state.grid())) == 0.0);

  // Psi_a(x) = psi_0(x_0) psi_1(x_1) with psi_i centred on nucleus i
  const auto& p0 = a.cluster_states[0];
  const auto& p1 = a.cluster_states[1];
  const std::size_t m = g.points_per_axis;
  double worst = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) worst = std::max(worst, std::abs(a.base_state[i * m + j] - p0[i] * p1[j]));
  CHECK(worst < 1e-15);
  double worst_b = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) worst_b = std::max(worst_b, std::abs(b.base_state[i * m + j] - p0[j] * p1[i]));
  CHECK(worst_b < 1e-15);
}

TEST_CASE("projection onto the antisymmetrized product") {
  const GridSpec g = line(41, 10.0);
  const SystemConfig cfg = soft_pair(12.0);
  const Projection p = build_projection(cfg, g, SolverSettings{}, {35.0});
  REQUIRE(p.sign_table.size() == 2);
  CHECK(p.sign_table[0].sign == 1);
  CHECK(p.sign_table[1].sign == -1);
  CHECK(p.qn_norm_squared == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(p.expansion_defect < 1e-14);
  CHECK(p.choice_defect < 1e-12);
  CHECK(p.overlap_defect == 0.0);

  // three electrons, atoms Z = (1, 2): three atomic decompositions
  SystemConfig c3 = SystemConfig::neutral(
      {AtomSpec::softcoulomb1d(1, -6.0), AtomSpec::softcoulomb1d(2, 6.0)}, InteractionKind::softcoulomb);
  const Projection p3 = build_projection(c3, line(21, 10.0), SolverSettings{}, {35.0});
  REQUIRE(p3.sign_table.size() == 3);
  CHECK(p3.qn_norm_squared == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
  CHECK(p3.expansion_defect < 1e-13);
  CHECK(p3.choice_defect < 1e-12);
}

TEST_CASE("Feshbach map on explicit matrices") {
  // H diagonal: Pi commutes with H
  const auto diag = matrix_operator({1, 0, 0, 0, 2, 0, 0, 0, 3}, 3);
  WaveFunction e0(diag.domain());
  e0.mutable_coefficients()[0] = 1.0;
  e0.normalize();
  SolverSettings s;
  for (double l : {-1.0, 0.0, 0.5}) CHECK(feshbach_value(diag, e0, l, s).value == doctest::Approx(1.0));

  // Schur complement by hand: a - c^T (D - l)^-1 c
  const std::vector<double> m{1.0, 0.3, -0.2, 0.3, 2.0, 0.1, -0.2, 0.1, 3.0};
  const auto op = matrix_operator(m, 3);
  const double l = 0.5;
  Eigen::Matrix2d d;
  d << 2.0 - l, 0.1, 0.1, 3.0 - l;
  const Eigen::Vector2d c(0.3, -0.2);
  const double oracle = 1.0 - c.dot(d.inverse() * c);
  WaveFunction u(op.domain());
  u.mutable_coefficients()[0] = 1.0;
  u.normalize();
  s.tolerance = 1e-12;
  const auto fv = feshbach_value(op, u, l, s);
  CHECK(fv.value == doctest::Approx(oracle).epsilon(1e-10));
  CHECK(fv.V >= 0.0);
}

TEST_CASE("Drude fixed point") {
  SolverSettings s;
  s.tolerance = 1e-12;
  const GridSpec g = line(32, 6.0);
  for (double lambda : {0.1, 0.2, 0.3}) {
    const SystemConfig cfg = drude_pair(lambda);
    const FeshbachResult r = feshbach_energy(cfg, g, s);
    CHECK(r.valid);
    CHECK(r.residual <= 1e-10);
    CHECK(r.interaction_energy < 0.0);
    SolverSettings dense = s;
    dense.method = EigenMethod::dense_oracle;
    const auto ref = ground_state(build_full_hamiltonian(cfg, g), dense);
    CHECK(std::abs(r.energy - ref.ground_energy()) <= 1e-8);
    CHECK(std::abs(inner(r.ground_state, ref.ground_vector())) >= 1.0 - 1e-6);
  }

  // second-order differences: the error against the normal modes falls like h^2
  const double coarse = std::abs(feshbach_energy(drude_pair(0.2), line(60, 5.0), s).energy - normal_mode_energy(0.2));
  const double fine = std::abs(feshbach_energy(drude_pair(0.2), line(120, 5.0), s).energy - normal_mode_energy(0.2));
  CHECK(fine < 1e-3);
  CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.1));

  const FeshbachResult zero = feshbach_energy(drude_pair(0.0), g, s);
  CHECK(std::abs(zero.interaction_energy) <= 1e-12);
  CHECK(zero.iterations.size() == 1);
}

TEST_CASE("soft-Coulomb fixed point matches the antisymmetric dense oracle") {
  SolverSettings s;
  s.tolerance = 1e-12;
  const GridSpec g = line(24, 7.0);
  const SystemConfig cfg = soft_pair(7.0);
  FixedPointOptions fo;
  const FeshbachResult r = feshbach_energy(cfg, g, s, fo, {20.0});
  SolverSettings dense = s;
  dense.method = EigenMethod::dense_oracle;
  const TensorGrid tg = system_grid(cfg, g);
  dense.sector = [tg](std::span<double> c) { antisymmetrize_in_place(tg, c); };
  const auto ref = ground_state(build_full_hamiltonian(cfg, g), dense);
  CHECK(r.valid);
  CHECK(r.gap_lower_bound > 0.0);
  CHECK(r.residual <= 1e-10);
  CHECK(std::abs(r.energy - ref.ground_energy()) <= 1e-8);
  CHECK(std::abs(inner(r.ground_state, ref.ground_vector())) >= 1.0 - 1e-6);
}

TEST_CASE("gap failure path") {
  const GridSpec g = line(24, 6.0);
  SolverSettings s;
  SystemConfig cfg = drude_pair(0.0);
  const auto h0 = build_full_hamiltonian(cfg, g);
  const auto sp = low_spectrum(h0, 2, s);
  // Pi on an excited eigenstate: the fixed point is found but the gap is negative
  const FeshbachResult r = solve_fixed_point(h0, sp.eigenvectors[1], 2.0, s);
  CHECK_FALSE(r.valid);
  CHECK(r.gap_lower_bound < 0.0);
  // with coupling the projected operator is indefinite at <Phi, H Phi>; parity can hide
  // the negative direction from CG, so either the solve or the gap measurement rejects it
  cfg.dipole_coupling = 0.3;
  bool rejected = false;
  try {
    rejected = !solve_fixed_point(build_full_hamiltonian(cfg, g), sp.eigenvectors[1], 2.0, s).valid;
  } catch (const GapError&) {
    rejected = true;
  }
  CHECK(rejected);
}

TEST_CASE("diagonal energy check") {
  SolverSettings s;
  const auto zero = diagonal_energy_check(drude_pair(0.0), line(32, 6.0), s);
  CHECK(zero.deviation <= 1e-6);
  CHECK_FALSE(zero.newton_applicable);
  const auto soft = diagonal_energy_check(soft_pair(12.0), line(41, 10.0), s, {35.0});
  CHECK_FALSE(soft.passed.has_value());
  CHECK(soft.deviation > 0.0);

  GridSpec rg;
  rg.geometry = Geometry::radial;
  rg.points_per_axis = 2000;
  rg.half_width = 40.0;
  const auto rad = diagonal_energy_check_radial(AtomSpec::coulomb3d(1), 210.0, rg, s);
  REQUIRE(rad.passed.has_value());
  CHECK(*rad.passed);
  CHECK(rad.deviation <= 1e-8);
}
