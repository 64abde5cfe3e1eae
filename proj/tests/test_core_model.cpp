#include <doctest.h>

#include "vdwlab/error.hpp"
#include "vdwlab/hamiltonian.hpp"
#include "vdwlab/spectral.hpp"
#include "vdwlab/symmetry.hpp"

#include <cmath>
#include <random>

using namespace vdw;

namespace {

GridSpec line(std::size_t n, double L) {
  GridSpec g;
  g.points_per_axis = n;
  g.half_width = L;
  return g;
}

SystemConfig soft_pair(double sep, int z = 1) {
  return SystemConfig::neutral({AtomSpec::softcoulomb1d(z, -0.5 * sep), AtomSpec::softcoulomb1d(z, 0.5 * sep)},
                               InteractionKind::softcoulomb);
}

double residual_norm(const WaveFunction& a, const WaveFunction& b) { return (a - b).norm(); }

} // namespace

TEST_CASE("grid spacing and budget") {
  GridSpec g = line(9, 4.0);
  CHECK(g.spacing() == doctest::Approx(1.0));
  CHECK(g.coordinate(0) == doctest::Approx(-4.0));
  CHECK(g.coordinate(8) == doctest::Approx(4.0));
  g.points_per_axis = 4;
  CHECK_THROWS_AS(g.validate(), ConfigError);

  GridSpec big = line(256, 8.0);
  big.point_budget = 1000;
  CHECK_THROWS_AS(TensorGrid(big, 2), BudgetError);
}

TEST_CASE("single Drude atom matches oscillator levels") {
  const SystemConfig cfg = SystemConfig::neutral({AtomSpec::well1d(0.0)}, InteractionKind::dipole);
  const auto h = build_full_hamiltonian(cfg, line(256, 8.0));
  SolverSettings s;
  const auto r = low_spectrum(h, 2, s);
  CHECK(std::abs(r.eigenvalues[0] - 1.0) < 2e-3);
  CHECK(std::abs(r.eigenvalues[1] - 3.0) < 5e-3);
}

TEST_CASE("radial hydrogen ground energy") {
  GridSpec g;
  g.geometry = Geometry::radial;
  g.points_per_axis = 2000;
  g.half_width = 40.0;
  const SystemConfig cfg = SystemConfig::neutral({AtomSpec::coulomb3d(1)}, InteractionKind::coulomb);
  const auto r = ground_state(build_full_hamiltonian(cfg, g), SolverSettings{});
  CHECK(std::abs(r.ground_energy() + 0.25) < 1e-3);
}

TEST_CASE("no electrons leaves the nuclear repulsion") {
  SystemConfig cfg;
  cfg.atoms = {AtomSpec::coulomb3d(1, {0, 0, -1}), AtomSpec::coulomb3d(1, {0, 0, 1})};
  cfg.electron_count = 0;
  cfg.pair_interaction = InteractionKind::coulomb;
  GridSpec g;
  g.dim_per_particle = 3;
  g.points_per_axis = 8;
  const auto h = build_full_hamiltonian(cfg, g);
  REQUIRE(h.size() == 1);
  WaveFunction one(h.domain(), {1.0});
  CHECK(h(one)[0] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("cluster Hamiltonians") {
  const SystemConfig single = SystemConfig::neutral({AtomSpec::well1d(0.0)}, InteractionKind::dipole);
  const GridSpec g = line(128, 8.0);
  const auto a = Decomposition::canonical(single);
  const auto full = build_full_hamiltonian(single, g);
  const auto cl = build_cluster_hamiltonian(single, a, 0, g);
  const WaveFunction v = random_state(full.domain(), 3);
  CHECK(max_abs_difference(full(v), cl(v)) == 0.0);
  CHECK(build_interaction(single, a, g).diagonal_values() != nullptr);
  CHECK(build_interaction(single, a, g)(v).norm() == 0.0);

  // empty cluster: zero operator on one point
  SystemConfig ion = SystemConfig::neutral({AtomSpec::softcoulomb1d(2, 0.0)}, InteractionKind::softcoulomb);
  ion.electron_count = 0;
  Decomposition empty;
  empty.clusters.resize(1);
  const auto z = build_cluster_hamiltonian(ion, empty, 0, g);
  CHECK(z.size() == 1);
  CHECK(ground_state(z, SolverSettings{}).ground_energy() == 0.0);

  const GridSpec gs = line(40, 8.0);
  const AtomSpec he = AtomSpec::softcoulomb1d(2, 0.0);
  SolverSettings dense;
  dense.method = EigenMethod::dense_oracle;
  dense.sector = [grid = TensorGrid(gs, 2)](std::span<double> c) { antisymmetrize_in_place(grid, c); };
  const double e2 = ground_state(build_ion_hamiltonian(he, 2, gs), dense).ground_energy();
  const double e1 = ground_state(build_ion_hamiltonian(he, 1, gs), SolverSettings{}).ground_energy();
  CHECK(e2 < e1);
  CHECK(e1 < 0.0);
}

TEST_CASE("H = H_a + I_a for every decomposition") {
  const GridSpec g = line(16, 6.0);
  const SystemConfig cfg = soft_pair(3.0);
  const auto h = build_full_hamiltonian(cfg, g);
  for (const auto& a : all_decompositions(2, 2)) {
    const auto ha = build_decomposed_hamiltonian(cfg, a, g);
    const auto ia = build_interaction(cfg, a, g);
    for (std::uint64_t k = 0; k < 20; ++k) {
      const WaveFunction v = random_state(h.domain(), 100 + k);
      CHECK(residual_norm(h(v), ha(v) + ia(v)) <= 1e-12 * std::max(1.0, h(v).norm()));
    }
  }

  // Drude: the coupling is exactly the dipole product
  SystemConfig drude = SystemConfig::neutral({AtomSpec::well1d(-5.0), AtomSpec::well1d(5.0)}, InteractionKind::dipole);
  drude.dipole_coupling = 0.3;
  const GridSpec gd = line(24, 6.0);
  const auto a0 = Decomposition::canonical(drude);
  const auto ia = build_interaction(drude, a0, gd);
  const auto& grid = ia.domain();
  const WaveFunction zz = WaveFunction::sample(grid, [](std::span<const Vec3> x) {
    return 0.3 * (x[0][0] + 5.0) * (x[1][0] - 5.0);
  });
  const WaveFunction one = WaveFunction::sample(grid, [](std::span<const Vec3>) { return 1.0; });
  CHECK(max_abs_difference(ia(one), zz) < 1e-12);
  const auto hd = build_full_hamiltonian(drude, gd);
  const auto had = build_decomposed_hamiltonian(drude, a0, gd);
  const WaveFunction v = random_state(grid, 9);
  CHECK(residual_norm(hd(v), had(v) + ia(v)) <= 1e-12 * hd(v).norm());
}

TEST_CASE("operators are linear and self-adjoint") {
  const GridSpec g = line(14, 6.0);
  const SystemConfig cfg = soft_pair(2.0);
  std::vector<LinearOperator> ops{build_full_hamiltonian(cfg, g)};
  for (const auto& a : atomic_decompositions(cfg)) {
    ops.push_back(build_decomposed_hamiltonian(cfg, a, g));
    ops.push_back(build_interaction(cfg, a, g));
  }
  for (const auto& op : ops) {
    CHECK(self_adjointness_defect(op, 50, 17) < 1e-10);
    const WaveFunction u = random_state(op.domain(), 1);
    const WaveFunction v = random_state(op.domain(), 2);
    const WaveFunction lhs = op(1.7 * u + (-0.4) * v);
    const WaveFunction rhs = 1.7 * op(u) + (-0.4) * op(v);
    CHECK(residual_norm(lhs, rhs) <= 1e-10 * std::max(1.0, rhs.norm()));
  }
}

TEST_CASE("permutations act as a group") {
  const GridSpec g = line(8, 2.0);
  const TensorGrid g3(g, 3);
  std::mt19937_64 rng(5);
  const WaveFunction psi = random_state(g3, 11);

  const Permutation id{0, 1, 2};
  CHECK(max_abs_difference(permute(psi, id), psi) == 0.0);

  const TensorGrid g1(g, 1);
  const WaveFunction f = random_state(g1, 1);
  const WaveFunction h = random_state(g1, 2);
  const TensorGrid g2(g, 2);
  const WaveFunction fg = tensor_product(f, h);
  CHECK(max_abs_difference(permute(fg, Permutation{1, 0}), tensor_product(h, f)) < 1e-15);

  // oracle: index arithmetic on the definition
  const auto perms = all_permutations(3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto& pi = perms[rng() % perms.size()];
    const auto& rho = perms[rng() % perms.size()];
    const WaveFunction lhs = permute(permute(psi, rho), pi);
    const WaveFunction rhs = permute(psi, compose(rho, pi));
    CHECK(max_abs_difference(lhs, rhs) == 0.0);

    const auto inv = inverse(pi);
    const WaveFunction t = permute(psi, pi);
    std::vector<std::size_t> loc(3), src(3);
    bool ok = true;
    for (std::size_t i = 0; i < g3.size(); ++i) {
      split_index(g3, i, loc);
      for (std::size_t k = 0; k < 3; ++k) src[k] = loc[inv[k]];
      ok = ok && t[i] == psi[join_index(g3, src)];
    }
    CHECK(ok);
    CHECK(t.norm() == doctest::Approx(psi.norm()).epsilon(1e-14));
  }
  CHECK_THROWS_AS(permute(psi, Permutation{0, 1}), PreconditionError);
}

TEST_CASE("antisymmetrizer") {
  const GridSpec g = line(10, 3.0);
  const TensorGrid g1(g, 1);
  WaveFunction f = random_state(g1, 1);
  WaveFunction h = random_state(g1, 2);
  project_out(h, f);
  h.normalize();
  CHECK(antisymmetrize(tensor_product(f, f)).norm() < 1e-15);
  const double n2 = std::pow(antisymmetrize(tensor_product(f, h)).norm(), 2);
  CHECK(n2 == doctest::Approx(0.5).epsilon(1e-12));

  const TensorGrid g3(g, 3);
  const WaveFunction psi = random_state(g3, 4);
  const WaveFunction q = antisymmetrize(psi);
  CHECK(max_abs_difference(antisymmetrize(q), q) < 1e-12);
  const WaveFunction phi = random_state(g3, 5);
  CHECK(inner(antisymmetrize(phi), psi) == doctest::Approx(inner(phi, q)).epsilon(1e-12));

  const TensorGrid g7(line(8, 1.0), 7);
  CHECK_THROWS_AS(antisymmetrize(WaveFunction(g7)), BudgetError);
}

TEST_CASE("Hamiltonian commutes with the antisymmetrizer") {
  SystemConfig cfg = soft_pair(2.0);
  cfg.atoms[1].charge_Z = 2;
  cfg.electron_count = 3;
  const GridSpec g = line(12, 5.0);
  const auto h = build_full_hamiltonian(cfg, g);
  for (std::uint64_t k = 0; k < 5; ++k) {
    const WaveFunction v = random_state(h.domain(), 40 + k);
    const WaveFunction lhs = h(antisymmetrize(v));
    const WaveFunction rhs = antisymmetrize(h(v));
    CHECK(residual_norm(lhs, rhs) <= 1e-10 * rhs.norm());
  }
}

TEST_CASE("relabelling decompositions conjugates H_a") {
  SystemConfig cfg = soft_pair(2.0);
  cfg.atoms[1].charge_Z = 2;
  cfg.electron_count = 3;
  const GridSpec g = line(10, 5.0);
  const auto decs = atomic_decompositions(cfg);
  REQUIRE(decs.size() == 3);
  const auto& a = decs.front();
  const auto ha = build_decomposed_hamiltonian(cfg, a, g);
  for (const auto& b : decs) {
    const auto fa = a.flattened();
    const auto fb = b.flattened();
    Permutation pi(fa.size());
    for (std::size_t k = 0; k < fa.size(); ++k) pi[fa[k]] = fb[k];
    const auto hb = build_decomposed_hamiltonian(cfg, b, g);
    const WaveFunction v = random_state(ha.domain(), 8);
    const WaveFunction lhs = hb(v);
    const WaveFunction rhs = permute(ha(permute(v, pi)), inverse(pi));
    CHECK(residual_norm(lhs, rhs) <= 1e-12 * lhs.norm());
    CHECK(relative_sign(b, a) == permutation_sign(pi));
  }
  CHECK(relative_sign(decs[1], decs[0]) * relative_sign(decs[0], decs[1]) == 1);
}

TEST_CASE("configuration errors") {
  SystemConfig mixed;
  mixed.atoms = {AtomSpec::well1d(0.0), AtomSpec::softcoulomb1d(1, 3.0)};
  mixed.electron_count = 2;
  CHECK_THROWS_AS(mixed.validate(), ConfigError);
  GridSpec g3 = line(8, 2.0);
  g3.dim_per_particle = 3;
  const SystemConfig one = SystemConfig::neutral({AtomSpec::well1d(0.0)}, InteractionKind::dipole);
  CHECK_THROWS_AS(build_full_hamiltonian(one, g3), ConfigError);
}
