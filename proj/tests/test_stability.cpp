#include <doctest.h>

#include "vdwlab/error.hpp"
#include "vdwlab/hamiltonian.hpp"
#include "vdwlab/stability.hpp"
#include "vdwlab/symmetry.hpp"

#include <cmath>

using namespace vdw;

namespace {

GridSpec radial(std::size_t n, double L) {
  GridSpec g;
  g.geometry = Geometry::radial;
  g.points_per_axis = n;
  g.half_width = L;
  return g;
}

GridSpec line(std::size_t n, double L) {
  GridSpec g;
  g.points_per_axis = n;
  g.half_width = L;
  return g;
}

IonLadder synthetic(int Z, std::vector<std::pair<int, double>> table) {
  IonLadder l;
  l.atom = AtomSpec::softcoulomb1d(Z, 0.0);
  for (const auto& [n, e] : table) {
    LadderEntry x;
    x.charge = n;
    x.electrons = Z - n;
    x.energy = e;
    l.entries.push_back(x);
    l.n_max = std::max(l.n_max, -n);
  }
  return l;
}

} // namespace

TEST_CASE("hydrogen ladder") {
  SolverSettings s;
  const IonLadder fine = ion_ladder(AtomSpec::coulomb3d(1), 0, radial(2000, 40.0), s);
  CHECK(fine.energy(0) == doctest::Approx(-0.25).epsilon(4e-3));
  CHECK(std::abs(fine.energy(0) + 0.25) <= 1e-3);
  CHECK(fine.energy(1) == 0.0);

  const IonLadder coarse = ion_ladder(AtomSpec::coulomb3d(1), 3, radial(16, 20.0), s);
  CHECK(coarse.complete());
  REQUIRE(coarse.entries.size() == 5);
  for (const auto& e : coarse.entries) CHECK(e.energy <= 0.0);
  CHECK(coarse.energy(1) == 0.0);
  CHECK(coarse.energy(0) < coarse.energy(1));

  const PropertyEVerdict pair = property_E_check({coarse, coarse});
  CHECK(pair.holds);
  // m = 0, l = 1, n in {0, 1, 2}, both orderings of the pair
  CHECK(pair.checked == 6);
  CHECK(pair.min_margin > 0.0);

  const PropertyEprimeVerdict triple = property_Eprime_check({coarse, coarse, coarse});
  CHECK(triple.holds);
  // nonzero vectors in {-1, 0, 1}^3 with zero sum
  CHECK(triple.checked == 6);
}

TEST_CASE("soft-Coulomb helium-like ladder") {
  SolverSettings s;
  const GridSpec g = line(40, 10.0);
  const IonLadder l = ion_ladder(AtomSpec::softcoulomb1d(2, 0.0), 0, g, s);
  CHECK(l.energy(0) < l.energy(1));
  CHECK(l.energy(1) < l.energy(2));
  CHECK(l.energy(2) == 0.0);

  // antisymmetric dense oracle for the neutral atom
  SolverSettings dense;
  dense.method = EigenMethod::dense_oracle;
  const LinearOperator h = build_ion_hamiltonian(AtomSpec::softcoulomb1d(2, 0.0), 2, g);
  const TensorGrid tg = h.domain();
  dense.sector = [tg](std::span<double> c) { antisymmetrize_in_place(tg, c); };
  CHECK(std::abs(ground_state(h, dense).ground_energy() - l.energy(0)) <= 1e-8);
}

TEST_CASE("Property (E) on a Z = (2, 2) desk model is reported") {
  SolverSettings s;
  const IonLadder l = ion_ladder(AtomSpec::softcoulomb1d(2, 0.0), 2, line(14, 8.0), s);
  CHECK(l.complete());
  const PropertyEVerdict v = property_E_check({l, l});
  CHECK(v.checked > 0);
  CHECK(std::isfinite(v.min_margin));
  if (v.holds) CHECK(property_Eprime_check({l, l}).holds);
}

TEST_CASE("Property (E) negative control and input errors") {
  // transferring one electron from atom 0 to atom 1 gains energy
  const IonLadder a = synthetic(1, {{-1, -0.1}, {0, -0.25}, {1, 0.0}});
  const IonLadder b = synthetic(1, {{-1, -0.6}, {0, -0.25}, {1, 0.0}});
  const PropertyEVerdict v = property_E_check({a, b});
  CHECK_FALSE(v.holds);
  REQUIRE(v.witness.has_value());
  CHECK(v.witness->i == 0);
  CHECK(v.witness->j == 1);
  CHECK(v.witness->lhs >= v.witness->rhs);
  CHECK_FALSE(property_Eprime_check({a, b}).holds);

  const IonLadder short_ladder = synthetic(1, {{0, -0.25}, {1, 0.0}});
  CHECK_THROWS_AS(property_E_check({a, short_ladder}), IncompleteInputError);
  CHECK_THROWS_AS(property_Eprime_check({a, short_ladder}), IncompleteInputError);
  IonLadder flagged = a;
  flagged.entries[0].converged = false;
  CHECK_THROWS_AS(property_E_check({flagged, a}), IncompleteInputError);
  CHECK_THROWS_AS(property_Eprime_check({a, a, a, a, a}), BudgetError);

  // induction: (E) on the passing synthetic pair implies (E')
  const IonLadder c = synthetic(1, {{-1, -0.26}, {0, -0.25}, {1, 0.0}});
  REQUIRE(property_E_check({c, c}).holds);
  CHECK(property_Eprime_check({c, c, c, c}).holds);
}
