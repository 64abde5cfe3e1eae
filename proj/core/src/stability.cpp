#include "vdwlab/stability.hpp"

#include "vdwlab/error.hpp"
#include "vdwlab/hamiltonian.hpp"
#include "vdwlab/symmetry.hpp"

#include <future>
#include <limits>

namespace vdw {

bool IonLadder::has(int charge) const {
  for (const auto& e : entries)
    if (e.charge == charge) return e.converged;
  return false;
}

bool IonLadder::complete() const {
  for (const auto& e : entries)
    if (!e.converged) return false;
  return true;
}

double IonLadder::energy(int charge) const {
  for (const auto& e : entries) {
    if (e.charge != charge) continue;
    if (!e.converged)
      throw IncompleteInputError("ladder entry n = " + std::to_string(charge) + " did not converge: " + e.failure);
    return e.energy;
  }
  throw IncompleteInputError("ladder has no entry n = " + std::to_string(charge) + " (n_max = " +
                             std::to_string(n_max) + ")");
}

IonLadder ion_ladder(const AtomSpec& atom, int n_max, const GridSpec& grid, const SolverSettings& settings) {
  atom.validate();
  if (n_max < 0) throw PreconditionError("ion ladder: n_max must be >= 0");
  IonLadder ladder;
  ladder.atom = atom;
  ladder.n_max = n_max;
  ladder.grid = grid;
  const bool coulomb = family_of(atom.kind) != InteractionKind::dipole;

  std::vector<std::future<LadderEntry>> jobs;
  for (int n = -n_max; n <= atom.charge_Z; ++n)
    jobs.push_back(std::async(std::launch::async, [&, n] {
      LadderEntry e;
      e.charge = n;
      e.electrons = atom.charge_Z - n;
      if (e.electrons == 0) return e;
      try {
        const LinearOperator h = build_ion_hamiltonian(atom, e.electrons, grid);
        SolverSettings s = settings;
        if (coulomb && e.electrons >= 2) {
          const TensorGrid g = h.domain();
          s.sector = [g](std::span<double> c) { antisymmetrize_in_place(g, c); };
        }
        const EigenResult r = ground_state(h, s);
        e.energy = r.ground_energy();
        e.residual = r.residual_norms.front();
        if (coulomb && e.energy > 0.0) {
          e.energy = 0.0;
          e.clamped = true;
        }
      } catch (const Error& err) {
        e.converged = false;
        e.energy = std::numeric_limits<double>::quiet_NaN();
        e.failure = err.what();
      }
      return e;
    }));
  for (auto& j : jobs) ladder.entries.push_back(j.get());
  return ladder;
}

PropertyEVerdict property_E_check(const std::vector<IonLadder>& ladders) {
  if (ladders.size() < 2) throw PreconditionError("property (E): at least two ladders required");
  PropertyEVerdict v;
  v.min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < ladders.size(); ++j)
    if (ladders[j].n_max < 1)
      throw IncompleteInputError("property (E): ladder " + std::to_string(j) + " has no negative ions");
  for (std::size_t i = 0; i < ladders.size(); ++i)
    for (std::size_t j = 0; j < ladders.size(); ++j) {
      if (i == j) continue;
      const int zi = ladders[i].atom.charge_Z;
      for (int m = 0; m < zi; ++m)
        for (int l = 1; m + l <= zi; ++l)
          for (int n = 0; n + l <= ladders[j].n_max; ++n) {
            const double lhs = ladders[i].energy(m) + ladders[j].energy(-n);
            const double rhs = ladders[i].energy(m + l) + ladders[j].energy(-n - l);
            ++v.checked;
            v.min_margin = std::min(v.min_margin, rhs - lhs);
            if (!(lhs < rhs) && v.holds) {
              v.holds = false;
              v.witness = PropertyEWitness{i, j, m, n, l, lhs, rhs};
            }
          }
    }
  return v;
}

PropertyEprimeVerdict property_Eprime_check(const std::vector<IonLadder>& ladders, std::size_t budget) {
  const std::size_t M = ladders.size();
  if (M == 0) throw PreconditionError("property (E'): no ladders");
  if (M > 4) throw BudgetError("property (E'): enumeration is limited to M <= 4 atoms", double(M), 4.0);
  double count = 1.0;
  for (const auto& l : ladders) count *= 2.0 * l.atom.charge_Z + 1.0;
  if (count > double(budget)) throw BudgetError("property (E'): too many charge vectors", count, double(budget));
  for (std::size_t i = 0; i < M; ++i)
    if (ladders[i].n_max < ladders[i].atom.charge_Z)
      throw IncompleteInputError("property (E'): ladder " + std::to_string(i) + " must reach n = -Z");

  double base = 0.0;
  for (const auto& l : ladders) base += l.energy(0);
  PropertyEprimeVerdict v;
  v.min_margin = std::numeric_limits<double>::infinity();
  std::vector<int> n(M);
  for (std::size_t i = 0; i < M; ++i) n[i] = -ladders[i].atom.charge_Z;
  while (true) {
    int sum = 0, abs_sum = 0;
    for (int c : n) {
      sum += c;
      abs_sum += std::abs(c);
    }
    if (sum == 0 && abs_sum > 0) {
      double e = 0.0;
      for (std::size_t i = 0; i < M; ++i) e += ladders[i].energy(n[i]);
      ++v.checked;
      v.min_margin = std::min(v.min_margin, e - base);
      if (!(base < e) && v.holds) {
        v.holds = false;
        v.witness = n;
      }
    }
    std::size_t k = 0;
    while (k < M && n[k] == ladders[k].atom.charge_Z) {
      n[k] = -ladders[k].atom.charge_Z;
      ++k;
    }
    if (k == M) break;
    ++n[k];
  }
  return v;
}

} // namespace vdw
