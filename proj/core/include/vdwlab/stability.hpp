#pragma once

#include "vdwlab/spectral.hpp"
#include "vdwlab/system.hpp"

#include <optional>
#include <vector>

namespace vdw {

struct LadderEntry {
  int charge = 0; ///< n: the ion carries Z - n electrons
  int electrons = 0;
  double energy = 0.0;
  double residual = 0.0;
  bool converged = true;
  /// The sector ground energy was positive; the ion energy is the bottom of
  /// the spectrum including the zero branch, i.e. 0.
  bool clamped = false;
  std::string failure;
};

/// E_{i,n} for n = -n_max .. Z on one grid.
struct IonLadder {
  AtomSpec atom;
  int n_max = 0;
  GridSpec grid;
  std::vector<LadderEntry> entries; ///< ascending charge
  bool complete() const;
  bool has(int charge) const;
  /// Throws IncompleteInputError for missing or unconverged entries.
  double energy(int charge) const;
};

/// Coulomb-type ions with two or more electrons are solved in the antisymmetric
/// sector. Failed entries are kept and flagged.
IonLadder ion_ladder(const AtomSpec& atom, int n_max, const GridSpec& grid, const SolverSettings& settings);

/// E_{i,m} + E_{j,-n} < E_{i,m+l} + E_{j,-n-l}.
struct PropertyEWitness {
  std::size_t i = 0;
  std::size_t j = 0;
  int m = 0;
  int n = 0;
  int l = 0;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct PropertyEVerdict {
  bool holds = true;
  std::optional<PropertyEWitness> witness;
  /// Smallest rhs - lhs over the checked inequalities.
  double min_margin = 0.0;
  std::size_t checked = 0;
};

/// Checks every i != j, m, l >= 1 with m + l <= Z_i and n >= 0 with -n - l
/// inside ladder j.
PropertyEVerdict property_E_check(const std::vector<IonLadder>& ladders);

struct PropertyEprimeVerdict {
  bool holds = true;
  std::optional<std::vector<int>> witness;
  double min_margin = 0.0;
  std::size_t checked = 0;
};

/// sum_i E_{i,0} < sum_i E_{i,n_i} over all charge vectors with sum 0, not all
/// zero, -Z_i <= n_i <= Z_i. Refuses M > 4 or more than `budget` vectors.
PropertyEprimeVerdict property_Eprime_check(const std::vector<IonLadder>& ladders, std::size_t budget = 1'000'000);

} // namespace vdw
