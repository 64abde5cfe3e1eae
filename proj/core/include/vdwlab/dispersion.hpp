#pragma once

#include "vdwlab/spectral.hpp"
#include "vdwlab/system.hpp"

#include <optional>
#include <vector>

namespace vdw {

/// f_v(z) = sum_{l in i, m in j} (z_l . z_m - 3 (z_l . v)(z_m . v)); on lines
/// the surrogate z_l z_m is used.
struct DipoleCoupling {
  Vec3 direction_v{0.0, 0.0, 1.0};
  std::size_t left_count = 1;  ///< electrons of atom i (first slots)
  std::size_t right_count = 1; ///< electrons of atom j
  int dim = 1;

  void validate() const;
  double operator()(std::span<const Vec3> z) const;
};

/// Multiplies psi by f_v. Coordinates are taken relative to each particle's
/// frame origin, i.e. electrons are measured from their own nucleus.
WaveFunction dipole_coupling_apply(const DipoleCoupling& coupling, const WaveFunction& psi);

struct DispersionResult {
  double sigma = 0.0;
  double resolvent_residual = 0.0;
  int resolvent_iterations = 0;
  /// max over tested directions of |sigma(v) - sigma(v0)|; zero for one direction.
  double direction_spread = 0.0;
  std::vector<double> sigma_by_direction;
  /// Ground energies E_i, E_j of the two atoms.
  double energy_i = 0.0;
  double energy_j = 0.0;
  /// Spectral gap of H_ij above its ground state (min of the atomic gaps).
  double pair_gap = 0.0;
  /// sigma from cut-off ground states minus sigma from exact ones, if requested.
  std::optional<double> cutoff_difference;
  bool passed = true;
};

struct SigmaOptions {
  /// Condition (D) threshold on the gap of H_ij above its ground state.
  double min_gap = 1e-6;
  /// Also evaluate sigma with states cut off at this R (smooth_cutoff).
  std::optional<double> cutoff_R;
};

/// Single-atom ground state (antisymmetric sector for several electrons) and
/// its gap, discretized around the atom's nucleus.
struct AtomState {
  EigenResult spectrum; ///< two lowest levels
  LinearOperator hamiltonian;
  SectorProjector sector;
  double gap = 0.0;
};

AtomState atom_ground_state(const AtomSpec& atom, const GridSpec& grid, const SolverSettings& settings);

/// sigma_ij(v) = <f phi_i⊗phi_j, R^⊥ f phi_i⊗phi_j> with R^⊥ the projected
/// resolvent of H_i ⊗ 1 + 1 ⊗ H_j at E_i + E_j.
DispersionResult sigma_coefficient(const AtomSpec& atom_i, const AtomSpec& atom_j, const Vec3& v,
                                   const GridSpec& grid, const SolverSettings& settings,
                                   const SigmaOptions& options = {});

/// sigma for every direction; passes iff the spread is at most 10x the solver tolerance.
DispersionResult direction_invariance_check(const AtomSpec& atom_i, const AtomSpec& atom_j,
                                            const std::vector<Vec3>& directions, const GridSpec& grid,
                                            const SolverSettings& settings);

} // namespace vdw
