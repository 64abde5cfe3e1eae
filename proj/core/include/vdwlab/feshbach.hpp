#pragma once

#include "vdwlab/cutoff.hpp"
#include "vdwlab/spectral.hpp"
#include "vdwlab/system.hpp"

#include <optional>
#include <vector>

namespace vdw {

/// Ground state of one cluster Hamiltonian H_{A_i} on its own grid.
struct ClusterState {
  double energy = 0.0;
  WaveFunction state;    ///< exact (grid) ground state phi_i, sign fixed
  SectorProjector sector; ///< antisymmetrizer for two or more Coulomb electrons
};

/// Lowest state of H_{A_i}; several electrons use the antisymmetric sector.
/// The eigenvector sign is fixed so that its first dominant coefficient is positive.
ClusterState cluster_ground_state(const SystemConfig& cfg, const Decomposition& a, std::size_t i,
                                  const GridSpec& grid, const SolverSettings& settings);

struct CutoffState {
  Decomposition decomposition;
  /// Psi_a on the full system grid, unit norm.
  WaveFunction base_state;
  /// psi_{A_i} per cluster on the cluster grids.
  std::vector<WaveFunction> cluster_states;
  std::vector<double> cluster_energies;
  double cutoff_radius = 0.0;
  bool renormalized = true;
  /// ||psi_i - phi_i|| per cluster.
  std::vector<double> cutoff_defects;
  /// ||(H_{A_i} - E_i) psi_{A_i}|| per cluster.
  std::vector<double> eigen_defects;
  /// ||(H_a - E(inf)) Psi_a||.
  double product_defect = 0.0;
  double energy_infinity = 0.0;
};

struct CutoffOptions {
  /// Cutoff scale R; defaults to the nuclear separation.
  std::optional<double> radius;
};

/// Psi_a = prod_i psi_{A_i}, psi = phi chi_R / ||phi chi_R|| around each nucleus.
/// Throws PreconditionError when the cutoff keeps less than half the norm.
CutoffState build_cutoff_product(const SystemConfig& cfg, const Decomposition& a, const GridSpec& grid,
                                 const SolverSettings& settings, const CutoffOptions& options = {});

struct SignEntry {
  Decomposition decomposition;
  int sign = 1;
};

struct Projection {
  /// Unit vector spanning ran Pi (Q_N Psi_a / ||Q_N Psi_a||).
  WaveFunction phi;
  std::vector<SignEntry> sign_table;
  double qn_norm_squared = 0.0;
  /// ||Q_N Psi_a - (1/|A|) sum_b sgn(b,a) Psi_b||.
  double expansion_defect = 0.0;
  /// 1 - |<phi from a, phi from a second decomposition>|; 0 with one decomposition.
  double choice_defect = 0.0;
  /// Largest |<Psi_a, Psi_b>| over a != b (disjoint supports give 0).
  double overlap_defect = 0.0;
  CutoffState cutoff;
  /// Antisymmetrizer on the system grid (empty for Drude systems).
  SectorProjector sector;
};

/// Builds Pi. Drude systems have distinguishable electrons and use Psi_a0.
Projection build_projection(const SystemConfig& cfg, const GridSpec& grid, const SolverSettings& settings,
                            const CutoffOptions& options = {});

struct FeshbachValue {
  double value = 0.0;
  double diagonal = 0.0; ///< <Phi, H Phi>
  double V = 0.0;        ///< <H Phi, R^⊥(lambda) Pi^⊥ H Phi>
  double resolvent_residual = 0.0;
  int iterations = 0;
  WaveFunction correction; ///< R^⊥(lambda) Pi^⊥ H Phi
};

/// F_Pi(lambda) = <Phi, H Phi> - <H Phi, (Pi^⊥ H Pi^⊥ - lambda)^-1 Pi^⊥ H Phi>.
FeshbachValue feshbach_value(const LinearOperator& H, const WaveFunction& phi, double lambda,
                             const SolverSettings& settings);

struct FeshbachResult {
  double energy = 0.0;
  double interaction_energy = 0.0;
  double energy_infinity = 0.0;
  /// Bottom of the projected complement minus E.
  double gap_lower_bound = 0.0;
  std::vector<double> iterations;
  double residual = 0.0;
  bool used_bisection = false;
  bool valid = false;
  WaveFunction ground_state;
};

struct FixedPointOptions {
  double tolerance = 1e-11;
  int max_iterations = 200;
};

/// Picard iteration lambda <- F_Pi(lambda) from <Phi, H Phi>, safeguarded by
/// bisection on the bracket [F(lambda_0), lambda_0].
FeshbachResult solve_fixed_point(const LinearOperator& H, const WaveFunction& phi, double energy_infinity,
                                 const SolverSettings& settings, const FixedPointOptions& options = {});

/// Convenience: Pi from build_projection and the full Hamiltonian.
FeshbachResult feshbach_energy(const SystemConfig& cfg, const GridSpec& grid, const SolverSettings& settings,
                               const FixedPointOptions& options = {}, const CutoffOptions& cutoff = {});

struct DiagonalEnergyReport {
  double deviation = 0.0;
  bool newton_applicable = false;
  /// Only set when Newton's theorem applies to the model.
  std::optional<bool> passed;
};

/// |<Phi, H Phi> - E(inf)| on the grid model. One-dimensional models get no verdict.
DiagonalEnergyReport diagonal_energy_check(const SystemConfig& cfg, const GridSpec& grid,
                                           const SolverSettings& settings, const CutoffOptions& cutoff = {});

/// Two identical coulomb3d atoms at separation R in the radial surrogate: the
/// intra-atomic part is evaluated on the radial grid, the inter-atomic part
/// <Psi_a, I_a Psi_a> by quadrature of the cut-off densities.
DiagonalEnergyReport diagonal_energy_check_radial(const AtomSpec& atom, double separation, const GridSpec& grid,
                                                  const SolverSettings& settings, double threshold = 1e-8);

} // namespace vdw
