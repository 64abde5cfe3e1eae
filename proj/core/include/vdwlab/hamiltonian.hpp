#pragma once

#include "vdwlab/grid.hpp"
#include "vdwlab/linear_operator.hpp"
#include "vdwlab/system.hpp"

#include <functional>
#include <vector>

namespace vdw {

/// Multiplicative terms of a grid Hamiltonian. Positions handed to the
/// callables are absolute; on radial grids component 0 is the radius.
struct PotentialTerms {
  struct Pair {
    std::size_t p = 0;
    std::size_t q = 0;
    std::function<double(const Vec3&, const Vec3&)> w;
  };

  /// Indexed by particle; an empty function contributes nothing.
  std::vector<std::function<double(const Vec3&)>> one_body;
  std::vector<Pair> pairs;
  double constant = 0.0;
};

/// Diagonal of the multiplication operator described by `terms`.
std::vector<double> assemble_potential(const TensorGrid& grid, const PotentialTerms& terms);

/// -Laplacian (second-order central differences, Dirichlet walls), added
/// with weight `scale` into `out`.
void add_kinetic(const TensorGrid& grid, std::span<const double> in, std::span<double> out,
                 double scale = 1.0);

/// -Δ + V for a tabulated potential.
LinearOperator grid_hamiltonian(const TensorGrid& grid, std::vector<double> potential,
                                std::string descriptor);

/// Grid of the full N-electron system. Drude electrons live in frames
/// centred on their canonically assigned nucleus; all other models share one
/// box centred at the coordinate origin.
TensorGrid system_grid(const SystemConfig& cfg, const GridSpec& grid);

/// Grid of cluster i of decomposition a (its electrons, in increasing order).
TensorGrid cluster_grid(const SystemConfig& cfg, const Decomposition& a, std::size_t i,
                        const GridSpec& grid);

/// H = sum_i (-Δ_i - sum_j v_Zj(x_i - y_j)) + sum_{i<j} w(x_i - x_j) + nuclear
/// repulsion. Drude systems are defined relative to the canonical atomic
/// decomposition: H = H_a0 + λ-coupling.
LinearOperator build_full_hamiltonian(const SystemConfig& cfg, const GridSpec& grid);

/// H_{A_i}: kinetic + attraction to y_i + intra-cluster repulsion, acting on
/// the cluster's own electrons. An empty cluster yields the zero operator on
/// the one-point space.
LinearOperator build_cluster_hamiltonian(const SystemConfig& cfg, const Decomposition& a,
                                         std::size_t i, const GridSpec& grid);

/// H_a = sum_i H_{A_i} on the full grid.
LinearOperator build_decomposed_hamiltonian(const SystemConfig& cfg, const Decomposition& a,
                                            const GridSpec& grid);

/// I_a = H - H_a as a multiplication operator on the full grid.
LinearOperator build_interaction(const SystemConfig& cfg, const Decomposition& a,
                                 const GridSpec& grid);

/// Multiplication operator for the interaction between clusters k and l only.
LinearOperator build_pair_interaction(const SystemConfig& cfg, const Decomposition& a,
                                      std::size_t k, std::size_t l, const GridSpec& grid);

/// Hamiltonian of atom `atom` carrying `electrons` electrons, discretized in a
/// frame centred on its nucleus. `electrons` = Z - n gives the ion H_{i,n}.
LinearOperator build_ion_hamiltonian(const AtomSpec& atom, int electrons, const GridSpec& grid);

/// Interaction potential v used by the Coulomb-type families (1/r or
/// 1/sqrt(r^2 + a^2)); exposed for quadrature checks.
double pair_potential(InteractionKind kind, double r, double softening, double spacing);

} // namespace vdw
