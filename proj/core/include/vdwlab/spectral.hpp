#pragma once

#include "vdwlab/linear_operator.hpp"
#include "vdwlab/wavefunction.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace vdw {

enum class EigenMethod { automatic, dense_oracle, iterative };

std::string to_string(EigenMethod m);

/// Orthogonal projector applied in place to raw coefficients (for example
/// the antisymmetrizer); must commute with the operator it is used with.
using SectorProjector = std::function<void(std::span<double>)>;

/// Settings shared by the eigensolvers and the projected resolvent.
struct SolverSettings {
  /// Eigen solves: absolute residual ||Av - λv||. Resolvent: relative residual.
  double tolerance = 1e-9;
  /// Budget of operator applications.
  int max_iterations = 50000;
  /// Energy λ for resolvent solves.
  double shift = 0.0;
  std::uint64_t seed = 20240611;
  std::size_t krylov_dimension = 60;
  /// Sizes up to this use the dense oracle when method is automatic.
  std::size_t dense_cutoff = 1024;
  EigenMethod method = EigenMethod::automatic;
  SectorProjector sector;

  /// tolerance in (0, 1e-4], max_iterations >= 1.
  void validate() const;
};

using ResolventSettings = SolverSettings;

struct EigenResult {
  std::vector<double> eigenvalues;
  std::vector<WaveFunction> eigenvectors;
  std::vector<double> residual_norms;
  EigenMethod method = EigenMethod::automatic;
  std::size_t operator_applications = 0;

  double ground_energy() const { return eigenvalues.front(); }
  const WaveFunction& ground_vector() const { return eigenvectors.front(); }
};

/// Lowest eigenpair. Dense oracle for sizes up to dense_cutoff, otherwise
/// thick-restart Lanczos with full reorthogonalization.
EigenResult ground_state(const LinearOperator& op, const SolverSettings& settings);

/// k lowest eigenpairs. Iterative runs deflate converged vectors one at a
/// time; `deflate` lists extra orthonormal vectors whose span is excluded.
EigenResult low_spectrum(const LinearOperator& op, std::size_t k, const SolverSettings& settings,
                         std::span<const WaveFunction> deflate = {});

/// Dense reference diagonalization (LAPACK dsyevr) of the k lowest pairs.
EigenResult dense_spectrum(const LinearOperator& op, std::size_t k, const SolverSettings& settings,
                           std::span<const WaveFunction> deflate = {});

struct ResolventResult {
  WaveFunction solution;
  double relative_residual = 0.0;
  int iterations = 0;
};

/// Solves P(A - λ)P x = b on the orthogonal complement of `projector_state`
/// by conjugate gradients, re-projecting every iterate. Throws GapError on
/// negative curvature (λ not below the projected spectrum).
ResolventResult projected_resolvent_solve(const LinearOperator& op,
                                          const WaveFunction& projector_state, double lambda,
                                          const WaveFunction& b, const SolverSettings& settings);

/// Convenience wrapper returning only the solution.
WaveFunction projected_resolvent_apply(const LinearOperator& op,
                                       const WaveFunction& projector_state, double lambda,
                                       const WaveFunction& b, const SolverSettings& settings);

/// Lowest eigenvalue of P A P restricted to ran P, P = 1 - |phi><phi|.
double projected_ground_energy(const LinearOperator& op, const WaveFunction& phi,
                               const SolverSettings& settings);

/// Largest |<u, Av> - <Au, v>| / (|<u,Av>| + tiny) over random pairs.
double self_adjointness_defect(const LinearOperator& op, std::size_t pairs, std::uint64_t seed);

/// Random unit vector on the operator's grid (deterministic for a seed).
WaveFunction random_state(const TensorGrid& grid, std::uint64_t seed);

} // namespace vdw
