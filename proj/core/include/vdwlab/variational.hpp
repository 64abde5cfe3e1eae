#pragma once

#include "vdwlab/feshbach.hpp"

#include <optional>
#include <vector>

namespace vdw {

/// Terms of <psi~, (H - E(inf)) psi~> with psi~ = Psi_b - c, H = H_b + I_b.
struct QuotientTerms {
  double diagonal = 0.0;      ///< <Psi_b, (H - E(inf)) Psi_b>
  double leading = 0.0;       ///< -2 <I Psi_b, c>
  double product_cross = 0.0; ///< -2 <(H_b - E(inf)) Psi_b, c>, zero up to the cutoff defect
  double D1 = 0.0;            ///< <c, (H_b - E(inf)) c>
  double D2 = 0.0;            ///< <c, I c>
  double sum() const { return diagonal + leading + product_cross + D1 + D2; }
};

struct TestFunctionResult {
  Decomposition decomposition;
  WaveFunction state; ///< psi~ (not normalized)
  WaveFunction base_state;
  double energy_infinity = 0.0;
  double rayleigh_quotient = 0.0;
  /// Rayleigh quotient of the bare product Psi_b.
  double bare_quotient = 0.0;
  double norm_squared = 0.0;
  /// (k, l, ||chi R_perp I Psi_b||) per atom pair.
  struct PairCorrection {
    std::size_t k = 0;
    std::size_t l = 0;
    double norm = 0.0;
    double resolvent_residual = 0.0;
    /// max |chi - 1| on the support of Psi_k (x) Psi_l.
    double cutoff_support_defect = 0.0;
  };
  std::vector<PairCorrection> correction_norms;
  double orthogonality_defect = 0.0;
  QuotientTerms terms;
  /// |sum of terms / ||psi~||^2 - direct quotient|.
  double decomposition_defect = 0.0;
  /// Quotient of Q_N psi~ for Coulomb-type systems with two or more electrons.
  std::optional<double> antisymmetrized_quotient;
};

/// psi~_b = Psi_b - sum_{k<l} chi_{kl} R_perp_{kl} I_{kl} Psi_b, with chi_{kl} the
/// cutoff of scale 2R around the nuclei of clusters k and l.
TestFunctionResult build_test_function(const SystemConfig& cfg, const Decomposition& b, const GridSpec& grid,
                                       const SolverSettings& settings, const CutoffOptions& cutoff = {});

/// <psi~, (H - E(inf)) psi~> / ||psi~||^2 for the canonical atomic decomposition.
TestFunctionResult rayleigh_upper_bound(const SystemConfig& cfg, const GridSpec& grid, const SolverSettings& settings,
                                        const CutoffOptions& cutoff = {});

} // namespace vdw
