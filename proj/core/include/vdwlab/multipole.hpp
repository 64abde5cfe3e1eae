#pragma once

#include "vdwlab/grid.hpp"

#include <array>
#include <functional>
#include <vector>

namespace vdw {

/// Four-term Coulomb combination between electron l (displacement z_l from
/// nucleus i) and electron m (z_m from nucleus j), y = y_i - y_j:
/// 1/|y| - 1/|y + z_l| - 1/|y - z_m| + 1/|y + z_l - z_m|.
/// Evaluated without cancellation error for small z.
double coulomb_pair_combination(const Vec3& z_l, const Vec3& z_m, const Vec3& y);

/// z_l . z_m - 3 (z_l . u)(z_m . u), u = y / |y|.
double dipole_pair_term(const Vec3& z_l, const Vec3& z_m, const Vec3& y);

struct MultipoleReport {
  /// coefficients_by_order[k] multiplies |y|^-k in the large-|y| expansion.
  std::array<double, 5> coefficients_by_order{};
  /// dipole_pair_term at the same displacements (equals order 3).
  double dipole_term = 0.0;
  /// Admissible displacements satisfy |z| <= this radius (|y| / 3).
  double sup_norm_domain = 0.0;
  /// Relative rms misfit of the polynomial fit over the |y| ladder.
  double fit_residual = 0.0;
};

/// Fits the combination along the ladder |y| = t, t from 30 to 3e4 times the
/// displacement scale, in powers of 1/t.
MultipoleReport multipole_expand(const Vec3& z_l, const Vec3& z_m, const Vec3& y);

struct NewtonReport {
  double total_charge = 0.0;
  std::vector<double> potentials;  ///< ∫ rho(z) / |y + z| dz per evaluation point
  double max_relative_deviation = 0.0; ///< against Q / |y|
  std::vector<double> neutral_pair; ///< <rho ⊗ rho, combination> per evaluation point
  /// max |neutral_pair| / (Q^2 / |y|).
  double neutral_pair_relative = 0.0;
};

/// Newton's theorem by direct quadrature for a spherically symmetric density
/// rho(r) supported in [0, support_radius]. The neutral pair places one
/// normalized copy of the density (charge 1) around each of two unit nuclei.
NewtonReport newton_cancellation_check(const std::function<double(double)>& density, double support_radius,
                                       const std::vector<Vec3>& eval_points);

/// Same check for a tabulated shell decomposition: charge w_k sits on the
/// sphere of radius r_k (for grid densities w_k = 4 pi r_k^2 rho_k h). The
/// radial sums are exact; only the angular integrals are approximated.
NewtonReport newton_cancellation_check_shells(const std::vector<double>& radii, const std::vector<double>& weights,
                                              const std::vector<Vec3>& eval_points);

} // namespace vdw
