#include "vdwlab/feshbach.hpp"

#include "vdwlab/error.hpp"
#include "vdwlab/hamiltonian.hpp"
#include "vdwlab/multipole.hpp"
#include "vdwlab/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace vdw {

namespace {

bool coulomb_family(const SystemConfig& cfg) { return cfg.pair_interaction != InteractionKind::dipole; }

void fix_sign(WaveFunction& w) {
  const auto c = w.coefficients();
  double top = 0.0;
  for (double v : c) top = std::max(top, std::abs(v));
  for (double v : c)
    if (std::abs(v) > 0.5 * top) {
      if (v < 0.0) w *= -1.0;
      return;
    }
}

double nucleus_distance(const Vec3& x, const Vec3& y, bool radial) {
  if (radial) return x[0];
  return std::sqrt((x[0] - y[0]) * (x[0] - y[0]) + (x[1] - y[1]) * (x[1] - y[1]) + (x[2] - y[2]) * (x[2] - y[2]));
}

// Moves the electrons of a cluster-ordered product into their slots.
WaveFunction place_clusters(const WaveFunction& ordered, const Decomposition& a) {
  const Permutation f = a.flattened();
  bool identity = true;
  for (std::size_t k = 0; k < f.size(); ++k) identity = identity && f[k] == k;
  if (identity) return ordered;
  // permute() moves slot k to slot pi^-1(k)
  return permute(ordered, inverse(f));
}

} // namespace

ClusterState cluster_ground_state(const SystemConfig& cfg, const Decomposition& a, std::size_t i,
                                  const GridSpec& grid, const SolverSettings& settings) {
  const LinearOperator h = build_cluster_hamiltonian(cfg, a, i, grid);
  ClusterState cs;
  if (h.domain().particles() == 0) {
    cs.state = WaveFunction(h.domain(), {1.0});
    return cs;
  }
  SolverSettings s = settings;
  if (coulomb_family(cfg) && h.domain().particles() > 1) {
    const TensorGrid g = h.domain();
    cs.sector = [g](std::span<double> c) { antisymmetrize_in_place(g, c); };
  }
  s.sector = cs.sector;
  const EigenResult r = ground_state(h, s);
  cs.energy = r.ground_energy();
  cs.state = r.ground_vector();
  fix_sign(cs.state);
  return cs;
}

CutoffState build_cutoff_product(const SystemConfig& cfg, const Decomposition& a, const GridSpec& grid,
                                 const SolverSettings& settings, const CutoffOptions& options) {
  cfg.validate();
  a.validate(static_cast<std::size_t>(cfg.electron_count), cfg.atoms.size());
  if (!a.is_atomic(cfg)) throw PreconditionError("cutoff product: decomposition is not atomic");
  if (!coulomb_family(cfg) && !(a == Decomposition::canonical(cfg)))
    throw PreconditionError("cutoff product: Drude electrons are tied to the canonical decomposition");
  const double R = options.radius.value_or(cfg.separation_R());
  if (!std::isfinite(R)) throw PreconditionError("cutoff product: a single atom needs an explicit cutoff radius");
  const SmoothCutoff chi(R);
  const bool radial = grid.geometry == Geometry::radial;

  CutoffState st;
  st.decomposition = a;
  st.cutoff_radius = R;
  WaveFunction product(TensorGrid(grid, 0), {1.0});
  for (std::size_t i = 0; i < cfg.atoms.size(); ++i) {
    const ClusterState cs = cluster_ground_state(cfg, a, i, grid, settings);
    const LinearOperator h = build_cluster_hamiltonian(cfg, a, i, grid);
    const Vec3 y = cfg.atoms[i].position;
    WaveFunction psi = cs.state;
    if (h.domain().particles() > 0) {
      const WaveFunction mask = WaveFunction::sample(h.domain(), [&](std::span<const Vec3> x) {
        double v = 1.0;
        for (const Vec3& p : x) v *= chi(nucleus_distance(p, y, radial));
        return v;
      });
      psi = pointwise_product(cs.state, mask);
      if (psi.norm() < 0.5)
        throw PreconditionError("cutoff product: cutoff keeps less than half the norm, R too small");
      psi.normalize();
    }
    st.cutoff_defects.push_back((psi - cs.state).norm());
    st.eigen_defects.push_back((h(psi) - cs.energy * psi).norm());
    st.cluster_energies.push_back(cs.energy);
    st.energy_infinity += cs.energy;
    product = tensor_product(product, psi);
    st.cluster_states.push_back(std::move(psi));
  }
  WaveFunction placed = place_clusters(product, a);
  st.base_state = WaveFunction(system_grid(cfg, grid), std::vector<double>(placed.coefficients().begin(),
                                                                           placed.coefficients().end()));
  const LinearOperator ha = build_decomposed_hamiltonian(cfg, a, grid);
  st.product_defect = (ha(st.base_state) - st.energy_infinity * st.base_state).norm();
  return st;
}

Projection build_projection(const SystemConfig& cfg, const GridSpec& grid, const SolverSettings& settings,
                            const CutoffOptions& options) {
  Projection p;
  const auto decs = atomic_decompositions(cfg);
  p.cutoff = build_cutoff_product(cfg, decs.front(), grid, settings, options);
  const WaveFunction& psi_a = p.cutoff.base_state;
  if (!coulomb_family(cfg) || cfg.electron_count < 2) {
    p.phi = psi_a;
    p.sign_table = {{decs.front(), 1}};
    p.qn_norm_squared = 1.0;
    return p;
  }
  const TensorGrid g = psi_a.grid();
  p.sector = [g](std::span<double> c) { antisymmetrize_in_place(g, c); };
  WaveFunction q = antisymmetrize(psi_a);
  p.qn_norm_squared = std::pow(q.norm(), 2);
  if (!(q.norm() > 1e-12)) throw PreconditionError("projection: Q_N Psi_a vanishes");

  WaveFunction expansion(g);
  const double inv_count = 1.0 / static_cast<double>(decs.size());
  std::vector<WaveFunction> others;
  for (const auto& b : decs) {
    const int sgn = relative_sign(b, decs.front());
    p.sign_table.push_back({b, sgn});
    CutoffState sb = b == decs.front() ? p.cutoff : build_cutoff_product(cfg, b, grid, settings, options);
    expansion.axpy(inv_count * sgn, sb.base_state);
    if (!(b == decs.front()))
      p.overlap_defect = std::max(p.overlap_defect, std::abs(inner(psi_a, sb.base_state)));
    others.push_back(std::move(sb.base_state));
  }
  p.expansion_defect = (q - expansion).norm();
  p.phi = q;
  p.phi.normalize();
  if (decs.size() > 1) {
    WaveFunction alt = antisymmetrize(others[1]);
    alt.normalize();
    p.choice_defect = 1.0 - std::abs(inner(p.phi, alt));
  }
  return p;
}

FeshbachValue feshbach_value(const LinearOperator& H, const WaveFunction& phi, double lambda,
                             const SolverSettings& settings) {
  FeshbachValue fv;
  const WaveFunction hphi = H(phi);
  fv.diagonal = inner(phi, hphi);
  WaveFunction b = hphi;
  project_out(b, phi);
  if (b.norm() <= 1e-14 * std::max(1.0, hphi.norm())) {
    fv.value = fv.diagonal;
    fv.correction = WaveFunction(phi.grid());
    return fv;
  }
  const auto r = projected_resolvent_solve(H, phi, lambda, b, settings);
  fv.V = inner(b, r.solution);
  fv.value = fv.diagonal - fv.V;
  fv.resolvent_residual = r.relative_residual;
  fv.iterations = r.iterations;
  fv.correction = r.solution;
  return fv;
}

FeshbachResult solve_fixed_point(const LinearOperator& H, const WaveFunction& phi_in, double energy_infinity,
                                 const SolverSettings& settings, const FixedPointOptions& options) {
  WaveFunction phi = phi_in;
  phi.normalize();
  FeshbachResult res;
  res.energy_infinity = energy_infinity;

  double lambda = H.expectation(phi);
  res.iterations.push_back(lambda);
  FeshbachValue fv = feshbach_value(H, phi, lambda, settings);
  // F decreases below the projected spectrum, so the root of F(l) - l lies
  // in [F(lambda_0), lambda_0]
  double lo = fv.value, hi = lambda;
  double previous = std::abs(fv.value - lambda);
  double g = fv.value - lambda;
  bool bisect = false;
  for (int it = 0; std::abs(g) > options.tolerance; ++it) {
    if (it >= options.max_iterations)
      throw ConvergenceError("fixed point: iteration budget exhausted", std::abs(g));
    double next = fv.value;
    if (!bisect && it > 0 && std::abs(g) > 0.9 * previous) bisect = true;
    if (bisect || next < lo || next > hi) {
      bisect = true;
      next = 0.5 * (lo + hi);
    }
    previous = std::abs(g);
    lambda = next;
    res.iterations.push_back(lambda);
    fv = feshbach_value(H, phi, lambda, settings);
    g = fv.value - lambda;
    if (g > 0.0) lo = std::max(lo, lambda);
    else hi = std::min(hi, lambda);
  }
  res.used_bisection = bisect;
  res.residual = std::abs(g);
  res.energy = lambda;
  res.interaction_energy = lambda - energy_infinity;

  res.ground_state = phi - fv.correction;
  res.ground_state.normalize();

  // Ritz error is quadratic in the residual, so a looser solve suffices here
  SolverSettings gap_settings = settings;
  gap_settings.tolerance = std::max(settings.tolerance, 1e-7);
  const double bottom = projected_ground_energy(H, phi, gap_settings);
  res.gap_lower_bound = bottom - res.energy;
  res.valid = res.gap_lower_bound > 0.0;
  return res;
}

FeshbachResult feshbach_energy(const SystemConfig& cfg, const GridSpec& grid, const SolverSettings& settings,
                               const FixedPointOptions& options, const CutoffOptions& cutoff) {
  const Projection p = build_projection(cfg, grid, settings, cutoff);
  SolverSettings s = settings;
  s.sector = p.sector;
  return solve_fixed_point(build_full_hamiltonian(cfg, grid), p.phi, p.cutoff.energy_infinity, s, options);
}

DiagonalEnergyReport diagonal_energy_check(const SystemConfig& cfg, const GridSpec& grid,
                                           const SolverSettings& settings, const CutoffOptions& cutoff) {
  const Projection p = build_projection(cfg, grid, settings, cutoff);
  const LinearOperator h = build_full_hamiltonian(cfg, grid);
  DiagonalEnergyReport rep;
  rep.deviation = std::abs(h.expectation(p.phi) - p.cutoff.energy_infinity);
  rep.newton_applicable = grid.dim_per_particle == 3 && cfg.pair_interaction == InteractionKind::coulomb;
  if (rep.newton_applicable) rep.passed = rep.deviation <= 1e-6;
  return rep;
}

DiagonalEnergyReport diagonal_energy_check_radial(const AtomSpec& atom, double separation, const GridSpec& grid,
                                                  const SolverSettings& settings, double threshold) {
  if (atom.kind != PotentialKind::coulomb3d || atom.charge_Z != 1 || grid.geometry != Geometry::radial)
    throw PreconditionError("radial diagonal check: needs a one-electron coulomb3d atom on a radial grid");
  SystemConfig one = SystemConfig::neutral({atom}, InteractionKind::coulomb);
  one.atoms.front().position = {0.0, 0.0, 0.0};
  const CutoffState st = build_cutoff_product(one, Decomposition::canonical(one), grid, settings,
                                              CutoffOptions{separation});
  const WaveFunction& psi = st.cluster_states.front();
  const LinearOperator h = build_cluster_hamiltonian(one, Decomposition::canonical(one), 0, grid);
  // both atoms contribute the same intra-atomic excess
  const double intra = 2.0 * (h.expectation(psi) - st.energy_infinity);

  std::vector<double> radii, weights;
  const double hstep = grid.spacing();
  for (std::size_t k = 0; k < psi.size(); ++k) {
    radii.push_back(grid.coordinate(k));
    weights.push_back(psi[k] * psi[k] * hstep);
  }
  const NewtonReport nr = newton_cancellation_check_shells(radii, weights, {{0.0, 0.0, separation}});
  // <Psi_a, I_a Psi_a> carries unit charges on both sides
  const double inter = nr.neutral_pair.front();
  DiagonalEnergyReport rep;
  rep.deviation = std::abs(intra + inter);
  rep.newton_applicable = true;
  rep.passed = rep.deviation <= threshold;
  return rep;
}

} // namespace vdw
