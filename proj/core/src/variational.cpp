#include "vdwlab/variational.hpp"

#include "vdwlab/error.hpp"
#include "vdwlab/hamiltonian.hpp"
#include "vdwlab/symmetry.hpp"

#include <cmath>
#include <future>

namespace vdw {

namespace {

struct PairPiece {
  WaveFunction correction; // on the pair grid, electrons of B_k then B_l
  TestFunctionResult::PairCorrection info;
};

double distance_to(const Vec3& x, const Vec3& y) {
  double s = 0.0;
  for (std::size_t c = 0; c < 3; ++c) s += (x[c] - y[c]) * (x[c] - y[c]);
  return std::sqrt(s);
}

PairPiece pair_correction(const SystemConfig& cfg, const CutoffState& st, std::size_t k, std::size_t l,
                          const GridSpec& grid, const SolverSettings& settings) {
  const Decomposition& b = st.decomposition;
  SystemConfig sub;
  sub.atoms = {cfg.atoms[k], cfg.atoms[l]};
  sub.electron_count = static_cast<int>(b.clusters[k].size() + b.clusters[l].size());
  sub.pair_interaction = cfg.pair_interaction;
  if (cfg.pair_interaction == InteractionKind::dipole) sub.dipole_coupling = cfg.coupling();
  Decomposition d;
  d.clusters.resize(2);
  for (std::size_t e = 0; e < b.clusters[k].size(); ++e) d.clusters[0].push_back(e);
  for (std::size_t e = 0; e < b.clusters[l].size(); ++e) d.clusters[1].push_back(b.clusters[k].size() + e);

  const TensorGrid pg = system_grid(sub, grid);
  const WaveFunction prod = tensor_product(st.cluster_states[k], st.cluster_states[l]);
  const WaveFunction psi(pg, std::vector<double>(prod.coefficients().begin(), prod.coefficients().end()));
  const LinearOperator hb = build_decomposed_hamiltonian(sub, d, grid);
  const LinearOperator ikl = build_interaction(sub, d, grid);

  PairPiece out;
  out.info.k = k;
  out.info.l = l;
  WaveFunction rhs = ikl(psi);
  rhs.axpy(-inner(psi, rhs), psi);
  if (rhs.norm() == 0.0) {
    out.correction = WaveFunction(pg);
    return out;
  }
  const ResolventResult rr =
      projected_resolvent_solve(hb, psi, st.cluster_energies[k] + st.cluster_energies[l], rhs, settings);
  out.info.resolvent_residual = rr.relative_residual;

  const SmoothCutoff chi(2.0 * st.cutoff_radius);
  const std::size_t nk = b.clusters[k].size();
  const Vec3 yk = cfg.atoms[k].position;
  const Vec3 yl = cfg.atoms[l].position;
  const WaveFunction mask = WaveFunction::sample(pg, [&](std::span<const Vec3> x) {
    double v = 1.0;
    for (std::size_t e = 0; e < x.size(); ++e) v *= chi(distance_to(x[e], e < nk ? yk : yl));
    return v;
  });
  double defect = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i)
    if (psi[i] != 0.0) defect = std::max(defect, std::abs(mask[i] - 1.0));
  out.info.cutoff_support_defect = defect;
  out.correction = pointwise_product(rr.solution, mask);
  out.info.norm = out.correction.norm();
  return out;
}

// Embeds a pair correction into the full grid next to the remaining cluster states.
WaveFunction embed(const PairPiece& piece, const CutoffState& st, const TensorGrid& full) {
  const Decomposition& b = st.decomposition;
  Decomposition order;
  order.clusters = {b.clusters[piece.info.k], b.clusters[piece.info.l]};
  WaveFunction ordered = piece.correction;
  for (std::size_t i = 0; i < b.clusters.size(); ++i) {
    if (i == piece.info.k || i == piece.info.l) continue;
    order.clusters.push_back(b.clusters[i]);
    ordered = tensor_product(ordered, st.cluster_states[i]);
  }
  // ordered carries electron f[j] in slot j; index arithmetic instead of permute()
  // because Drude electrons sit in different frames
  const Permutation f = order.flattened();
  const std::size_t n = f.size();
  const std::size_t L = full.local_size();
  std::vector<std::size_t> weight(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t w = 1;
    for (std::size_t t = j + 1; t < n; ++t) w *= L;
    weight[f[j]] = w;
  }
  std::vector<double> out(full.size());
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    std::size_t rest = idx, src = 0;
    for (std::size_t p = n; p-- > 0;) {
      src += (rest % L) * weight[p];
      rest /= L;
    }
    out[idx] = ordered[src];
  }
  return WaveFunction(full, std::move(out));
}

} // namespace

TestFunctionResult build_test_function(const SystemConfig& cfg, const Decomposition& b, const GridSpec& grid,
                                       const SolverSettings& settings, const CutoffOptions& cutoff) {
  if (grid.geometry == Geometry::radial)
    throw PreconditionError("test function: the radial surrogate has no two-centre grid");
  if (cfg.atoms.size() < 2) throw PreconditionError("test function: at least two atoms required");
  const CutoffState st = build_cutoff_product(cfg, b, grid, settings, cutoff);
  const TensorGrid full = st.base_state.grid();

  std::vector<std::future<PairPiece>> jobs;
  for (std::size_t k = 0; k < cfg.atoms.size(); ++k)
    for (std::size_t l = k + 1; l < cfg.atoms.size(); ++l)
      jobs.push_back(std::async(std::launch::async, [&, k, l] {
        return pair_correction(cfg, st, k, l, grid, settings);
      }));

  TestFunctionResult r;
  r.decomposition = b;
  r.base_state = st.base_state;
  r.energy_infinity = st.energy_infinity;
  WaveFunction c(full);
  for (auto& j : jobs) {
    PairPiece piece = j.get();
    if (piece.info.norm > 0.0) c += embed(piece, st, full);
    r.correction_norms.push_back(piece.info);
  }
  r.state = st.base_state - c;
  r.norm_squared = std::pow(r.state.norm(), 2);
  r.orthogonality_defect = std::abs(inner(st.base_state, c));

  const LinearOperator h = build_full_hamiltonian(cfg, grid);
  const LinearOperator hb = build_decomposed_hamiltonian(cfg, b, grid);
  const LinearOperator ib = build_interaction(cfg, b, grid);
  const double einf = st.energy_infinity;
  auto shifted = [&](const LinearOperator& op, const WaveFunction& u, const WaveFunction& v) {
    return inner(u, op(v)) - einf * inner(u, v);
  };
  r.rayleigh_quotient = shifted(h, r.state, r.state) / r.norm_squared;
  r.bare_quotient = shifted(h, st.base_state, st.base_state);

  QuotientTerms& t = r.terms;
  t.diagonal = r.bare_quotient;
  t.leading = -2.0 * inner(ib(st.base_state), c);
  t.product_cross = -2.0 * shifted(hb, c, st.base_state);
  t.D1 = shifted(hb, c, c);
  t.D2 = inner(c, ib(c));
  r.decomposition_defect = std::abs(t.sum() / r.norm_squared - r.rayleigh_quotient);

  if (cfg.pair_interaction != InteractionKind::dipole && cfg.electron_count >= 2) {
    const WaveFunction q = antisymmetrize(r.state);
    const double n2 = std::pow(q.norm(), 2);
    if (n2 > 0.0) r.antisymmetrized_quotient = shifted(h, q, q) / n2;
  }
  return r;
}

TestFunctionResult rayleigh_upper_bound(const SystemConfig& cfg, const GridSpec& grid, const SolverSettings& settings,
                                        const CutoffOptions& cutoff) {
  return build_test_function(cfg, Decomposition::canonical(cfg), grid, settings, cutoff);
}

} // namespace vdw
