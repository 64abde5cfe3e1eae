#include "vdwlab/asymptotics.hpp"

#include "vdwlab/error.hpp"
#include "vdwlab/hamiltonian.hpp"
#include "vdwlab/symmetry.hpp"
#include "vdwlab/variational.hpp"

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

namespace vdw {

std::string to_string(SweepMethod m) {
  switch (m) {
  case SweepMethod::dense: return "dense";
  case SweepMethod::feshbach: return "feshbach";
  case SweepMethod::variational: return "variational";
  }
  return "?";
}

SweepMethod parse_sweep_method(const std::string& s) {
  if (s == "dense") return SweepMethod::dense;
  if (s == "feshbach") return SweepMethod::feshbach;
  if (s == "variational") return SweepMethod::variational;
  throw ConfigError("unknown sweep method '" + s + "'");
}

std::string to_string(Abscissa a) { return a == Abscissa::separation ? "separation" : "coupling"; }

std::pair<std::vector<double>, std::vector<double>> SweepResult::series(SweepMethod m) const {
  std::pair<std::vector<double>, std::vector<double>> out;
  const auto it = energies.find(m);
  if (it == energies.end()) return out;
  for (std::size_t k = 0; k < abscissae.size(); ++k)
    if (it->second[k].value) {
      out.first.push_back(abscissae[k]);
      out.second.push_back(*it->second[k].value);
    }
  return out;
}

SystemConfig drude_pair(double lambda) {
  // lambda is explicit, so the separation only sets the cutoff scales; keep them off the grid
  SystemConfig cfg =
      SystemConfig::neutral({AtomSpec::well1d(-50.0), AtomSpec::well1d(50.0)}, InteractionKind::dipole);
  cfg.dipole_coupling = lambda;
  return cfg;
}

namespace {

bool antisymmetric(const SystemConfig& cfg) {
  return cfg.pair_interaction != InteractionKind::dipole && cfg.electron_count > 1;
}

SweepValue dense_point(const SystemConfig& cfg, const SweepSettings& st) {
  SweepValue v;
  const LinearOperator h = build_full_hamiltonian(cfg, st.grid);
  SolverSettings s = st.solver;
  if (antisymmetric(cfg)) {
    const TensorGrid g = h.domain();
    s.sector = [g](std::span<double> c) { antisymmetrize_in_place(g, c); };
  }
  const EigenResult r = ground_state(h, s);
  const Decomposition a = atomic_decompositions(cfg).front();
  double e_inf = 0.0;
  for (std::size_t i = 0; i < cfg.atom_count(); ++i) e_inf += cluster_ground_state(cfg, a, i, st.grid, st.solver).energy;
  v.value = r.ground_energy() - e_inf;
  v.residual = r.residual_norms.front();
  v.solver = to_string(r.method);
  return v;
}

SweepValue method_point(SweepMethod m, const SystemConfig& cfg, const SweepSettings& st) {
  CutoffOptions cut;
  cut.radius = st.cutoff_radius;
  try {
    switch (m) {
    case SweepMethod::dense: return dense_point(cfg, st);
    case SweepMethod::feshbach: {
      const FeshbachResult r = feshbach_energy(cfg, st.grid, st.solver, st.fixed_point, cut);
      SweepValue v;
      v.residual = r.residual;
      if (r.valid)
        v.value = r.interaction_energy;
      else
        v.failure = "fixed point not certified (gap " + std::to_string(r.gap_lower_bound) + ")";
      return v;
    }
    case SweepMethod::variational: {
      const TestFunctionResult r = rayleigh_upper_bound(cfg, st.grid, st.solver, cut);
      SweepValue v;
      v.value = r.rayleigh_quotient;
      v.residual = r.decomposition_defect;
      return v;
    }
    }
  } catch (const std::exception& e) {
    SweepValue v;
    v.failure = e.what();
    return v;
  }
  return {};
}

} // namespace

SweepResult run_sweep(const ConfigFactory& make, std::vector<double> abscissae, const SweepSettings& settings) {
  settings.grid.validate();
  settings.solver.validate();
  if (!std::is_sorted(abscissae.begin(), abscissae.end()) ||
      std::adjacent_find(abscissae.begin(), abscissae.end()) != abscissae.end())
    throw PreconditionError("sweep abscissae must be strictly increasing");

  // every abscissa must yield a valid configuration before any work starts
  std::vector<SystemConfig> cfgs;
  for (double x : abscissae) {
    cfgs.push_back(make(x));
    cfgs.back().validate();
  }

  std::vector<SweepMethod> methods = settings.methods;
  const bool requested_dense = std::find(methods.begin(), methods.end(), SweepMethod::dense) != methods.end();
  if (!requested_dense && settings.include_dense_when_feasible && !cfgs.empty()) {
    bool feasible = true;
    for (const auto& c : cfgs)
      feasible = feasible && system_grid(c, settings.grid).size() <= settings.solver.dense_cutoff;
    if (feasible) methods.push_back(SweepMethod::dense);
  }

  SweepResult out;
  out.kind = settings.kind;
  out.abscissae = abscissae;
  out.grid = settings.grid;
  out.tolerance = settings.solver.tolerance;
  for (SweepMethod m : methods) out.energies[m].resize(abscissae.size());

  const std::size_t tasks = abscissae.size() * methods.size();
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < tasks; t = next++) {
      const std::size_t k = t / methods.size();
      const SweepMethod m = methods[t % methods.size()];
      out.energies[m][k] = method_point(m, cfgs[k], settings);
    }
  };
  const std::size_t jobs = std::max<std::size_t>(1, std::min(settings.jobs, tasks));
  std::vector<std::thread> pool;
  for (std::size_t j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return out;
}

SweepResult recast_coupling_as_separation(const SweepResult& sweep) {
  if (sweep.kind != Abscissa::coupling) throw PreconditionError("recast needs a coupling sweep");
  SweepResult out = sweep;
  out.kind = Abscissa::separation;
  const std::size_t n = sweep.abscissae.size();
  for (std::size_t k = 0; k < n; ++k) {
    if (!(sweep.abscissae[k] > 0.0)) throw PreconditionError("recast needs positive couplings");
    out.abscissae[k] = std::cbrt(1.0 / sweep.abscissae[n - 1 - k]);
  }
  for (auto& [m, vals] : out.energies) std::reverse(vals.begin(), vals.end());
  return out;
}

LogLogFit fit_log_log(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw PreconditionError("log-log fit needs two or more points");
  const std::size_t n = x.size();
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd b(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (!(x[k] > 0.0) || !(y[k] > 0.0)) throw PreconditionError("log-log fit needs positive data");
    A(k, 0) = std::log(x[k]);
    A(k, 1) = 1.0;
    b(k) = std::log(y[k]);
  }
  const Eigen::Vector2d s = A.colPivHouseholderQr().solve(b);
  LogLogFit f;
  f.slope = s(0);
  f.intercept = s(1);
  f.residual = std::sqrt((A * s - b).squaredNorm() / static_cast<double>(n));
  return f;
}

namespace {

struct TwoTerm {
  double c = 0.0, d = 0.0, rms = std::numeric_limits<double>::infinity();
};

// W ~ -c x^-p + d x^-q in relative error, linear in (c, d)
TwoTerm two_term(const std::vector<double>& x, const std::vector<double>& W, double p, double q) {
  const std::size_t n = x.size();
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd b(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double s = 1.0 / std::abs(W[k]);
    A(k, 0) = -std::pow(x[k], -p) * s;
    A(k, 1) = std::pow(x[k], -q) * s;
    b(k) = W[k] * s;
  }
  const Eigen::Vector2d sol = A.colPivHouseholderQr().solve(b);
  TwoTerm t;
  t.c = sol(0);
  t.d = sol(1);
  t.rms = std::sqrt((A * sol - b).squaredNorm() / static_cast<double>(n));
  return t;
}

// coarse scan then Brent refinement of f on [lo, hi]
template <class F> std::pair<double, double> minimize_1d(F f, double lo, double hi, int scan) {
  double best = lo, fbest = f(lo);
  const double step = (hi - lo) / scan;
  for (int i = 1; i <= scan; ++i) {
    const double t = lo + i * step;
    const double ft = f(t);
    if (ft < fbest) {
      best = t;
      fbest = ft;
    }
  }
  const auto r = boost::math::tools::brent_find_minima(f, std::max(lo, best - step), std::min(hi, best + step), 40);
  return r.second < fbest ? r : std::pair{best, fbest};
}

} // namespace

PowerLawFit fit_power_law(std::vector<double> R, std::vector<double> W, const FitOptions& options) {
  if (R.size() != W.size()) throw PreconditionError("fit: abscissae and energies differ in length");
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < R.size(); ++k) {
    if (options.window_min && R[k] < *options.window_min) continue;
    if (options.window_max && R[k] > *options.window_max) continue;
    idx.push_back(k);
  }
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return std::abs(W[a]) > std::abs(W[b]); });
  idx.erase(idx.begin(), idx.begin() + std::min(options.exclude_largest, idx.size()));
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return R[a] < R[b]; });
  if (idx.size() < 4) throw PreconditionError("fit needs at least 4 abscissae in the window");

  std::vector<double> x, w, negw;
  for (std::size_t k : idx) {
    if (!(W[k] < 0.0))
      throw PreconditionError("sign change in the fit window at abscissa " + std::to_string(R[k]) +
                              ": the interaction is not attractive there");
    x.push_back(R[k]);
    w.push_back(W[k]);
    negw.push_back(-W[k]);
  }

  const LogLogFit lead = fit_log_log(x, negw);
  PowerLawFit f;
  f.abscissae = x;
  f.exponent = -lead.slope;
  f.coefficient = std::exp(lead.intercept);
  f.fit_residual = lead.residual;
  f.remainder_exponent = std::numeric_limits<double>::quiet_NaN();
  f.remainder_coefficient = 0.0;
  f.remainder_residual = lead.residual;
  if (x.size() < 5 || lead.residual < 1e-12) return f;

  // joint fit of both terms; abscissae scaled by the smallest to keep the basis O(1)
  const double x0 = x.front();
  std::vector<double> xs;
  for (double v : x) xs.push_back(v / x0);
  const double p0 = f.exponent;
  auto best_p = [&](double q) {
    return minimize_1d([&](double p) { return two_term(xs, w, p, q).rms; }, p0 - 1.0, std::min(p0 + 1.0, q - 0.05), 40);
  };
  const auto [q, rms] = minimize_1d([&](double qq) { return best_p(qq).second; }, p0 + 0.1, p0 + 12.0, 60);
  const double p = best_p(q).first;
  const TwoTerm t = two_term(xs, w, p, q);
  if (!(rms < 0.5 * lead.residual)) return f;
  f.remainder_exponent = q;
  f.remainder_coefficient = t.d * std::pow(x0, q);
  f.remainder_residual = rms;
  return f;
}

PowerLawFit fit_power_law(const SweepResult& sweep, SweepMethod method, const FitOptions& options) {
  if (!sweep.has(method)) throw PreconditionError("sweep lacks method " + to_string(method));
  auto [R, W] = sweep.series(method);
  return fit_power_law(std::move(R), std::move(W), options);
}

LogLogFit excess_decay(const SweepResult& sweep, SweepMethod upper, SweepMethod lower) {
  if (!sweep.has(upper) || !sweep.has(lower)) throw PreconditionError("sweep lacks a method for the excess");
  const auto& u = sweep.energies.at(upper);
  const auto& l = sweep.energies.at(lower);
  std::vector<double> x, y;
  for (std::size_t k = 0; k < sweep.abscissae.size(); ++k) {
    if (!u[k].value || !l[k].value) continue;
    const double e = *u[k].value - *l[k].value;
    if (!(e > 0.0)) continue;
    x.push_back(sweep.abscissae[k]);
    y.push_back(e);
  }
  if (x.size() < 3) throw PreconditionError("excess decay needs three positive differences");
  LogLogFit fit = fit_log_log(x, y);
  fit.slope = -fit.slope;
  return fit;
}

} // namespace vdw
