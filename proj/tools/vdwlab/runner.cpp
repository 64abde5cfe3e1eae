#include "runner.hpp"

#include "vdwlab/combinatorics.hpp"
#include "vdwlab/dispersion.hpp"
#include "vdwlab/hamiltonian.hpp"
#include "vdwlab/partition.hpp"
#include "vdwlab/stability.hpp"
#include "vdwlab/symmetry.hpp"
#include "vdwlab/variational.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <random>
#include <thread>

#ifndef VDWLAB_VERSION
#define VDWLAB_VERSION "unknown"
#endif

namespace vdw::cli {

using ojson = nlohmann::ordered_json;

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr);
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

namespace {

ojson vec(const Vec3& v) { return ojson::array({v[0], v[1], v[2]}); }

ojson grid_json(const GridSpec& g) {
  return {{"points", g.points_per_axis},
          {"half_width", g.half_width},
          {"dim", g.dim_per_particle},
          {"geometry", g.geometry == Geometry::radial ? "radial" : "cartesian"}};
}

ojson atom_json(const AtomSpec& a) {
  return {{"kind", to_string(a.kind)},
          {"charge", a.charge_Z},
          {"position", vec(a.position)},
          {"softening", a.softening},
          {"strength", vec(a.strength)}};
}

ojson system_json(const SystemConfig& c) {
  ojson atoms = ojson::array();
  for (const auto& a : c.atoms) atoms.push_back(atom_json(a));
  ojson j{{"atoms", atoms}, {"electrons", c.electron_count}, {"interaction", to_string(c.pair_interaction)}};
  if (c.pair_interaction == InteractionKind::dipole) j["coupling"] = c.coupling();
  return j;
}

// Everything a scenario produced: the document plus, for sweeps, CSV rows.
struct Output {
  ojson results;
  std::string csv;
  double tolerance = 0.0;
};

Output run_ground_state(const GroundStateParams& p) {
  const SystemConfig cfg = p.system.build();
  const LinearOperator h = build_full_hamiltonian(cfg, p.grid);
  SolverSettings s = p.solver;
  if (cfg.pair_interaction != InteractionKind::dipole && cfg.electron_count > 1) {
    const TensorGrid g = h.domain();
    s.sector = [g](std::span<double> c) { antisymmetrize_in_place(g, c); };
  }
  const EigenResult r = low_spectrum(h, p.states, s);
  Output o;
  o.tolerance = s.tolerance;
  o.results = {{"system", system_json(cfg)},
               {"grid", grid_json(p.grid)},
               {"method", to_string(r.method)},
               {"energies", r.eigenvalues},
               {"residual_norms", r.residual_norms},
               {"operator_applications", r.operator_applications}};
  return o;
}

Output run_sigma(const SigmaParams& p) {
  Output o;
  o.tolerance = p.solver.tolerance;
  if (!p.directions.empty()) {
    const DispersionResult r = direction_invariance_check(p.atom_i, p.atom_j, p.directions, p.grid, p.solver);
    ojson dirs = ojson::array();
    for (const auto& d : p.directions) dirs.push_back(vec(d));
    o.results = {{"atom_i", atom_json(p.atom_i)},    {"atom_j", atom_json(p.atom_j)},
                 {"grid", grid_json(p.grid)},        {"directions", dirs},
                 {"sigma", r.sigma},                 {"sigma_by_direction", r.sigma_by_direction},
                 {"direction_spread", r.direction_spread}, {"passed", r.passed}};
    return o;
  }
  SigmaOptions so;
  so.cutoff_R = p.cutoff_R;
  const DispersionResult r = sigma_coefficient(p.atom_i, p.atom_j, p.direction, p.grid, p.solver, so);
  o.results = {{"atom_i", atom_json(p.atom_i)},
               {"atom_j", atom_json(p.atom_j)},
               {"grid", grid_json(p.grid)},
               {"direction", vec(p.direction)},
               {"sigma", r.sigma},
               {"resolvent_residual", r.resolvent_residual},
               {"resolvent_iterations", r.resolvent_iterations},
               {"energy_i", r.energy_i},
               {"energy_j", r.energy_j},
               {"pair_gap", r.pair_gap},
               {"passed", r.passed}};
  if (r.cutoff_difference) o.results["cutoff_difference"] = *r.cutoff_difference;
  return o;
}

Output run_feshbach(const FeshbachParams& p) {
  const SystemConfig cfg = p.system.build();
  CutoffOptions cut;
  cut.radius = p.cutoff_radius;
  const FeshbachResult r = feshbach_energy(cfg, p.grid, p.solver, p.fixed_point, cut);
  Output o;
  o.tolerance = p.solver.tolerance;
  o.results = {{"system", system_json(cfg)},
               {"grid", grid_json(p.grid)},
               {"energy", r.energy},
               {"interaction_energy", r.interaction_energy},
               {"energy_infinity", r.energy_infinity},
               {"fixed_point_residual", r.residual},
               {"gap_lower_bound", r.gap_lower_bound},
               {"valid", r.valid},
               {"used_bisection", r.used_bisection},
               {"iterations", r.iterations}};
  return o;
}

Output run_variational(const VariationalParams& p) {
  const SystemConfig cfg = p.system.build();
  CutoffOptions cut;
  cut.radius = p.cutoff_radius;
  const TestFunctionResult r = rayleigh_upper_bound(cfg, p.grid, p.solver, cut);
  ojson pairs = ojson::array();
  for (const auto& c : r.correction_norms)
    pairs.push_back({{"k", c.k},
                     {"l", c.l},
                     {"norm", c.norm},
                     {"resolvent_residual", c.resolvent_residual},
                     {"cutoff_support_defect", c.cutoff_support_defect}});
  Output o;
  o.tolerance = p.solver.tolerance;
  o.results = {{"system", system_json(cfg)},
               {"grid", grid_json(p.grid)},
               {"upper_bound", r.rayleigh_quotient},
               {"bare_quotient", r.bare_quotient},
               {"energy_infinity", r.energy_infinity},
               {"norm_squared", r.norm_squared},
               {"orthogonality_defect", r.orthogonality_defect},
               {"decomposition_defect", r.decomposition_defect},
               {"terms",
                {{"diagonal", r.terms.diagonal},
                 {"leading", r.terms.leading},
                 {"product_cross", r.terms.product_cross},
                 {"D1", r.terms.D1},
                 {"D2", r.terms.D2}}},
               {"pair_corrections", pairs}};
  if (r.antisymmetrized_quotient) o.results["antisymmetrized_quotient"] = *r.antisymmetrized_quotient;
  return o;
}

std::string csv_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Output run_sweep_scenario(const SweepParams& p) {
  const SystemConfig base = p.system.build();
  ConfigFactory make;
  if (p.abscissa == Abscissa::coupling) {
    if (base.pair_interaction != InteractionKind::dipole)
      throw ConfigError("coupling sweeps need a dipole (Drude) system");
    make = [base](double lambda) {
      SystemConfig c = base;
      c.dipole_coupling = lambda;
      return c;
    };
  } else {
    const double R0 = base.separation_R();
    if (!std::isfinite(R0) || !(R0 > 0.0)) throw ConfigError("separation sweeps need two or more distinct nuclei");
    make = [base, R0](double R) {
      SystemConfig c = base;
      for (auto& a : c.atoms)
        for (double& x : a.position) x *= R / R0;
      return c;
    };
  }
  SweepSettings st;
  st.grid = p.grid;
  st.solver = p.solver;
  st.methods = p.methods;
  st.kind = p.abscissa;
  st.include_dense_when_feasible = p.include_dense;
  st.cutoff_radius = p.cutoff_radius;
  st.jobs = p.jobs;
  const SweepResult sweep = run_sweep(make, p.values, st);

  Output o;
  o.tolerance = p.solver.tolerance;
  o.csv = "abscissa,method,W,residual\n";
  ojson failures = ojson::array();
  for (const auto& [m, vals] : sweep.energies)
    for (std::size_t k = 0; k < vals.size(); ++k) {
      const auto& v = vals[k];
      o.csv += csv_number(sweep.abscissae[k]) + "," + to_string(m) + "," + (v.value ? csv_number(*v.value) : "nan") +
               "," + csv_number(v.residual) + "\n";
      if (!v.value) failures.push_back({{"abscissa", sweep.abscissae[k]}, {"method", to_string(m)}, {"error", v.failure}});
    }
  o.results = {{"system", system_json(base)},
               {"grid", grid_json(p.grid)},
               {"abscissa", to_string(p.abscissa)},
               {"values", p.values},
               {"failures", failures}};
  if (p.fit) {
    const SweepResult fitted = p.recast ? recast_coupling_as_separation(sweep) : sweep;
    try {
      const PowerLawFit f = fit_power_law(fitted, p.fit_method, p.fit_options);
      o.results["fit"] = {{"method", to_string(p.fit_method)},
                          {"recast", p.recast},
                          {"exponent", f.exponent},
                          {"coefficient", f.coefficient},
                          {"remainder_exponent", f.remainder_exponent},
                          {"remainder_coefficient", f.remainder_coefficient},
                          {"fit_residual", f.fit_residual},
                          {"remainder_residual", f.remainder_residual},
                          {"abscissae", f.abscissae}};
    } catch (const PreconditionError& e) {
      // too few points or a sign change: the sweep itself still stands
      o.results["fit"] = {{"method", to_string(p.fit_method)}, {"error", e.what()}};
    }
  }
  return o;
}

Output run_stability(const StabilityParams& p) {
  std::vector<IonLadder> ladders;
  ojson lj = ojson::array();
  for (const auto& a : p.atoms) {
    ladders.push_back(ion_ladder(a, p.n_max, p.grid, p.solver));
    ojson entries = ojson::array();
    for (const auto& e : ladders.back().entries) {
      ojson x{{"charge", e.charge}, {"electrons", e.electrons}, {"energy", e.energy}, {"residual", e.residual},
              {"converged", e.converged}, {"clamped", e.clamped}};
      if (!e.failure.empty()) x["failure"] = e.failure;
      entries.push_back(x);
    }
    lj.push_back({{"atom", atom_json(a)}, {"entries", entries}});
  }
  Output o;
  o.tolerance = p.solver.tolerance;
  o.results = {{"grid", grid_json(p.grid)}, {"n_max", p.n_max}, {"ladders", lj}};
  if (p.property_E && ladders.size() >= 2) {
    const PropertyEVerdict v = property_E_check(ladders);
    ojson j{{"holds", v.holds}, {"checked", v.checked}, {"min_margin", v.min_margin}};
    if (v.witness)
      j["witness"] = {{"i", v.witness->i}, {"j", v.witness->j}, {"m", v.witness->m}, {"n", v.witness->n},
                      {"l", v.witness->l}, {"lhs", v.witness->lhs}, {"rhs", v.witness->rhs}};
    o.results["property_E"] = j;
  }
  if (p.property_Eprime && ladders.size() >= 2) {
    const PropertyEprimeVerdict v = property_Eprime_check(ladders);
    ojson j{{"holds", v.holds}, {"checked", v.checked}, {"min_margin", v.min_margin}};
    if (v.witness) j["witness"] = *v.witness;
    o.results["property_Eprime"] = j;
  }
  return o;
}

Output run_partition(const PartitionParams& p) {
  const SystemConfig cfg = p.system.build();
  PartitionOptions po;
  po.R = p.R;
  po.random_samples = p.random_samples;
  po.seed = p.seed;
  const PartitionOfUnity u = build_ims_partition(cfg, p.grid, po);
  Output o;
  o.results = {{"system", system_json(cfg)},
               {"grid", grid_json(p.grid)},
               {"R", u.R},
               {"scale", u.scale},
               {"members", u.labels},
               {"sum_defect", u.sum_defect},
               {"random_sum_defect", u.random_sum_defect},
               {"random_samples", u.random_samples},
               {"bounded", u.bounded},
               {"support_violations", u.support_violations},
               {"gradient_sup", u.gradient_sup},
               {"gradient_bound", u.gradient_bound}};
  if (!p.gradient_radii.empty()) {
    const GradientScaling g = ims_gradient_scaling(cfg, p.gradient_radii, p.points_per_scale);
    o.results["gradient_scaling"] = {{"radii", g.radii},
                                     {"gradient_sup", g.gradient_sup},
                                     {"slope", g.slope},
                                     {"max_bound_ratio", g.max_bound_ratio}};
  }
  return o;
}

Output run_combinatorics(const CombinatoricsParams& p) {
  const GroupScanReport r = scan_charge_groups(p.Z, p.max_length);
  Output o;
  o.results = {{"Z", r.Z},
               {"max_length", r.max_length},
               {"multisets", r.multisets},
               {"sequences", r.sequences},
               {"max_minimal_length", r.max_minimal_length},
               {"max_decomposed_group", r.max_decomposed_group},
               {"proved_bound", group_size_bound(p.Z)},
               {"conjectured_bound", r.conjectured_bound},
               {"counterexamples", r.counterexamples},
               {"longest_minimal", r.longest_minimal}};
  if (p.witness_trials > 0) {
    std::mt19937_64 rng(p.seed);
    std::uniform_int_distribution<std::size_t> size(1, p.witness_max_size);
    std::uniform_int_distribution<long> value(-1000, 1000);
    std::size_t valid = 0;
    for (std::size_t t = 0; t < p.witness_trials; ++t) {
      std::vector<long> k(size(rng));
      for (long& x : k) x = value(rng);
      long sum = 0;
      for (auto i : zero_subset_witness(k)) sum += k[i];
      valid += sum % static_cast<long>(k.size()) == 0 ? 1 : 0;
    }
    o.results["witness_trials"] = p.witness_trials;
    o.results["witness_valid"] = valid;
  }
  return o;
}

Output execute(const Scenario& s) {
  return std::visit(
      [](const auto& p) -> Output {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, GroundStateParams>) return run_ground_state(p);
        else if constexpr (std::is_same_v<T, SigmaParams>) return run_sigma(p);
        else if constexpr (std::is_same_v<T, FeshbachParams>) return run_feshbach(p);
        else if constexpr (std::is_same_v<T, VariationalParams>) return run_variational(p);
        else if constexpr (std::is_same_v<T, SweepParams>) return run_sweep_scenario(p);
        else if constexpr (std::is_same_v<T, StabilityParams>) return run_stability(p);
        else if constexpr (std::is_same_v<T, PartitionParams>) return run_partition(p);
        else return run_combinatorics(p);
      },
      s.params);
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error("cannot write " + path.string());
}

std::string summary_name(const std::string& csv_name) {
  const std::filesystem::path p(csv_name);
  return p.stem().string() + ".summary.json";
}

struct Record {
  bool ok = false;
  std::string error;
  std::vector<std::string> outputs;
  double tolerance = 0.0;
  double seconds = 0.0;
};

} // namespace

int run_scenarios(const RunConfig& cfg, const RunOptions& options, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  std::filesystem::create_directories(options.out_dir);

  std::vector<Record> records(cfg.scenarios.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t k = next++; k < cfg.scenarios.size(); k = next++) {
      const Scenario& s = cfg.scenarios[k];
      Record& rec = records[k];
      const auto t0 = std::chrono::steady_clock::now();
      try {
        Output out = execute(s);
        ojson doc{{"schema_version", kSchemaVersion}, {"scenario", s.name}, {"kind", to_string(s.kind)}};
        doc["results"] = std::move(out.results);
        if (s.kind == ScenarioKind::sweep) {
          write_file(options.out_dir / s.output_path, out.csv);
          const std::string side = summary_name(s.output_path);
          write_file(options.out_dir / side, doc.dump(2) + "\n");
          rec.outputs = {s.output_path, side};
        } else {
          write_file(options.out_dir / s.output_path, doc.dump(2) + "\n");
          rec.outputs = {s.output_path};
        }
        rec.tolerance = out.tolerance;
        rec.ok = true;
      } catch (const std::exception& e) {
        rec.error = e.what();
      }
      rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::lock_guard lock(log_mutex);
      log << (rec.ok ? "ok     " : "FAILED ") << s.name << " (" << to_string(s.kind) << ")";
      if (!rec.ok) log << ": " << rec.error;
      log << "\n";
    }
  };
  const std::size_t jobs = std::max<std::size_t>(1, std::min(options.jobs, cfg.scenarios.size()));
  std::vector<std::thread> pool;
  for (std::size_t j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  bool all_ok = true;
  ojson scenarios = ojson::array();
  for (std::size_t k = 0; k < records.size(); ++k) {
    const auto& s = cfg.scenarios[k];
    const auto& r = records[k];
    all_ok = all_ok && r.ok;
    ojson j{{"name", s.name}, {"kind", to_string(s.kind)}, {"status", r.ok ? "ok" : "failed"}};
    if (!r.ok) j["error"] = r.error;
    j["outputs"] = r.outputs;
    j["tolerances"] = {{"solver", r.tolerance}};
    j["wall_time_s"] = r.seconds;
    scenarios.push_back(j);
  }
  ojson manifest{{"schema_version", kSchemaVersion},
                 {"config", options.config_path},
                 {"inputs_sha256", sha256_hex(options.config_text)},
                 {"versions",
                  {{"vdwlab", VDWLAB_VERSION},
                   {"compiler", __VERSION__},
                   {"cxx_standard", static_cast<long>(__cplusplus)},
                   {"nlohmann_json",
                    std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) +
                        "." + std::to_string(NLOHMANN_JSON_VERSION_PATCH)}}},
                 {"seed", cfg.seed ? ojson(*cfg.seed) : ojson(nullptr)},
                 {"jobs", options.jobs},
                 {"scenarios", scenarios},
                 {"wall_time_s", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
  write_file(options.out_dir / "manifest.json", manifest.dump(2) + "\n");
  return all_ok ? 0 : 1;
}

} // namespace vdw::cli
