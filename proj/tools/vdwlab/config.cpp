#include "config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace vdw::cli {

using json = nlohmann::json;

ParseError::ParseError(const std::string& source, std::size_t line, std::size_t column, const std::string& what)
    : ConfigError(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + what), line_(line),
      column_(column) {}

std::string to_string(ScenarioKind k) {
  switch (k) {
  case ScenarioKind::ground_state: return "ground_state";
  case ScenarioKind::sigma: return "sigma";
  case ScenarioKind::feshbach: return "feshbach";
  case ScenarioKind::variational: return "variational";
  case ScenarioKind::sweep: return "sweep";
  case ScenarioKind::stability: return "stability";
  case ScenarioKind::partition: return "partition";
  case ScenarioKind::combinatorics: return "combinatorics";
  }
  return "?";
}

SystemConfig SystemInput::build() const {
  SystemConfig cfg = SystemConfig::neutral(atoms, interaction);
  if (electrons) cfg.electron_count = *electrons;
  cfg.dipole_coupling = coupling;
  cfg.validate();
  return cfg;
}

namespace {

// An object whose keys must all be consumed; finish() rejects the rest.
class Reader {
public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  [[noreturn]] static void fail(const std::string& key, const std::string& what) {
    throw ConfigError(key + ": " + what);
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* find(const std::string& key) {
    used_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  const json& require(const std::string& key) {
    const json* v = find(key);
    if (!v) fail(at(key), "required key missing");
    return *v;
  }

  double number(const std::string& key, double def) {
    const json* v = find(key);
    return v ? as_number(*v, at(key)) : def;
  }
  std::optional<double> opt_number(const std::string& key) {
    const json* v = find(key);
    return v ? std::optional(as_number(*v, at(key))) : std::nullopt;
  }
  long integer(const std::string& key, long def) {
    const json* v = find(key);
    return v ? as_integer(*v, at(key)) : def;
  }
  std::size_t count(const std::string& key, std::size_t def) {
    const long v = integer(key, static_cast<long>(def));
    if (v < 0) fail(at(key), "expected a nonnegative integer");
    return static_cast<std::size_t>(v);
  }
  bool boolean(const std::string& key, bool def) {
    const json* v = find(key);
    if (!v) return def;
    if (!v->is_boolean()) fail(at(key), "expected true or false");
    return v->get<bool>();
  }
  std::string string(const std::string& key, const std::string& def) {
    const json* v = find(key);
    if (!v) return def;
    if (!v->is_string()) fail(at(key), "expected a string");
    return v->get<std::string>();
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.count(it.key())) fail(at(it.key()), "unknown key");
  }

  static double as_number(const json& v, const std::string& key) {
    if (!v.is_number()) fail(key, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(key, "expected a finite number");
    return d;
  }
  static long as_integer(const json& v, const std::string& key) {
    if (!v.is_number_integer()) fail(key, "expected an integer");
    return v.get<long>();
  }

private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

Vec3 parse_vec(const json& v, const std::string& key) {
  if (v.is_number()) return {Reader::as_number(v, key), 0.0, 0.0};
  if (!v.is_array() || v.size() != 3) Reader::fail(key, "expected a number or a list of 3 numbers");
  Vec3 out{};
  for (std::size_t c = 0; c < 3; ++c) out[c] = Reader::as_number(v[c], key + "[" + std::to_string(c) + "]");
  return out;
}

std::vector<double> parse_numbers(const json& v, const std::string& key) {
  if (!v.is_array()) Reader::fail(key, "expected a list of numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < v.size(); ++k) out.push_back(Reader::as_number(v[k], key + "[" + std::to_string(k) + "]"));
  return out;
}

template <class F> auto wrap(const std::string& key, F f) {
  try {
    return f();
  } catch (const Error& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

AtomSpec parse_atom(const json& j, const std::string& path) {
  Reader r(j, path);
  const std::string kind = r.string("kind", "");
  if (kind.empty()) Reader::fail(r.at("kind"), "required key missing");
  AtomSpec a;
  a.kind = wrap(r.at("kind"), [&] { return parse_potential_kind(kind); });
  a.charge_Z = static_cast<int>(r.integer("charge", 1));
  if (const json* p = r.find("position")) a.position = parse_vec(*p, r.at("position"));
  a.softening = r.number("softening", 1.0);
  if (const json* s = r.find("strength")) {
    if (s->is_number()) {
      const double w = Reader::as_number(*s, r.at("strength"));
      a.strength = {w, w, w};
    } else {
      a.strength = parse_vec(*s, r.at("strength"));
    }
  }
  r.finish();
  wrap(path, [&] {
    a.validate();
    return 0;
  });
  return a;
}

std::vector<AtomSpec> parse_atoms(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) Reader::fail(path, "expected a nonempty list of atoms");
  std::vector<AtomSpec> atoms;
  for (std::size_t k = 0; k < j.size(); ++k) atoms.push_back(parse_atom(j[k], path + "[" + std::to_string(k) + "]"));
  return atoms;
}

SystemInput parse_system(const json& j, const std::string& path) {
  Reader r(j, path);
  SystemInput s;
  s.atoms = parse_atoms(r.require("atoms"), r.at("atoms"));
  s.interaction = family_of(s.atoms.front().kind);
  if (const json* v = r.find("interaction")) {
    if (!v->is_string()) Reader::fail(r.at("interaction"), "expected a string");
    s.interaction = wrap(r.at("interaction"), [&] { return parse_interaction_kind(v->get<std::string>()); });
  }
  if (const json* v = r.find("electrons")) s.electrons = static_cast<int>(Reader::as_integer(*v, r.at("electrons")));
  s.coupling = r.opt_number("coupling");
  r.finish();
  wrap(path, [&] { return s.build(); });
  return s;
}

GridSpec parse_grid(const json* j, const std::string& path) {
  GridSpec g;
  if (!j) return g;
  Reader r(*j, path);
  g.points_per_axis = r.count("points", g.points_per_axis);
  g.half_width = r.number("half_width", g.half_width);
  g.dim_per_particle = static_cast<int>(r.integer("dim", g.dim_per_particle));
  const std::string geo = r.string("geometry", "cartesian");
  if (geo == "cartesian")
    g.geometry = Geometry::cartesian;
  else if (geo == "radial")
    g.geometry = Geometry::radial;
  else
    Reader::fail(r.at("geometry"), "expected \"cartesian\" or \"radial\"");
  g.point_budget = r.count("point_budget", g.point_budget);
  r.finish();
  wrap(path, [&] {
    g.validate();
    return 0;
  });
  return g;
}

SolverSettings parse_solver(const json* j, const std::string& path) {
  SolverSettings s;
  if (!j) return s;
  Reader r(*j, path);
  s.tolerance = r.number("tolerance", s.tolerance);
  s.max_iterations = static_cast<int>(r.integer("max_iterations", s.max_iterations));
  s.krylov_dimension = r.count("krylov_dimension", s.krylov_dimension);
  s.dense_cutoff = r.count("dense_cutoff", s.dense_cutoff);
  const std::string m = r.string("method", "automatic");
  if (m == "automatic")
    s.method = EigenMethod::automatic;
  else if (m == "dense_oracle")
    s.method = EigenMethod::dense_oracle;
  else if (m == "iterative")
    s.method = EigenMethod::iterative;
  else
    Reader::fail(r.at("method"), "expected automatic, dense_oracle or iterative");
  r.finish();
  wrap(path, [&] {
    s.validate();
    return 0;
  });
  return s;
}

ScenarioKind parse_kind(const std::string& s, const std::string& key) {
  for (auto k : {ScenarioKind::ground_state, ScenarioKind::sigma, ScenarioKind::feshbach, ScenarioKind::variational,
                 ScenarioKind::sweep, ScenarioKind::stability, ScenarioKind::partition, ScenarioKind::combinatorics})
    if (to_string(k) == s) return k;
  Reader::fail(key, "unknown scenario kind '" + s + "'");
}

ScenarioParams parse_params(ScenarioKind kind, const json& j, const std::string& path) {
  Reader r(j, path);
  auto grid = [&] { return parse_grid(r.find("grid"), r.at("grid")); };
  auto solver = [&] { return parse_solver(r.find("solver"), r.at("solver")); };
  auto system = [&] { return parse_system(r.require("system"), r.at("system")); };
  ScenarioParams out;
  switch (kind) {
  case ScenarioKind::ground_state: {
    GroundStateParams p;
    p.system = system();
    p.grid = grid();
    p.solver = solver();
    p.states = r.count("states", 1);
    if (p.states == 0) Reader::fail(r.at("states"), "expected at least 1");
    out = p;
    break;
  }
  case ScenarioKind::sigma: {
    SigmaParams p;
    p.atom_i = parse_atom(r.require("atom_i"), r.at("atom_i"));
    p.atom_j = parse_atom(r.require("atom_j"), r.at("atom_j"));
    if (const json* d = r.find("direction")) p.direction = parse_vec(*d, r.at("direction"));
    if (const json* d = r.find("directions")) {
      if (!d->is_array()) Reader::fail(r.at("directions"), "expected a list of directions");
      for (std::size_t k = 0; k < d->size(); ++k)
        p.directions.push_back(parse_vec((*d)[k], r.at("directions") + "[" + std::to_string(k) + "]"));
    }
    p.grid = grid();
    p.solver = solver();
    p.cutoff_R = r.opt_number("cutoff_R");
    out = p;
    break;
  }
  case ScenarioKind::feshbach: {
    FeshbachParams p;
    p.system = system();
    p.grid = grid();
    p.solver = solver();
    p.cutoff_radius = r.opt_number("cutoff_radius");
    p.fixed_point.tolerance = r.number("fixed_point_tolerance", p.fixed_point.tolerance);
    p.fixed_point.max_iterations = static_cast<int>(r.integer("fixed_point_iterations", p.fixed_point.max_iterations));
    out = p;
    break;
  }
  case ScenarioKind::variational: {
    VariationalParams p;
    p.system = system();
    p.grid = grid();
    p.solver = solver();
    p.cutoff_radius = r.opt_number("cutoff_radius");
    out = p;
    break;
  }
  case ScenarioKind::sweep: {
    SweepParams p;
    p.system = system();
    const std::string a = r.string("abscissa", "coupling");
    if (a == "coupling")
      p.abscissa = Abscissa::coupling;
    else if (a == "separation")
      p.abscissa = Abscissa::separation;
    else
      Reader::fail(r.at("abscissa"), "expected \"coupling\" or \"separation\"");
    p.values = parse_numbers(r.require("values"), r.at("values"));
    if (p.values.empty()) Reader::fail(r.at("values"), "expected at least one abscissa");
    for (std::size_t k = 1; k < p.values.size(); ++k)
      if (!(p.values[k] > p.values[k - 1])) Reader::fail(r.at("values"), "abscissae must be strictly increasing");
    if (const json* m = r.find("methods")) {
      if (!m->is_array() || m->empty()) Reader::fail(r.at("methods"), "expected a nonempty list of methods");
      p.methods.clear();
      for (const auto& x : *m) {
        if (!x.is_string()) Reader::fail(r.at("methods"), "expected method names");
        p.methods.push_back(wrap(r.at("methods"), [&] { return parse_sweep_method(x.get<std::string>()); }));
      }
    }
    p.include_dense = r.boolean("include_dense", true);
    p.grid = grid();
    p.solver = solver();
    p.cutoff_radius = r.opt_number("cutoff_radius");
    p.recast = r.boolean("recast", false);
    if (p.recast && p.abscissa != Abscissa::coupling) Reader::fail(r.at("recast"), "only coupling sweeps can be recast");
    p.jobs = std::max<std::size_t>(1, r.count("jobs", 1));
    if (const json* f = r.find("fit")) {
      if (f->is_boolean()) {
        p.fit = f->get<bool>();
      } else {
        Reader fr(*f, r.at("fit"));
        p.fit_method = wrap(fr.at("method"), [&] { return parse_sweep_method(fr.string("method", "dense")); });
        p.fit_options.exclude_largest = fr.count("exclude_largest", 2);
        p.fit_options.window_min = fr.opt_number("window_min");
        p.fit_options.window_max = fr.opt_number("window_max");
        fr.finish();
      }
    }
    out = p;
    break;
  }
  case ScenarioKind::stability: {
    StabilityParams p;
    p.atoms = parse_atoms(r.require("atoms"), r.at("atoms"));
    p.n_max = static_cast<int>(r.integer("n_max", 0));
    if (p.n_max < 0) Reader::fail(r.at("n_max"), "expected a nonnegative integer");
    p.grid = grid();
    p.solver = solver();
    p.property_E = r.boolean("property_E", true);
    p.property_Eprime = r.boolean("property_Eprime", false);
    out = p;
    break;
  }
  case ScenarioKind::partition: {
    PartitionParams p;
    p.system = system();
    p.grid = grid();
    p.R = r.opt_number("R");
    p.random_samples = r.count("random_samples", p.random_samples);
    if (const json* g = r.find("gradient_radii")) p.gradient_radii = parse_numbers(*g, r.at("gradient_radii"));
    p.points_per_scale = r.count("points_per_scale", p.points_per_scale);
    out = p;
    break;
  }
  case ScenarioKind::combinatorics: {
    CombinatoricsParams p;
    p.Z = static_cast<int>(Reader::as_integer(r.require("Z"), r.at("Z")));
    if (p.Z < 1) Reader::fail(r.at("Z"), "expected Z >= 1");
    p.max_length = static_cast<int>(r.integer("max_length", p.Z * p.Z + 2));
    if (p.max_length < 1) Reader::fail(r.at("max_length"), "expected a positive length");
    p.witness_trials = r.count("witness_trials", 0);
    p.witness_max_size = r.count("witness_max_size", 8);
    if (p.witness_max_size < 1 || p.witness_max_size > 20)
      Reader::fail(r.at("witness_max_size"), "expected a size in [1, 20]");
    out = p;
    break;
  }
  }
  r.finish();
  return out;
}

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

bool safe_name(const std::string& s) {
  if (s.empty() || s.front() == '.') return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) return false;
  return true;
}

} // namespace

RunConfig parse_config(const std::string& text, const std::string& source) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    // e.byte is 1-based and points just past the offending character
    const auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    std::string what = e.what();
    if (const auto p = what.find("syntax error"); p != std::string::npos) what = what.substr(p);
    throw ParseError(source, line, col, what);
  }

  RunConfig cfg;
  Reader r(root, "");
  if (const json* s = r.find("seed")) {
    const long v = Reader::as_integer(*s, "seed");
    if (v < 0) Reader::fail("seed", "expected a nonnegative integer");
    cfg.seed = static_cast<std::uint64_t>(v);
  }
  const json& list = r.require("scenarios");
  if (!list.is_array()) Reader::fail("scenarios", "expected a list");
  std::set<std::string> names, outputs;
  for (std::size_t k = 0; k < list.size(); ++k) {
    const std::string path = "scenarios[" + std::to_string(k) + "]";
    Reader sr(list[k], path);
    Scenario s;
    s.name = sr.string("name", "");
    if (!safe_name(s.name)) Reader::fail(sr.at("name"), "expected a name of letters, digits, '_', '-' or '.'");
    if (!names.insert(s.name).second) Reader::fail(sr.at("name"), "duplicate scenario name '" + s.name + "'");
    const json& kind = sr.require("kind");
    if (!kind.is_string()) Reader::fail(sr.at("kind"), "expected a string");
    s.kind = parse_kind(kind.get<std::string>(), sr.at("kind"));
    s.output_path = sr.string("output", s.name + (s.kind == ScenarioKind::sweep ? ".csv" : ".json"));
    if (!safe_name(s.output_path)) Reader::fail(sr.at("output"), "expected a plain file name");
    if (s.output_path == "manifest.json" || !outputs.insert(s.output_path).second)
      Reader::fail(sr.at("output"), "output file '" + s.output_path + "' is already taken");
    if (s.kind == ScenarioKind::sweep) {
      const std::string side = std::filesystem::path(s.output_path).stem().string() + ".summary.json";
      if (!outputs.insert(side).second) Reader::fail(sr.at("output"), "summary file '" + side + "' is already taken");
    }
    const json* params = sr.find("parameters");
    const json empty = json::object();
    s.params = parse_params(s.kind, params ? *params : empty, sr.at("parameters"));
    sr.finish();
    cfg.scenarios.push_back(std::move(s));
  }
  r.finish();
  if (cfg.seed) apply_seed(cfg, *cfg.seed);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

void apply_seed(RunConfig& cfg, std::uint64_t seed) {
  cfg.seed = seed;
  for (auto& s : cfg.scenarios)
    std::visit(
        [&](auto& p) {
          if constexpr (requires { p.solver; }) p.solver.seed = seed;
          if constexpr (requires { p.seed; }) p.seed = seed;
        },
        s.params);
}

} // namespace vdw::cli
