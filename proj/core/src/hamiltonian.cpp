#include "vdwlab/hamiltonian.hpp"

#include "vdwlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace vdw {

namespace {

double distance(const Vec3& a, const Vec3& b) {
  double s = 0.0;
  for (std::size_t c = 0; c < 3; ++c) s += (a[c] - b[c]) * (a[c] - b[c]);
  return std::sqrt(s);
}

Vec3 minus(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

void check_grid_for(const SystemConfig& cfg, const GridSpec& grid) {
  cfg.validate();
  grid.validate();
  const AtomSpec& a = cfg.atoms.front();
  if (a.kind == PotentialKind::coulomb3d) {
    if (grid.geometry == Geometry::radial) {
      if (cfg.atoms.size() > 1 && cfg.electron_count > 0)
        throw ConfigError("radial s-wave grids describe a single nucleus");
    } else if (grid.dim_per_particle != 3) {
      throw ConfigError("coulomb3d atoms need a radial grid or a 3D cartesian grid");
    }
    return;
  }
  if (grid.geometry == Geometry::radial)
    throw ConfigError("radial grids are only available for coulomb3d atoms");
  if (grid.dim_per_particle != a.spatial_dim())
    throw ConfigError("grid dimension " + std::to_string(grid.dim_per_particle) +
                      " does not match atom kind " + to_string(a.kind));
}

/// Builds potential terms for the various operator pieces. Electrons are
/// addressed by their global index and mapped to grid slots through `slot`.
class TermBuilder {
public:
  TermBuilder(const SystemConfig& cfg, const GridSpec& grid) : cfg_(cfg), grid_(grid) {
    radial_ = grid.geometry == Geometry::radial;
    h_ = grid.spacing();
  }

  std::function<double(const Vec3&)> attraction(std::size_t atom_index) const {
    const AtomSpec a = cfg_.atoms[atom_index];
    const double z = a.charge_Z;
    const double h = h_;
    switch (a.kind) {
    case PotentialKind::coulomb3d:
      if (radial_) return [z](const Vec3& x) { return -z / x[0]; };
      return [z, h, y = a.position](const Vec3& x) {
        return -z / std::max(distance(x, y), 0.5 * h);
      };
    case PotentialKind::softcoulomb1d:
      return [z, s = a.softening, y = a.position[0]](const Vec3& x) {
        const double d = x[0] - y;
        return -z / std::sqrt(d * d + s * s);
      };
    case PotentialKind::well1d:
      return [w = a.strength[0], y = a.position[0]](const Vec3& x) {
        const double d = x[0] - y;
        return w * d * d;
      };
    case PotentialKind::harmonic3d:
      return [w = a.strength, y = a.position](const Vec3& x) {
        double v = 0.0;
        for (std::size_t c = 0; c < 3; ++c) v += w[c] * (x[c] - y[c]) * (x[c] - y[c]);
        return v;
      };
    }
    return {};
  }

  /// Interaction between nucleus j and an electron of another cluster.
  std::function<double(const Vec3&)> foreign_attraction(std::size_t atom_index) const {
    return attraction(atom_index);
  }

  /// Electron-electron repulsion (Coulomb families only).
  std::function<double(const Vec3&, const Vec3&)> repulsion() const {
    const double h = h_;
    switch (cfg_.pair_interaction) {
    case InteractionKind::coulomb:
      if (radial_) return [](const Vec3& x, const Vec3& y) { return 1.0 / std::max(x[0], y[0]); };
      return [h](const Vec3& x, const Vec3& y) { return 1.0 / std::max(distance(x, y), 0.5 * h); };
    case InteractionKind::softcoulomb:
      return [s = cfg_.softening()](const Vec3& x, const Vec3& y) {
        const double d = x[0] - y[0];
        return 1.0 / std::sqrt(d * d + s * s);
      };
    case InteractionKind::dipole: return {};
    }
    return {};
  }

  double nuclear_repulsion(std::size_t i, std::size_t j) const {
    if (cfg_.pair_interaction == InteractionKind::dipole) return 0.0;
    const double r = distance(cfg_.atoms[i].position, cfg_.atoms[j].position);
    if (!(r > 0.0)) throw ConfigError("two nuclei occupy the same position");
    const double zz = static_cast<double>(cfg_.atoms[i].charge_Z) * cfg_.atoms[j].charge_Z;
    return zz * pair_potential(cfg_.pair_interaction, r, cfg_.softening(), 0.0);
  }

  /// Drude coupling between an electron of atom i and one of atom j.
  std::function<double(const Vec3&, const Vec3&)> dipole(std::size_t i, std::size_t j) const {
    const double lambda = cfg_.coupling();
    const Vec3 yi = cfg_.atoms[i].position;
    const Vec3 yj = cfg_.atoms[j].position;
    if (cfg_.atoms[i].spatial_dim() == 1)
      return [lambda, yi, yj](const Vec3& x, const Vec3& x2) {
        return lambda * (x[0] - yi[0]) * (x2[0] - yj[0]);
      };
    Vec3 u = minus(yi, yj);
    const double n = std::sqrt(dot(u, u));
    if (!(n > 0.0)) throw ConfigError("two nuclei occupy the same position");
    for (double& c : u) c /= n;
    return [lambda, yi, yj, u](const Vec3& x, const Vec3& x2) {
      const Vec3 zl = minus(x, yi);
      const Vec3 zm = minus(x2, yj);
      return lambda * (dot(zl, zm) - 3.0 * dot(zl, u) * dot(zm, u));
    };
  }

  /// Cluster Hamiltonian terms (attraction to own nucleus, intra repulsion)
  /// for cluster i, electrons mapped to grid slots by `slot`.
  void add_cluster(PotentialTerms& t, const Decomposition& a, std::size_t i,
                   const std::function<std::size_t(std::size_t)>& slot) const {
    const auto& c = a.clusters[i];
    for (std::size_t e : c) add_one_body(t, slot(e), attraction(i));
    if (auto w = repulsion())
      for (std::size_t x = 0; x < c.size(); ++x)
        for (std::size_t y = x + 1; y < c.size(); ++y) t.pairs.push_back({slot(c[x]), slot(c[y]), w});
  }

  /// Inter-cluster terms between clusters i < j.
  void add_interaction(PotentialTerms& t, const Decomposition& a, std::size_t i, std::size_t j,
                       const std::function<std::size_t(std::size_t)>& slot) const {
    const auto& ci = a.clusters[i];
    const auto& cj = a.clusters[j];
    if (cfg_.pair_interaction == InteractionKind::dipole) {
      auto d = dipole(i, j);
      for (std::size_t l : ci)
        for (std::size_t m : cj) t.pairs.push_back({slot(l), slot(m), d});
      return;
    }
    for (std::size_t l : ci) add_one_body(t, slot(l), foreign_attraction(j));
    for (std::size_t m : cj) add_one_body(t, slot(m), foreign_attraction(i));
    auto w = repulsion();
    for (std::size_t l : ci)
      for (std::size_t m : cj) t.pairs.push_back({slot(l), slot(m), w});
    t.constant += nuclear_repulsion(i, j);
  }

private:
  static void add_one_body(PotentialTerms& t, std::size_t s, std::function<double(const Vec3&)> f) {
    auto& cur = t.one_body[s];
    if (!cur) {
      cur = std::move(f);
      return;
    }
    cur = [g = cur, f = std::move(f)](const Vec3& x) { return g(x) + f(x); };
  }

  const SystemConfig& cfg_;
  GridSpec grid_;
  bool radial_ = false;
  double h_ = 1.0;
};

std::size_t identity_slot(std::size_t e) { return e; }

PotentialTerms empty_terms(const TensorGrid& g) {
  PotentialTerms t;
  t.one_body.resize(g.particles());
  return t;
}

} // namespace

double pair_potential(InteractionKind kind, double r, double softening, double spacing) {
  switch (kind) {
  case InteractionKind::coulomb: return 1.0 / std::max(r, 0.5 * spacing);
  case InteractionKind::softcoulomb: return 1.0 / std::sqrt(r * r + softening * softening);
  case InteractionKind::dipole: return 0.0;
  }
  return 0.0;
}

std::vector<double> assemble_potential(const TensorGrid& grid, const PotentialTerms& terms) {
  const std::size_t np = grid.particles();
  const std::size_t m = grid.local_size();
  std::vector<std::vector<double>> one(np);
  for (std::size_t p = 0; p < np; ++p) {
    if (p >= terms.one_body.size() || !terms.one_body[p]) continue;
    one[p].resize(m);
    for (std::size_t k = 0; k < m; ++k) one[p][k] = terms.one_body[p](grid.position(p, k));
  }
  std::vector<std::vector<double>> pair(terms.pairs.size());
  for (std::size_t t = 0; t < terms.pairs.size(); ++t) {
    const auto& pr = terms.pairs[t];
    if (!pr.w) continue;
    pair[t].resize(m * m);
    for (std::size_t a = 0; a < m; ++a) {
      const Vec3 xa = grid.position(pr.p, a);
      for (std::size_t b = 0; b < m; ++b) pair[t][a * m + b] = pr.w(xa, grid.position(pr.q, b));
    }
  }

  std::vector<double> v(grid.size(), terms.constant);
  std::vector<std::size_t> local(np, 0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    double s = terms.constant;
    for (std::size_t p = 0; p < np; ++p)
      if (!one[p].empty()) s += one[p][local[p]];
    for (std::size_t t = 0; t < pair.size(); ++t)
      if (!pair[t].empty()) s += pair[t][local[terms.pairs[t].p] * m + local[terms.pairs[t].q]];
    v[i] = s;
    for (std::size_t p = np; p-- > 0;) {
      if (++local[p] < m) break;
      local[p] = 0;
    }
  }
  return v;
}

void add_kinetic(const TensorGrid& grid, std::span<const double> in, std::span<double> out,
                 double scale) {
  const std::size_t n = grid.points_per_axis();
  const double h = grid.spec().spacing();
  const double c = scale / (h * h);
  const std::size_t size = grid.size();
  for (std::size_t axis = 0; axis < grid.axes(); ++axis) {
    const std::size_t s = grid.stride(axis);
    const std::size_t block = s * n;
    for (std::size_t base = 0; base < size; base += block) {
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t row = base + i * s;
        const double* cur = in.data() + row;
        const double* lo = i > 0 ? cur - s : nullptr;
        const double* hi = i + 1 < n ? cur + s : nullptr;
        double* o = out.data() + row;
        for (std::size_t j = 0; j < s; ++j) {
          double v = 2.0 * cur[j];
          if (lo) v -= lo[j];
          if (hi) v -= hi[j];
          o[j] += c * v;
        }
      }
    }
  }
}

LinearOperator grid_hamiltonian(const TensorGrid& grid, std::vector<double> potential,
                                std::string descriptor) {
  if (grid.particles() == 0)
    return LinearOperator::diagonal(grid, std::move(potential), std::move(descriptor));
  auto v = std::make_shared<const std::vector<double>>(std::move(potential));
  return LinearOperator(
      grid,
      [grid, v](std::span<const double> in, std::span<double> out) {
        const auto& pot = *v;
        for (std::size_t i = 0; i < pot.size(); ++i) out[i] = pot[i] * in[i];
        add_kinetic(grid, in, out);
      },
      std::move(descriptor));
}

TensorGrid system_grid(const SystemConfig& cfg, const GridSpec& grid) {
  check_grid_for(cfg, grid);
  const auto n = static_cast<std::size_t>(cfg.electron_count);
  std::vector<Vec3> origins(n, Vec3{0.0, 0.0, 0.0});
  if (cfg.pair_interaction == InteractionKind::dipole) {
    const Decomposition a0 = Decomposition::canonical(cfg);
    for (std::size_t i = 0; i < a0.clusters.size(); ++i)
      for (std::size_t e : a0.clusters[i]) origins[e] = cfg.atoms[i].position;
  }
  return TensorGrid(grid, n, std::move(origins));
}

TensorGrid cluster_grid(const SystemConfig& cfg, const Decomposition& a, std::size_t i,
                        const GridSpec& grid) {
  check_grid_for(cfg, grid);
  const Vec3 o = cfg.pair_interaction == InteractionKind::dipole ? cfg.atoms.at(i).position
                                                                 : Vec3{0.0, 0.0, 0.0};
  return TensorGrid(grid, a.clusters.at(i).size(), std::vector<Vec3>(a.clusters[i].size(), o));
}

LinearOperator build_full_hamiltonian(const SystemConfig& cfg, const GridSpec& grid) {
  const TensorGrid g = system_grid(cfg, grid);
  TermBuilder tb(cfg, grid);
  PotentialTerms t = empty_terms(g);
  const std::size_t n = g.particles();
  if (cfg.pair_interaction == InteractionKind::dipole) {
    const Decomposition a0 = Decomposition::canonical(cfg);
    for (std::size_t i = 0; i < cfg.atoms.size(); ++i) tb.add_cluster(t, a0, i, identity_slot);
    for (std::size_t i = 0; i < cfg.atoms.size(); ++i)
      for (std::size_t j = i + 1; j < cfg.atoms.size(); ++j)
        tb.add_interaction(t, a0, i, j, identity_slot);
  } else {
    std::vector<std::function<double(const Vec3&)>> nuclei;
    for (std::size_t j = 0; j < cfg.atoms.size(); ++j) nuclei.push_back(tb.attraction(j));
    for (std::size_t e = 0; e < n; ++e)
      t.one_body[e] = [nuclei](const Vec3& x) {
        double s = 0.0;
        for (const auto& f : nuclei) s += f(x);
        return s;
      };
    auto w = tb.repulsion();
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) t.pairs.push_back({p, q, w});
    for (std::size_t i = 0; i < cfg.atoms.size(); ++i)
      for (std::size_t j = i + 1; j < cfg.atoms.size(); ++j) t.constant += tb.nuclear_repulsion(i, j);
  }
  return grid_hamiltonian(g, assemble_potential(g, t),
                          "H[N=" + std::to_string(n) + ", M=" + std::to_string(cfg.atoms.size()) +
                              ", " + to_string(cfg.pair_interaction) + "]");
}

LinearOperator build_cluster_hamiltonian(const SystemConfig& cfg, const Decomposition& a,
                                         std::size_t i, const GridSpec& grid) {
  a.validate(static_cast<std::size_t>(cfg.electron_count), cfg.atoms.size());
  if (i >= cfg.atoms.size()) throw PreconditionError("cluster index out of range");
  const TensorGrid g = cluster_grid(cfg, a, i, grid);
  std::vector<std::size_t> sorted = a.clusters[i];
  std::sort(sorted.begin(), sorted.end());
  Decomposition local;
  local.clusters.resize(cfg.atoms.size());
  for (std::size_t k = 0; k < sorted.size(); ++k) local.clusters[i].push_back(k);
  TermBuilder tb(cfg, grid);
  PotentialTerms t = empty_terms(g);
  tb.add_cluster(t, local, i, identity_slot);
  return grid_hamiltonian(g, assemble_potential(g, t),
                          "H_A" + std::to_string(i) + "[" + std::to_string(sorted.size()) + "e]");
}

LinearOperator build_decomposed_hamiltonian(const SystemConfig& cfg, const Decomposition& a,
                                            const GridSpec& grid) {
  a.validate(static_cast<std::size_t>(cfg.electron_count), cfg.atoms.size());
  const TensorGrid g = system_grid(cfg, grid);
  TermBuilder tb(cfg, grid);
  PotentialTerms t = empty_terms(g);
  for (std::size_t i = 0; i < cfg.atoms.size(); ++i) tb.add_cluster(t, a, i, identity_slot);
  return grid_hamiltonian(g, assemble_potential(g, t), "H_a");
}

LinearOperator build_interaction(const SystemConfig& cfg, const Decomposition& a,
                                 const GridSpec& grid) {
  a.validate(static_cast<std::size_t>(cfg.electron_count), cfg.atoms.size());
  const TensorGrid g = system_grid(cfg, grid);
  TermBuilder tb(cfg, grid);
  PotentialTerms t = empty_terms(g);
  for (std::size_t i = 0; i < cfg.atoms.size(); ++i)
    for (std::size_t j = i + 1; j < cfg.atoms.size(); ++j) tb.add_interaction(t, a, i, j, identity_slot);
  return LinearOperator::diagonal(g, assemble_potential(g, t), "I_a");
}

LinearOperator build_pair_interaction(const SystemConfig& cfg, const Decomposition& a,
                                      std::size_t k, std::size_t l, const GridSpec& grid) {
  a.validate(static_cast<std::size_t>(cfg.electron_count), cfg.atoms.size());
  if (k == l || k >= cfg.atoms.size() || l >= cfg.atoms.size())
    throw PreconditionError("pair interaction needs two distinct clusters");
  const TensorGrid g = system_grid(cfg, grid);
  TermBuilder tb(cfg, grid);
  PotentialTerms t = empty_terms(g);
  tb.add_interaction(t, a, std::min(k, l), std::max(k, l), identity_slot);
  return LinearOperator::diagonal(g, assemble_potential(g, t),
                                  "I_" + std::to_string(k) + std::to_string(l));
}

LinearOperator build_ion_hamiltonian(const AtomSpec& atom, int electrons, const GridSpec& grid) {
  if (electrons < 0) throw PreconditionError("ion: negative electron count");
  SystemConfig cfg;
  AtomSpec centred = atom;
  centred.position = {0.0, 0.0, 0.0};
  cfg.atoms = {centred};
  cfg.pair_interaction = family_of(atom.kind);
  cfg.electron_count = electrons;
  if (cfg.pair_interaction == InteractionKind::dipole && electrons != atom.charge_Z) {
    // Drude ions: independent oscillators, no electron-electron term
    cfg.atoms.front().charge_Z = std::max(electrons, 1);
    if (electrons == 0) return LinearOperator::zero(TensorGrid(grid, 0));
  }
  Decomposition a;
  a.clusters.resize(1);
  for (int e = 0; e < electrons; ++e) a.clusters[0].push_back(static_cast<std::size_t>(e));
  return build_cluster_hamiltonian(cfg, a, 0, grid);
}

} // namespace vdw
