#include "vdwlab/system.hpp"

#include "vdwlab/error.hpp"
#include "vdwlab/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vdw {

std::string to_string(PotentialKind k) {
  switch (k) {
  case PotentialKind::coulomb3d: return "coulomb3d";
  case PotentialKind::softcoulomb1d: return "softcoulomb1d";
  case PotentialKind::well1d: return "well1d";
  case PotentialKind::harmonic3d: return "harmonic3d";
  }
  return "unknown";
}

std::string to_string(InteractionKind k) {
  switch (k) {
  case InteractionKind::coulomb: return "coulomb";
  case InteractionKind::softcoulomb: return "softcoulomb";
  case InteractionKind::dipole: return "dipole";
  }
  return "unknown";
}

PotentialKind parse_potential_kind(const std::string& s) {
  for (auto k : {PotentialKind::coulomb3d, PotentialKind::softcoulomb1d, PotentialKind::well1d,
                 PotentialKind::harmonic3d})
    if (to_string(k) == s) return k;
  throw ConfigError("unknown potential kind '" + s + "'");
}

InteractionKind parse_interaction_kind(const std::string& s) {
  for (auto k : {InteractionKind::coulomb, InteractionKind::softcoulomb, InteractionKind::dipole})
    if (to_string(k) == s) return k;
  throw ConfigError("unknown pair interaction kind '" + s + "'");
}

InteractionKind family_of(PotentialKind k) {
  switch (k) {
  case PotentialKind::coulomb3d: return InteractionKind::coulomb;
  case PotentialKind::softcoulomb1d: return InteractionKind::softcoulomb;
  case PotentialKind::well1d:
  case PotentialKind::harmonic3d: return InteractionKind::dipole;
  }
  return InteractionKind::dipole;
}

void AtomSpec::validate() const {
  if (charge_Z < 1) throw ConfigError("atom: charge_Z must be >= 1");
  if (kind == PotentialKind::softcoulomb1d && !(softening > 0.0))
    throw ConfigError("atom: softening length must be positive");
  if (kind == PotentialKind::well1d && !(strength[0] > 0.0))
    throw ConfigError("atom: well strength must be positive");
  if (kind == PotentialKind::harmonic3d &&
      !(strength[0] > 0.0 && strength[1] > 0.0 && strength[2] > 0.0))
    throw ConfigError("atom: harmonic strengths must be positive");
}

int AtomSpec::spatial_dim() const {
  return (kind == PotentialKind::softcoulomb1d || kind == PotentialKind::well1d) ? 1 : 3;
}

AtomSpec AtomSpec::well1d(double position, double strength) {
  AtomSpec a;
  a.kind = PotentialKind::well1d;
  a.position = {position, 0.0, 0.0};
  a.strength = {strength, strength, strength};
  return a;
}

AtomSpec AtomSpec::harmonic3d(Vec3 position, Vec3 strength) {
  AtomSpec a;
  a.kind = PotentialKind::harmonic3d;
  a.position = position;
  a.strength = strength;
  return a;
}

AtomSpec AtomSpec::softcoulomb1d(int z, double position, double softening) {
  AtomSpec a;
  a.charge_Z = z;
  a.kind = PotentialKind::softcoulomb1d;
  a.position = {position, 0.0, 0.0};
  a.softening = softening;
  return a;
}

AtomSpec AtomSpec::coulomb3d(int z, Vec3 position) {
  AtomSpec a;
  a.charge_Z = z;
  a.kind = PotentialKind::coulomb3d;
  a.position = position;
  return a;
}

SystemConfig SystemConfig::neutral(std::vector<AtomSpec> atoms, InteractionKind kind) {
  SystemConfig cfg;
  cfg.atoms = std::move(atoms);
  cfg.pair_interaction = kind;
  cfg.electron_count = cfg.total_charge();
  return cfg;
}

void SystemConfig::validate() const {
  if (atoms.empty()) throw ConfigError("system: at least one atom required");
  if (electron_count < 0) throw ConfigError("system: electron_count must be >= 0");
  for (const auto& a : atoms) {
    a.validate();
    if (family_of(a.kind) != pair_interaction)
      throw ConfigError("system: atom kind " + to_string(a.kind) +
                        " does not match pair interaction " + to_string(pair_interaction));
    if (a.kind != atoms.front().kind)
      throw ConfigError("system: all atoms must share one potential kind");
    if (a.kind == PotentialKind::softcoulomb1d && a.softening != atoms.front().softening)
      throw ConfigError("system: soft-Coulomb atoms must share one softening length");
  }
  if (pair_interaction == InteractionKind::dipole && electron_count != total_charge())
    throw ConfigError("system: Drude models are neutral (electron_count = sum Z)");
}

int SystemConfig::total_charge() const {
  int z = 0;
  for (const auto& a : atoms) z += a.charge_Z;
  return z;
}

double SystemConfig::separation_R() const {
  double r = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < atoms.size(); ++i)
    for (std::size_t j = i + 1; j < atoms.size(); ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < 3; ++c) {
        const double d = atoms[i].position[c] - atoms[j].position[c];
        s += d * d;
      }
      r = std::min(r, std::sqrt(s));
    }
  return r;
}

double SystemConfig::coupling() const {
  if (dipole_coupling) return *dipole_coupling;
  const double r = separation_R();
  return std::isfinite(r) ? 1.0 / (r * r * r) : 0.0;
}

double SystemConfig::softening() const { return atoms.empty() ? 1.0 : atoms.front().softening; }

Decomposition Decomposition::canonical(const SystemConfig& cfg) {
  Decomposition d;
  d.clusters.resize(cfg.atoms.size());
  std::size_t e = 0;
  const auto n = static_cast<std::size_t>(cfg.electron_count);
  for (std::size_t i = 0; i < cfg.atoms.size(); ++i)
    for (int k = 0; k < cfg.atoms[i].charge_Z && e < n; ++k) d.clusters[i].push_back(e++);
  // surplus electrons (anions) go to the last atom
  while (e < n) d.clusters.back().push_back(e++);
  return d;
}

void Decomposition::validate(std::size_t electrons, std::size_t atoms) const {
  if (clusters.size() != atoms)
    throw PreconditionError("decomposition: one cluster per atom required");
  std::vector<int> seen(electrons, 0);
  for (const auto& c : clusters)
    for (std::size_t e : c) {
      if (e >= electrons) throw PreconditionError("decomposition: electron index out of range");
      if (seen[e]++) throw PreconditionError("decomposition: clusters overlap");
    }
  if (std::count(seen.begin(), seen.end(), 0) != 0)
    throw PreconditionError("decomposition: clusters do not cover all electrons");
}

bool Decomposition::is_atomic(const SystemConfig& cfg) const {
  if (clusters.size() != cfg.atoms.size()) return false;
  for (std::size_t i = 0; i < clusters.size(); ++i)
    if (clusters[i].size() != static_cast<std::size_t>(cfg.atoms[i].charge_Z)) return false;
  return true;
}

std::size_t Decomposition::cluster_of(std::size_t electron) const {
  for (std::size_t i = 0; i < clusters.size(); ++i)
    if (std::find(clusters[i].begin(), clusters[i].end(), electron) != clusters[i].end()) return i;
  throw PreconditionError("decomposition: electron not assigned");
}

std::vector<std::size_t> Decomposition::flattened() const {
  std::vector<std::size_t> out;
  for (auto c : clusters) {
    std::sort(c.begin(), c.end());
    out.insert(out.end(), c.begin(), c.end());
  }
  return out;
}

namespace {

void enumerate(std::size_t electron, std::size_t electrons, const std::vector<std::size_t>* sizes,
               Decomposition& cur, std::vector<Decomposition>& out) {
  if (electron == electrons) {
    if (sizes) {
      for (std::size_t i = 0; i < cur.clusters.size(); ++i)
        if (cur.clusters[i].size() != (*sizes)[i]) return;
    }
    out.push_back(cur);
    return;
  }
  for (std::size_t i = 0; i < cur.clusters.size(); ++i) {
    if (sizes && cur.clusters[i].size() >= (*sizes)[i]) continue;
    cur.clusters[i].push_back(electron);
    enumerate(electron + 1, electrons, sizes, cur, out);
    cur.clusters[i].pop_back();
  }
}

} // namespace

std::vector<Decomposition> atomic_decompositions(const SystemConfig& cfg) {
  if (!cfg.is_neutral()) throw PreconditionError("atomic decompositions need a neutral system");
  std::vector<std::size_t> sizes;
  for (const auto& a : cfg.atoms) sizes.push_back(static_cast<std::size_t>(a.charge_Z));
  Decomposition cur;
  cur.clusters.resize(cfg.atoms.size());
  std::vector<Decomposition> out;
  enumerate(0, static_cast<std::size_t>(cfg.electron_count), &sizes, cur, out);
  const Decomposition canon = Decomposition::canonical(cfg);
  auto it = std::find(out.begin(), out.end(), canon);
  if (it != out.end()) std::iter_swap(out.begin(), it);
  return out;
}

std::vector<Decomposition> all_decompositions(std::size_t electrons, std::size_t atoms) {
  Decomposition cur;
  cur.clusters.resize(atoms);
  std::vector<Decomposition> out;
  enumerate(0, electrons, nullptr, cur, out);
  return out;
}

int relative_sign(const Decomposition& b, const Decomposition& a) {
  const auto fa = a.flattened();
  const auto fb = b.flattened();
  if (fa.size() != fb.size()) throw PreconditionError("relative_sign: size mismatch");
  for (std::size_t i = 0; i < a.clusters.size(); ++i)
    if (a.clusters[i].size() != b.clusters.at(i).size())
      throw PreconditionError("relative_sign: cluster sizes differ");
  Permutation pi(fa.size());
  for (std::size_t k = 0; k < fa.size(); ++k) pi[fa[k]] = fb[k];
  return permutation_sign(pi);
}

} // namespace vdw
