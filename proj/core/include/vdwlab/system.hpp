#pragma once

#include "vdwlab/grid.hpp"

#include <optional>
#include <string>
#include <vector>

namespace vdw {

enum class PotentialKind {
  coulomb3d,     ///< -Z/|x - y|; radial s-wave grids or 3D cartesian grids
  softcoulomb1d, ///< -Z/sqrt((x - y)^2 + a^2) on a line
  well1d,        ///< Drude atom: strength * (x - y)^2 on a line
  harmonic3d     ///< Drude atom in 3D: sum_c strength_c * (x - y)_c^2
};

enum class InteractionKind {
  coulomb,     ///< pairs with coulomb3d atoms
  softcoulomb, ///< pairs with softcoulomb1d atoms
  dipole       ///< pairs with well1d / harmonic3d atoms (distinguishable electrons)
};

std::string to_string(PotentialKind k);
std::string to_string(InteractionKind k);
PotentialKind parse_potential_kind(const std::string& s);
InteractionKind parse_interaction_kind(const std::string& s);

/// The interaction family a potential kind belongs to.
InteractionKind family_of(PotentialKind k);

struct AtomSpec {
  int charge_Z = 1;
  PotentialKind kind = PotentialKind::well1d;
  Vec3 position{0.0, 0.0, 0.0};
  double softening = 1.0;
  /// Well curvature omega^2; well1d uses the first component.
  Vec3 strength{1.0, 1.0, 1.0};

  void validate() const;
  /// Spatial dimension of one electron coordinate for this atom kind.
  int spatial_dim() const;

  static AtomSpec well1d(double position, double strength = 1.0);
  static AtomSpec harmonic3d(Vec3 position, Vec3 strength = {1.0, 1.0, 1.0});
  static AtomSpec softcoulomb1d(int z, double position, double softening = 1.0);
  static AtomSpec coulomb3d(int z, Vec3 position = {0.0, 0.0, 0.0});
};

struct SystemConfig {
  std::vector<AtomSpec> atoms;
  int electron_count = 0;
  InteractionKind pair_interaction = InteractionKind::dipole;
  /// Drude coupling lambda; defaults to 1/R^3 for dipole systems.
  std::optional<double> dipole_coupling;

  /// Neutral system of the given atoms (N = sum Z).
  static SystemConfig neutral(std::vector<AtomSpec> atoms, InteractionKind kind);

  void validate() const;
  std::size_t atom_count() const noexcept { return atoms.size(); }
  int total_charge() const;
  bool is_neutral() const { return total_charge() == electron_count; }
  /// Minimum distance between distinct nuclei (infinity for a single atom).
  double separation_R() const;
  double coupling() const;
  double softening() const;
};

/// Assignment of electrons 0..N-1 to atoms 0..M-1. Clusters may be empty.
struct Decomposition {
  std::vector<std::vector<std::size_t>> clusters;

  /// Electrons assigned in order: first Z_0 to atom 0, next Z_1 to atom 1, ...
  static Decomposition canonical(const SystemConfig& cfg);

  void validate(std::size_t electrons, std::size_t atoms) const;
  bool is_atomic(const SystemConfig& cfg) const;
  std::size_t cluster_of(std::size_t electron) const;
  /// Electrons listed cluster by cluster, each cluster in increasing order.
  std::vector<std::size_t> flattened() const;
  bool operator==(const Decomposition&) const = default;
};

/// All atomic decompositions (cluster sizes equal to the nuclear charges);
/// the canonical one comes first.
std::vector<Decomposition> atomic_decompositions(const SystemConfig& cfg);

/// All decompositions of N electrons into M (possibly empty) clusters.
std::vector<Decomposition> all_decompositions(std::size_t electrons, std::size_t atoms);

/// Sign of the unique permutation mapping the clusters of `a` onto those of
/// `b` with an increasing map on each cluster.
int relative_sign(const Decomposition& b, const Decomposition& a);

} // namespace vdw
