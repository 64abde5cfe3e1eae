#include "vdwlab/dispersion.hpp"

#include "vdwlab/cutoff.hpp"
#include "vdwlab/error.hpp"
#include "vdwlab/hamiltonian.hpp"
#include "vdwlab/symmetry.hpp"

#include <algorithm>
#include <cmath>

namespace vdw {

void DipoleCoupling::validate() const {
  if (dim != 1 && dim != 3) throw PreconditionError("dipole coupling: dimension must be 1 or 3");
  if (left_count == 0 || right_count == 0) throw PreconditionError("dipole coupling: empty atom");
  if (dim == 3) {
    const double n = std::sqrt(direction_v[0] * direction_v[0] + direction_v[1] * direction_v[1] +
                               direction_v[2] * direction_v[2]);
    if (std::abs(n - 1.0) > 1e-12) throw PreconditionError("dipole coupling: direction is not a unit vector");
  }
}

double DipoleCoupling::operator()(std::span<const Vec3> z) const {
  double f = 0.0;
  const Vec3& v = direction_v;
  for (std::size_t l = 0; l < left_count; ++l)
    for (std::size_t m = left_count; m < left_count + right_count; ++m) {
      if (dim == 1) {
        f += z[l][0] * z[m][0];
        continue;
      }
      const double zz = z[l][0] * z[m][0] + z[l][1] * z[m][1] + z[l][2] * z[m][2];
      const double lv = z[l][0] * v[0] + z[l][1] * v[1] + z[l][2] * v[2];
      const double mv = z[m][0] * v[0] + z[m][1] * v[1] + z[m][2] * v[2];
      f += zz - 3.0 * lv * mv;
    }
  return f;
}

WaveFunction dipole_coupling_apply(const DipoleCoupling& coupling, const WaveFunction& psi) {
  coupling.validate();
  const TensorGrid& g = psi.grid();
  if (g.particles() != coupling.left_count + coupling.right_count || g.dim() != coupling.dim ||
      g.spec().geometry != Geometry::cartesian)
    throw PreconditionError("dipole coupling: wave function lives on the wrong grid");
  const std::size_t np = g.particles();
  const std::size_t m = g.local_size();
  std::vector<Vec3> local(m);
  for (std::size_t k = 0; k < m; ++k) local[k] = g.displacement(k);
  WaveFunction out = psi;
  auto c = out.mutable_coefficients();
  std::vector<std::size_t> idx(np, 0);
  std::vector<Vec3> z(np);
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (std::size_t p = 0; p < np; ++p) z[p] = local[idx[p]];
    c[i] *= coupling(z);
    for (std::size_t p = np; p-- > 0;) {
      if (++idx[p] < m) break;
      idx[p] = 0;
    }
  }
  return out;
}

AtomState atom_ground_state(const AtomSpec& atom, const GridSpec& grid, const SolverSettings& settings) {
  atom.validate();
  AtomState st;
  st.hamiltonian = build_ion_hamiltonian(atom, atom.charge_Z, grid);
  SolverSettings s = settings;
  if (family_of(atom.kind) != InteractionKind::dipole && atom.charge_Z > 1) {
    const TensorGrid g = st.hamiltonian.domain();
    st.sector = [g](std::span<double> c) { antisymmetrize_in_place(g, c); };
  }
  s.sector = st.sector;
  st.spectrum = low_spectrum(st.hamiltonian, 2, s);
  st.gap = st.spectrum.eigenvalues[1] - st.spectrum.eigenvalues[0];
  return st;
}

namespace {

// Applies the per-atom sector projectors to a pair coefficient array laid
// out as [left block][right block].
SectorProjector pair_sector(const AtomState& a, const AtomState& b) {
  if (!a.sector && !b.sector) return {};
  const std::size_t na = a.hamiltonian.size();
  const std::size_t nb = b.hamiltonian.size();
  return [sa = a.sector, sb = b.sector, na, nb](std::span<double> c) {
    if (sb)
      for (std::size_t i = 0; i < na; ++i) sb(c.subspan(i * nb, nb));
    if (sa) {
      std::vector<double> col(na);
      for (std::size_t j = 0; j < nb; ++j) {
        for (std::size_t i = 0; i < na; ++i) col[i] = c[i * nb + j];
        sa(col);
        for (std::size_t i = 0; i < na; ++i) c[i * nb + j] = col[i];
      }
    }
  };
}

WaveFunction cut_off(const WaveFunction& phi, double R) {
  const SmoothCutoff chi(R);
  const TensorGrid& g = phi.grid();
  WaveFunction mask = WaveFunction::sample(g, [&](std::span<const Vec3> x) {
    double v = 1.0;
    for (std::size_t p = 0; p < x.size(); ++p) {
      Vec3 z{x[p][0] - g.origin(p)[0], x[p][1] - g.origin(p)[1], x[p][2] - g.origin(p)[2]};
      if (g.spec().geometry == Geometry::radial) z = {x[p][0], 0.0, 0.0};
      v *= chi(std::sqrt(z[0] * z[0] + z[1] * z[1] + z[2] * z[2]));
    }
    return v;
  });
  WaveFunction out = pointwise_product(phi, mask);
  if (out.norm() < 0.5) throw PreconditionError("cutoff removes more than half of the state: R too small");
  out.normalize();
  return out;
}

struct SigmaValue {
  double sigma;
  double residual;
  int iterations;
};

SigmaValue sigma_from_states(const LinearOperator& pair_h, const WaveFunction& phi, double lambda,
                             const DipoleCoupling& f, const SolverSettings& s) {
  WaveFunction b = dipole_coupling_apply(f, phi);
  project_out(b, phi);
  const auto r = projected_resolvent_solve(pair_h, phi, lambda, b, s);
  return {inner(b, r.solution), r.relative_residual, r.iterations};
}

struct PairSetup {
  AtomState ai, aj;
  LinearOperator h;
  WaveFunction phi;
  SolverSettings s;
  DipoleCoupling f;
};

PairSetup prepare(const AtomSpec& atom_i, const AtomSpec& atom_j, const GridSpec& grid,
                  const SolverSettings& settings, const SigmaOptions& opt) {
  if (family_of(atom_i.kind) != family_of(atom_j.kind) || atom_i.spatial_dim() != atom_j.spatial_dim())
    throw PreconditionError("sigma: the two atoms belong to different model families");
  if (grid.geometry != Geometry::cartesian)
    throw PreconditionError("sigma: needs a cartesian grid (the coupling is angular)");
  PairSetup p;
  p.ai = atom_ground_state(atom_i, grid, settings);
  p.aj = atom_ground_state(atom_j, grid, settings);
  const double gap = std::min(p.ai.gap, p.aj.gap);
  if (!(gap > opt.min_gap))
    throw DegeneracyError("sigma: ground state of the atom pair is degenerate (gap " + std::to_string(gap) + ")");
  p.h = kron_sum(p.ai.hamiltonian, p.aj.hamiltonian);
  p.phi = tensor_product(p.ai.spectrum.ground_vector(), p.aj.spectrum.ground_vector());
  p.phi.normalize();
  p.s = settings;
  p.s.sector = pair_sector(p.ai, p.aj);
  p.f.left_count = static_cast<std::size_t>(atom_i.charge_Z);
  p.f.right_count = static_cast<std::size_t>(atom_j.charge_Z);
  p.f.dim = atom_i.spatial_dim();
  return p;
}

} // namespace

DispersionResult sigma_coefficient(const AtomSpec& atom_i, const AtomSpec& atom_j, const Vec3& v,
                                   const GridSpec& grid, const SolverSettings& settings,
                                   const SigmaOptions& options) {
  PairSetup p = prepare(atom_i, atom_j, grid, settings, options);
  p.f.direction_v = v;
  const double lambda = p.ai.spectrum.ground_energy() + p.aj.spectrum.ground_energy();
  const SigmaValue sv = sigma_from_states(p.h, p.phi, lambda, p.f, p.s);

  DispersionResult r;
  r.sigma = sv.sigma;
  r.resolvent_residual = sv.residual;
  r.resolvent_iterations = sv.iterations;
  r.sigma_by_direction = {sv.sigma};
  r.energy_i = p.ai.spectrum.ground_energy();
  r.energy_j = p.aj.spectrum.ground_energy();
  r.pair_gap = std::min(p.ai.gap, p.aj.gap);
  r.passed = r.sigma > 0.0 && r.resolvent_residual <= settings.tolerance;
  if (options.cutoff_R) {
    WaveFunction psi = tensor_product(cut_off(p.ai.spectrum.ground_vector(), *options.cutoff_R),
                                      cut_off(p.aj.spectrum.ground_vector(), *options.cutoff_R));
    psi.normalize();
    r.cutoff_difference = sigma_from_states(p.h, psi, lambda, p.f, p.s).sigma - r.sigma;
  }
  return r;
}

DispersionResult direction_invariance_check(const AtomSpec& atom_i, const AtomSpec& atom_j,
                                            const std::vector<Vec3>& directions, const GridSpec& grid,
                                            const SolverSettings& settings) {
  if (atom_i.spatial_dim() != 3 || atom_j.spatial_dim() != 3)
    throw PreconditionError("direction invariance is inapplicable to one-dimensional models");
  if (directions.empty()) throw PreconditionError("direction invariance: no directions given");
  PairSetup p = prepare(atom_i, atom_j, grid, settings, {});
  const double lambda = p.ai.spectrum.ground_energy() + p.aj.spectrum.ground_energy();
  DispersionResult r;
  r.energy_i = p.ai.spectrum.ground_energy();
  r.energy_j = p.aj.spectrum.ground_energy();
  r.pair_gap = std::min(p.ai.gap, p.aj.gap);
  for (const Vec3& v : directions) {
    p.f.direction_v = v;
    const SigmaValue sv = sigma_from_states(p.h, p.phi, lambda, p.f, p.s);
    r.sigma_by_direction.push_back(sv.sigma);
    r.resolvent_residual = std::max(r.resolvent_residual, sv.residual);
    r.resolvent_iterations += sv.iterations;
    r.direction_spread = std::max(r.direction_spread, std::abs(sv.sigma - r.sigma_by_direction.front()));
  }
  r.sigma = r.sigma_by_direction.front();
  r.passed = r.direction_spread <= 10.0 * settings.tolerance && r.sigma > 0.0;
  return r;
}

} // namespace vdw
