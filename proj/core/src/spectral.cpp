#include "vdwlab/spectral.hpp"

#include "vdwlab/error.hpp"

#include <Eigen/Dense>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace vdw {

std::string to_string(EigenMethod m) {
  switch (m) {
  case EigenMethod::automatic: return "automatic";
  case EigenMethod::dense_oracle: return "dense_oracle";
  case EigenMethod::iterative: return "iterative";
  }
  return "unknown";
}

void SolverSettings::validate() const {
  if (!(tolerance > 0.0 && tolerance <= 1e-4))
    throw ConfigError("solver tolerance must lie in (0, 1e-4]");
  if (max_iterations < 1) throw ConfigError("solver max_iterations must be >= 1");
  if (krylov_dimension < 4) throw ConfigError("solver krylov_dimension must be >= 4");
}

namespace {

using Vec = std::vector<double>;

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void scale(std::span<double> a, double s) {
  for (double& v : a) v *= s;
}

// Coefficient-space unit vectors for deflation (plain Euclidean norm).
std::vector<Vec> plain_basis(std::span<const WaveFunction> vs) {
  std::vector<Vec> out;
  for (const auto& v : vs) {
    Vec c(v.coefficients().begin(), v.coefficients().end());
    for (const auto& o : out) axpy(-dot(o, c), o, c);
    const double n = norm2(c);
    if (n > 1e-12) {
      scale(c, 1.0 / n);
      out.push_back(std::move(c));
    }
  }
  return out;
}

void orthogonalize(std::span<double> w, const std::vector<Vec>& basis, std::size_t count) {
  for (int pass = 0; pass < 2; ++pass)
    for (std::size_t i = 0; i < count; ++i) axpy(-dot(basis[i], w), basis[i], w);
}

WaveFunction to_wavefunction(const TensorGrid& g, const Vec& plain_unit) {
  WaveFunction w(g, plain_unit);
  w.normalize();
  return w;
}

double true_residual(const LinearOperator& op, std::span<const double> v, double theta) {
  Vec av(v.size());
  op.apply(v, av);
  axpy(-theta, v, av);
  return norm2(av) / norm2(v);
}

Vec random_plain(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Vec v(n);
  for (double& x : v) x = nd(rng);
  return v;
}

struct LanczosPair {
  double value;
  Vec vector;
  double residual;
};

// Thick-restart Lanczos for the lowest eigenpair orthogonal to `locked`.
LanczosPair lanczos_lowest(const LinearOperator& op, const std::vector<Vec>& locked,
                           const SolverSettings& s, std::mt19937_64& rng, std::size_t& matvecs) {
  const std::size_t n = op.size();
  const std::size_t free_dim = n - locked.size();
  // cap the basis memory around 512 MB
  const std::size_t mem_cap = std::max<std::size_t>(12, (std::size_t{64} << 20) / std::max<std::size_t>(n, 1));
  const std::size_t m = std::min({s.krylov_dimension, mem_cap, free_dim});
  const std::size_t keep = std::max<std::size_t>(1, m / 3);

  auto project = [&](std::span<double> w) {
    if (s.sector) s.sector(w);
    orthogonalize(w, locked, locked.size());
  };

  auto fresh_start = [&](const std::vector<Vec>& basis, std::size_t count) {
    for (int attempt = 0; attempt < 8; ++attempt) {
      Vec v = random_plain(n, rng);
      project(v);
      orthogonalize(v, basis, count);
      const double nv = norm2(v);
      if (nv > 1e-8) {
        scale(v, 1.0 / nv);
        return v;
      }
    }
    throw ConvergenceError("lanczos: cannot build a start vector in the requested sector", 0.0);
  };

  std::vector<Vec> V;
  V.reserve(m + 1);
  V.push_back(fresh_start(V, 0));
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  std::size_t j = 0; // index of the vector whose image is computed next
  double best = std::numeric_limits<double>::infinity();
  Vec w(n);

  while (true) {
    op.apply(V[j], w);
    ++matvecs;
    project(w);
    for (std::size_t i = 0; i <= j; ++i) {
      const double t = dot(V[i], w);
      T(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = t;
      T(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = t;
      axpy(-t, V[i], w);
    }
    orthogonalize(w, V, j + 1);
    orthogonalize(w, locked, locked.size());
    if (s.sector) {
      // P H P vanishes off the sector; without re-projection roundoff seeds that
      // zero mode and Lanczos converges to it whenever the sector spectrum is positive
      s.sector(w);
      orthogonalize(w, V, j + 1);
    }
    double beta = norm2(w);

    const auto k = static_cast<Eigen::Index>(j + 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T.topLeftCorner(k, k));
    const double theta = es.eigenvalues()(0);
    const Eigen::VectorXd s0 = es.eigenvectors().col(0);
    const double estimate = beta * std::abs(s0(k - 1));
    const bool full = j + 1 == m;
    const bool exhausted = matvecs >= static_cast<std::size_t>(s.max_iterations);
    const double scale_ref = std::max(1.0, std::abs(theta));
    const bool breakdown = beta <= 1e-13 * scale_ref;

    if (estimate <= 0.5 * s.tolerance || full || exhausted || breakdown) {
      Vec y(n, 0.0);
      for (Eigen::Index i = 0; i < k; ++i) axpy(s0(i), V[static_cast<std::size_t>(i)], y);
      const double ny = norm2(y);
      scale(y, 1.0 / ny);
      const double r = true_residual(op, y, theta);
      ++matvecs;
      best = std::min(best, r);
      if (r <= s.tolerance) return {theta, std::move(y), r};
      if (exhausted)
        throw ConvergenceError("lanczos: operator application budget exhausted", best);
      if (full || breakdown) {
        // thick restart on the lowest Ritz vectors
        const std::size_t kk = std::min<std::size_t>(keep, static_cast<std::size_t>(k));
        std::vector<Vec> Y(kk, Vec(n, 0.0));
        for (std::size_t c = 0; c < kk; ++c) {
          for (Eigen::Index i = 0; i < k; ++i)
            axpy(es.eigenvectors()(i, static_cast<Eigen::Index>(c)), V[static_cast<std::size_t>(i)], Y[c]);
        }
        T.setZero();
        for (std::size_t c = 0; c < kk; ++c)
          T(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(c)) = es.eigenvalues()(static_cast<Eigen::Index>(c));
        V = std::move(Y);
        Vec next;
        if (breakdown) {
          next = fresh_start(V, V.size());
        } else {
          next = w;
          orthogonalize(next, V, V.size());
          const double nn = norm2(next);
          if (nn <= 1e-13 * scale_ref) {
            next = fresh_start(V, V.size());
          } else {
            scale(next, 1.0 / nn);
          }
        }
        // couplings between the kept Ritz vectors and `next` are recomputed
        // exactly when next's image is formed
        V.push_back(std::move(next));
        j = V.size() - 1;
        continue;
      }
    }
    scale(w, 1.0 / beta);
    V.push_back(w);
    ++j;
  }
}

Vec sector_column(const SolverSettings& s, std::size_t n, std::size_t j) {
  Vec e(n, 0.0);
  e[j] = 1.0;
  if (s.sector) s.sector(e);
  return e;
}

} // namespace

EigenResult dense_spectrum(const LinearOperator& op, std::size_t k, const SolverSettings& s,
                           std::span<const WaveFunction> deflate) {
  const std::size_t n = op.size();
  if (k == 0 || k > n) throw PreconditionError("dense_spectrum: invalid eigenpair count");
  std::vector<double> a = assemble_dense(op);

  double bound = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += std::abs(a[i * n + j]);
    bound = std::max(bound, row);
  }
  const double penalty = 2.0 * bound + 1.0;

  if (s.sector) {
    // S A S + penalty (1 - S), S symmetric
    std::vector<double> smat(n * n);
    for (std::size_t j = 0; j < n; ++j) {
      Vec c = sector_column(s, n, j);
      for (std::size_t i = 0; i < n; ++i) smat[i * n + j] = c[i];
    }
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> A(a.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> S(smat.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    Eigen::MatrixXd M = S * A * S;
    M += penalty * (Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) - S);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) a[i * n + j] = 0.5 * (M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) + M(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)));
  }
  for (const auto& d : plain_basis(deflate))
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) a[i * n + j] += penalty * d[i] * d[j];

  std::vector<double> w(n), z(n * k);
  std::vector<lapack_int> support(2 * k);
  lapack_int found = 0;
  const lapack_int info = LAPACKE_dsyevr(
      LAPACK_ROW_MAJOR, 'V', 'I', 'U', static_cast<lapack_int>(n), a.data(), static_cast<lapack_int>(n),
      0.0, 0.0, 1, static_cast<lapack_int>(k), 0.0, &found, w.data(), z.data(),
      static_cast<lapack_int>(k), support.data());
  if (info != 0 || found != static_cast<lapack_int>(k))
    throw ConvergenceError("dense oracle: LAPACK dsyevr failed (info " + std::to_string(info) + ")", 0.0);

  EigenResult res;
  res.method = EigenMethod::dense_oracle;
  for (std::size_t c = 0; c < k; ++c) {
    Vec v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = z[i * k + c];
    res.residual_norms.push_back(true_residual(op, v, w[c]));
    res.eigenvalues.push_back(w[c]);
    res.eigenvectors.push_back(to_wavefunction(op.domain(), v));
  }
  res.operator_applications = n;
  return res;
}

EigenResult low_spectrum(const LinearOperator& op, std::size_t k, const SolverSettings& s,
                         std::span<const WaveFunction> deflate) {
  s.validate();
  if (k == 0) throw PreconditionError("low_spectrum: k must be >= 1");
  if (!op.is_self_adjoint()) throw PreconditionError("eigensolver needs a self-adjoint operator");
  if (k + deflate.size() > op.size()) throw PreconditionError("low_spectrum: k exceeds the dimension");

  const bool dense = s.method == EigenMethod::dense_oracle ||
                     (s.method == EigenMethod::automatic && op.size() <= s.dense_cutoff);
  if (dense) {
    EigenResult r = dense_spectrum(op, k, s, deflate);
    for (double res : r.residual_norms)
      if (res > s.tolerance) throw ConvergenceError("dense oracle residual above tolerance", res);
    return r;
  }

  std::mt19937_64 rng(s.seed);
  std::vector<Vec> locked = plain_basis(deflate);
  EigenResult res;
  res.method = EigenMethod::iterative;
  for (std::size_t c = 0; c < k; ++c) {
    LanczosPair p = lanczos_lowest(op, locked, s, rng, res.operator_applications);
    res.eigenvalues.push_back(p.value);
    res.residual_norms.push_back(p.residual);
    res.eigenvectors.push_back(to_wavefunction(op.domain(), p.vector));
    locked.push_back(std::move(p.vector));
  }
  // deflated pairs come out in order up to near-degeneracies; sort defensively
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return res.eigenvalues[a] < res.eigenvalues[b]; });
  EigenResult sorted;
  sorted.method = res.method;
  sorted.operator_applications = res.operator_applications;
  for (std::size_t i : idx) {
    sorted.eigenvalues.push_back(res.eigenvalues[i]);
    sorted.eigenvectors.push_back(res.eigenvectors[i]);
    sorted.residual_norms.push_back(res.residual_norms[i]);
  }
  return sorted;
}

EigenResult ground_state(const LinearOperator& op, const SolverSettings& settings) {
  return low_spectrum(op, 1, settings);
}

ResolventResult projected_resolvent_solve(const LinearOperator& op,
                                          const WaveFunction& projector_state, double lambda,
                                          const WaveFunction& b, const SolverSettings& s) {
  s.validate();
  if (b.size() != op.size() || projector_state.size() != op.size())
    throw PreconditionError("projected resolvent: vector length mismatch");
  WaveFunction phi = projector_state;
  phi.normalize();
  const double bnorm = b.norm();
  ResolventResult out{WaveFunction(b.grid()), 0.0, 0};
  if (bnorm == 0.0) return out;
  if (std::abs(inner(phi, b)) > 1e-10 * bnorm)
    throw PreconditionError("projected resolvent: right-hand side is not orthogonal to the projector state");

  const std::size_t n = op.size();
  const double vol = b.grid().cell_volume();
  Vec ph(phi.coefficients().begin(), phi.coefficients().end());
  scale(ph, std::sqrt(vol)); // plain unit vector
  auto project = [&](std::span<double> v) {
    if (s.sector) s.sector(v);
    axpy(-dot(ph, v), ph, v);
  };
  auto apply_shifted = [&](std::span<const double> v, std::span<double> out_v) {
    op.apply(v, out_v);
    axpy(-lambda, v, out_v);
    project(out_v);
  };

  Vec rhs(b.coefficients().begin(), b.coefficients().end());
  project(rhs);
  const double rhs_norm = norm2(rhs);
  Vec x(n, 0.0), r = rhs, p = r, q(n);
  double rr = dot(r, r);
  const double target = s.tolerance * rhs_norm;
  int it = 0;
  int restarts = 0;
  while (it < s.max_iterations) {
    apply_shifted(p, q);
    ++it;
    const double pq = dot(p, q);
    if (!(pq > 0.0))
      throw GapError("projected resolvent: negative curvature, the shift " + std::to_string(lambda) +
                     " is not below the projected spectrum");
    const double alpha = rr / pq;
    axpy(alpha, p, x);
    axpy(-alpha, q, r);
    project(x);
    project(r);
    const double rr_new = dot(r, r);
    if (std::sqrt(rr_new) <= target) {
      // confirm with the true residual; recursive residuals drift
      Vec ax(n);
      apply_shifted(x, ax);
      ++it;
      for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - ax[i];
      const double true_norm = norm2(r);
      if (true_norm <= target || restarts > 20) {
        out.solution = WaveFunction(b.grid(), std::move(x));
        out.relative_residual = true_norm / rhs_norm;
        out.iterations = it;
        if (true_norm > target)
          throw ConvergenceError("projected resolvent: residual stagnated", out.relative_residual);
        return out;
      }
      ++restarts;
      p = r;
      rr = dot(r, r);
      continue;
    }
    const double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    project(p);
  }
  throw ConvergenceError("projected resolvent: iteration budget exhausted", std::sqrt(rr) / rhs_norm);
}

WaveFunction projected_resolvent_apply(const LinearOperator& op,
                                       const WaveFunction& projector_state, double lambda,
                                       const WaveFunction& b, const SolverSettings& settings) {
  return projected_resolvent_solve(op, projector_state, lambda, b, settings).solution;
}

double projected_ground_energy(const LinearOperator& op, const WaveFunction& phi,
                               const SolverSettings& settings) {
  WaveFunction u = phi;
  u.normalize();
  const std::vector<WaveFunction> d{u};
  return low_spectrum(op, 1, settings, d).eigenvalues.front();
}

WaveFunction random_state(const TensorGrid& grid, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  WaveFunction w(grid, random_plain(grid.size(), rng));
  w.normalize();
  return w;
}

double self_adjointness_defect(const LinearOperator& op, std::size_t pairs, std::uint64_t seed) {
  double worst = 0.0;
  for (std::size_t k = 0; k < pairs; ++k) {
    const WaveFunction u = random_state(op.domain(), seed + 2 * k);
    const WaveFunction v = random_state(op.domain(), seed + 2 * k + 1);
    const double a = inner(u, op(v));
    const double b = inner(op(u), v);
    const double scale_ref = std::max({std::abs(a), std::abs(b), 1e-300});
    worst = std::max(worst, std::abs(a - b) / scale_ref);
  }
  return worst;
}

} // namespace vdw
