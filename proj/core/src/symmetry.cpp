#include "vdwlab/symmetry.hpp"

#include "vdwlab/error.hpp"

#include <algorithm>
#include <numeric>

namespace vdw {

bool is_permutation(std::span<const std::size_t> pi) {
  std::vector<char> seen(pi.size(), 0);
  for (std::size_t v : pi) {
    if (v >= pi.size() || seen[v]) return false;
    seen[v] = 1;
  }
  return true;
}

int permutation_sign(std::span<const std::size_t> pi) {
  if (!is_permutation(pi)) throw PreconditionError("not a permutation");
  std::vector<char> visited(pi.size(), 0);
  int sign = 1;
  for (std::size_t i = 0; i < pi.size(); ++i) {
    if (visited[i]) continue;
    std::size_t len = 0;
    for (std::size_t j = i; !visited[j]; j = pi[j]) {
      visited[j] = 1;
      ++len;
    }
    if (len % 2 == 0) sign = -sign;
  }
  return sign;
}

Permutation inverse(std::span<const std::size_t> pi) {
  Permutation inv(pi.size());
  for (std::size_t i = 0; i < pi.size(); ++i) inv[pi[i]] = i;
  return inv;
}

Permutation compose(std::span<const std::size_t> outer, std::span<const std::size_t> inner) {
  if (outer.size() != inner.size()) throw PreconditionError("compose: length mismatch");
  Permutation out(inner.size());
  for (std::size_t i = 0; i < inner.size(); ++i) out[i] = outer[inner[i]];
  return out;
}

std::vector<Permutation> all_permutations(std::size_t n) {
  Permutation p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  std::vector<Permutation> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

namespace {

// Accumulates weight * T_pi(in) into out.
void accumulate_permuted(const TensorGrid& grid, std::span<const double> in,
                         std::span<const std::size_t> pi, double weight, std::span<double> out) {
  const std::size_t np = grid.particles();
  const std::size_t m = grid.local_size();
  // slot pi(k) of the input receives coordinate k of the output point
  std::vector<std::size_t> w(np);
  for (std::size_t k = 0; k < np; ++k) {
    std::size_t s = 1;
    for (std::size_t j = pi[k] + 1; j < np; ++j) s *= m;
    w[k] = s;
  }
  std::vector<std::size_t> local(np, 0);
  std::size_t src = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] += weight * in[src];
    for (std::size_t p = np; p-- > 0;) {
      if (++local[p] < m) {
        src += w[p];
        break;
      }
      src -= (m - 1) * w[p];
      local[p] = 0;
    }
  }
}

void require_permutable(const TensorGrid& grid, std::size_t n) {
  if (n != grid.particles()) throw PreconditionError("permutation length does not match particle count");
  if (!grid.shared_frame())
    throw PreconditionError("permutation requires particles that share one grid frame");
}

} // namespace

WaveFunction permute(const WaveFunction& psi, std::span<const std::size_t> pi) {
  require_permutable(psi.grid(), pi.size());
  if (!is_permutation(pi)) throw PreconditionError("permute: not a permutation");
  WaveFunction out(psi.grid());
  accumulate_permuted(psi.grid(), psi.coefficients(), pi, 1.0, out.mutable_coefficients());
  return out;
}

void antisymmetrize_in_place(const TensorGrid& grid, std::span<double> c,
                             std::size_t factorial_budget) {
  const std::size_t n = grid.particles();
  if (n > factorial_budget)
    throw BudgetError("antisymmetrizer: particle count exceeds the factorial budget",
                      static_cast<double>(n), static_cast<double>(factorial_budget));
  require_permutable(grid, n);
  if (n < 2) return;
  const auto perms = all_permutations(n);
  const double scale = 1.0 / static_cast<double>(perms.size());
  std::vector<double> in(c.begin(), c.end());
  std::fill(c.begin(), c.end(), 0.0);
  for (const auto& p : perms) accumulate_permuted(grid, in, p, scale * permutation_sign(p), c);
}

WaveFunction antisymmetrize(const WaveFunction& psi, std::size_t factorial_budget) {
  WaveFunction out = psi;
  antisymmetrize_in_place(out.grid(), out.mutable_coefficients(), factorial_budget);
  return out;
}

} // namespace vdw
