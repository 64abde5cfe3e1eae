#pragma once

#include "vdwlab/wavefunction.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace vdw {

/// pi[i] is the image of i (0-based).
using Permutation = std::vector<std::size_t>;

inline constexpr std::size_t kDefaultFactorialBudget = 6;

bool is_permutation(std::span<const std::size_t> pi);
int permutation_sign(std::span<const std::size_t> pi);
Permutation inverse(std::span<const std::size_t> pi);
/// (outer ∘ inner)(i) = outer[inner[i]].
Permutation compose(std::span<const std::size_t> outer, std::span<const std::size_t> inner);
/// All permutations of n elements in lexicographic order.
std::vector<Permutation> all_permutations(std::size_t n);

/// (T_pi psi)(x_1, ..., x_N) = psi(x_{pi^-1(1)}, ..., x_{pi^-1(N)}).
///
/// With this convention T_pi T_rho = T_{rho ∘ pi}. Requires a grid whose
/// particles share one frame.
WaveFunction permute(const WaveFunction& psi, std::span<const std::size_t> pi);

/// Q_N psi = (1/N!) sum_pi sgn(pi) T_pi psi.
WaveFunction antisymmetrize(const WaveFunction& psi,
                            std::size_t factorial_budget = kDefaultFactorialBudget);

/// In-place antisymmetrizer on raw coefficients; usable as a sector projector
/// in the eigen and resolvent solvers.
void antisymmetrize_in_place(const TensorGrid& grid, std::span<double> c,
                             std::size_t factorial_budget = kDefaultFactorialBudget);

} // namespace vdw
