#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace vdw {

/// Indices (0-based, increasing) of a nonempty contiguous block of k whose sum
/// is a multiple of Z = k.size(), found from two equal prefix remainders.
std::vector<std::size_t> zero_subset_witness(std::span<const long> k);

struct SubgroupDecomposition {
  std::vector<int> charges;
  /// Index groups into `charges`, in extraction order.
  std::vector<std::vector<std::size_t>> groups;
  std::size_t max_group_size = 0;
};

/// Repeatedly removes a shortest zero-sum subset. Requires every charge in
/// [-Z, Z] \ {0} and a zero total.
SubgroupDecomposition charge_group_decompose(std::span<const int> charges, int Z);

/// True when no nonempty proper subset sums to zero (exhaustive, at most 20 entries).
bool is_minimal_zero_sum(std::span<const int> charges);

/// Bound m < Z^2 + 2 delta_{Z,1} on minimal zero-sum sequences.
int group_size_bound(int Z);

struct GroupScanReport {
  int Z = 0;
  int max_length = 0;
  std::size_t multisets = 0;   ///< hypothesis-satisfying multisets visited
  double sequences = 0.0;      ///< the same counted as ordered sequences
  int max_minimal_length = 0;  ///< longest minimal zero-sum sequence found
  int max_decomposed_group = 0; ///< largest group produced by charge_group_decompose
  std::size_t counterexamples = 0; ///< minimal sequences with length >= the bound
  std::vector<int> longest_minimal;
  int conjectured_bound = 0; ///< 2Z - 1
};

/// Visits every sequence of nonzero charges in [-Z, Z] with zero sum and length
/// up to max_length (as multisets: both properties are order independent).
GroupScanReport scan_charge_groups(int Z, int max_length);

} // namespace vdw
