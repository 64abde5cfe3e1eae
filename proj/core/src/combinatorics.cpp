#include "vdwlab/combinatorics.hpp"

#include "vdwlab/error.hpp"

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <numeric>

namespace vdw {

std::vector<std::size_t> zero_subset_witness(std::span<const long> k) {
  const long Z = static_cast<long>(k.size());
  if (Z == 0) throw PreconditionError("zero subset: no integers");
  // first prefix index with each remainder; prefix 0 is the empty sum
  std::vector<long> seen(static_cast<std::size_t>(Z), -1);
  seen[0] = 0;
  long sum = 0;
  for (long j = 1; j <= Z; ++j) {
    sum += k[static_cast<std::size_t>(j - 1)];
    const long r = ((sum % Z) + Z) % Z;
    if (seen[static_cast<std::size_t>(r)] >= 0) {
      std::vector<std::size_t> out;
      for (long t = seen[static_cast<std::size_t>(r)]; t < j; ++t) out.push_back(static_cast<std::size_t>(t));
      return out;
    }
    seen[static_cast<std::size_t>(r)] = j;
  }
  throw Error("zero subset: pigeonhole failed"); // unreachable
}

int group_size_bound(int Z) { return Z * Z + (Z == 1 ? 2 : 0); }

bool is_minimal_zero_sum(std::span<const int> charges) {
  const std::size_t m = charges.size();
  if (m > 20) throw BudgetError("minimal zero sum: exhaustive check", double(m), 20.0);
  const std::uint32_t full = (std::uint32_t{1} << m) - 1;
  for (std::uint32_t s = 1; s < full; ++s) {
    int sum = 0;
    for (std::size_t i = 0; i < m; ++i)
      if (s >> i & 1u) sum += charges[i];
    if (sum == 0) return false;
  }
  return true;
}

namespace {

// First zero-sum subset of `idx` of the given size in lexicographic order.
bool find_subset(std::span<const int> charges, const std::vector<std::size_t>& idx, std::size_t size,
                 std::vector<std::size_t>& out) {
  std::vector<std::size_t> pick(size);
  std::iota(pick.begin(), pick.end(), 0);
  const std::size_t n = idx.size();
  while (true) {
    int sum = 0;
    for (std::size_t p : pick) sum += charges[idx[p]];
    if (sum == 0) {
      out.clear();
      for (std::size_t p : pick) out.push_back(idx[p]);
      return true;
    }
    std::size_t i = size;
    while (i > 0 && pick[i - 1] == n - size + i - 1) --i;
    if (i == 0) return false;
    ++pick[i - 1];
    for (std::size_t j = i; j < size; ++j) pick[j] = pick[j - 1] + 1;
  }
}

} // namespace

SubgroupDecomposition charge_group_decompose(std::span<const int> charges, int Z) {
  if (Z < 1) throw PreconditionError("charge groups: Z must be >= 1");
  long total = 0;
  for (int c : charges) {
    if (c == 0 || c < -Z || c > Z)
      throw PreconditionError("charge groups: charge " + std::to_string(c) + " outside [-Z, Z] \\ {0}");
    total += c;
  }
  if (total != 0) throw PreconditionError("charge groups: charges do not sum to zero");
  SubgroupDecomposition d;
  d.charges.assign(charges.begin(), charges.end());
  std::vector<std::size_t> rest(charges.size());
  std::iota(rest.begin(), rest.end(), 0);
  std::vector<std::size_t> group;
  while (!rest.empty()) {
    for (std::size_t size = 1; size <= rest.size(); ++size)
      if (find_subset(charges, rest, size, group)) break;
    std::vector<std::size_t> left;
    std::set_difference(rest.begin(), rest.end(), group.begin(), group.end(), std::back_inserter(left));
    rest = std::move(left);
    d.max_group_size = std::max(d.max_group_size, group.size());
    d.groups.push_back(group);
  }
  return d;
}

GroupScanReport scan_charge_groups(int Z, int max_length) {
  if (Z < 1 || max_length < 1) throw PreconditionError("charge group scan: Z and length must be positive");
  if (max_length > 20) throw BudgetError("charge group scan: length", double(max_length), 20.0);
  GroupScanReport rep;
  rep.Z = Z;
  rep.max_length = max_length;
  rep.conjectured_bound = 2 * Z - 1;
  const int bound = group_size_bound(Z);
  std::vector<int> values;
  for (int v = -Z; v <= Z; ++v)
    if (v != 0) values.push_back(v);

  std::vector<int> seq;
  std::vector<int> counts(values.size(), 0);
  // nondecreasing sequences over `values` by depth-first search
  auto visit = [&](auto&& self, std::size_t from, int sum) -> void {
    if (!seq.empty() && sum == 0) {
      ++rep.multisets;
      // ordered sequences: multinomial coefficient
      double perms = std::tgamma(double(seq.size()) + 1.0);
      for (int c : counts) perms /= std::tgamma(double(c) + 1.0);
      rep.sequences += perms;
      const int len = static_cast<int>(seq.size());
      if (is_minimal_zero_sum(seq)) {
        if (len > rep.max_minimal_length) {
          rep.max_minimal_length = len;
          rep.longest_minimal = seq;
        }
        if (len >= bound) ++rep.counterexamples;
      }
      const auto dec = charge_group_decompose(seq, Z);
      rep.max_decomposed_group = std::max(rep.max_decomposed_group, static_cast<int>(dec.max_group_size));
    }
    if (static_cast<int>(seq.size()) == max_length) return;
    for (std::size_t v = from; v < values.size(); ++v) {
      seq.push_back(values[v]);
      ++counts[v];
      self(self, v, sum + values[v]);
      --counts[v];
      seq.pop_back();
    }
  };
  visit(visit, 0, 0);
  return rep;
}

} // namespace vdw
