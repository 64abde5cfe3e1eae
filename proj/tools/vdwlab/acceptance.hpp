#pragma once

#include <functional>
#include <string>
#include <vector>

namespace vdw::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// "PASS [ 3] name: detail (1.2 s)".
std::string format(const CriterionResult& r);

/// Runs the criteria in order (all when `only` is empty) and reports each one
/// through `on_result` as soon as it finishes.
std::vector<CriterionResult> run(const std::vector<int>& only = {},
                                 const std::function<void(const CriterionResult&)>& on_result = {});

} // namespace vdw::acceptance
