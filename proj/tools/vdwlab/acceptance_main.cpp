// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
// Optional arguments select criteria by number.
#include "acceptance.hpp"

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

int main(int argc, char** argv) {
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) {
    char* end = nullptr;
    const long id = std::strtol(argv[i], &end, 10);
    if (*end != '\0' || id < 1 || id > 11) {
      std::fprintf(stderr, "usage: %s [criterion number ...]\n", argv[0]);
      return 2;
    }
    only.push_back(static_cast<int>(id));
  }
  bool all = true;
  vdw::acceptance::run(only, [&](const vdw::acceptance::CriterionResult& r) {
    std::printf("%s\n", vdw::acceptance::format(r).c_str());
    std::fflush(stdout);
    all = all && r.passed;
  });
  return all ? 0 : 1;
}
