// One line per acceptance criterion, sub-checks indented below it.
#include "dfchain/validation.hpp"

#include <cstdio>
#include <cstdlib>
#include <thread>

int main(int argc, char** argv) {
  dfc::ValidationOptions o;
  o.threads = int(std::max(1u, std::min(8u, std::thread::hardware_concurrency())));
  std::vector<int> ids;
  for (int k = 1; k < argc; ++k) ids.push_back(std::atoi(argv[k]));
  int failed = 0;
  for (const auto& r : dfc::run_validation(o, ids)) {
    std::printf("criterion %2d: %s  %s (%.1f s)\n", r.id, r.pass ? "PASS" : "FAIL", r.name.c_str(), r.seconds);
    for (const auto& c : r.checks) std::printf("    %s\n", c.c_str());
    failed += !r.pass;
  }
  std::fflush(stdout);
  return failed == 0 ? 0 : 1;
}
