// Acceptance runner: executes every criterion at its pinned tolerance and
// prints one pass/fail line each. Exit 0 iff all pass.
#include <cstdlib>
#include <iostream>

#include "kgdisp/suite.hpp"

int main(int argc, char** argv) {
  kgdisp::SuiteOptions opt;
  opt.seed = 1;
  opt.parallel = 2;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "--seed" && i + 1 < argc) opt.seed = std::strtoull(argv[++i], nullptr, 10);
    if (a == "--parallel" && i + 1 < argc) opt.parallel = std::atoi(argv[++i]);
  }
  auto results = kgdisp::run_acceptance(opt, std::cout);
  for (const auto& r : results)
    if (!r.pass) return 1;
  return 0;
}
