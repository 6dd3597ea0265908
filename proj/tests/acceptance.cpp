// Acceptance gate: one line per criterion, nonzero exit on any failure.
//   acceptance [--seed N] [--only K]

#include "hypercurv/verification.hpp"

#include "CLI11.hpp"

#include <cstdint>
#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"hypercurv acceptance suite"};
  std::uint64_t seed = 7;
  int only = 0;
  app.add_option("--seed", seed, "seed for sampled points");
  app.add_option("--only", only, "run a single criterion (1-8)")->check(CLI::Range(1, hypercurv::kCriterionCount));
  CLI11_PARSE(app, argc, argv);

  int failed = 0;
  for (int id = 1; id <= hypercurv::kCriterionCount; ++id) {
    if (only && id != only) continue;
    const hypercurv::CriterionResult r = hypercurv::run_criterion(id, seed);
    std::cout << hypercurv::format_result(r) << std::endl;
    failed += r.passed ? 0 : 1;
  }
  std::cout << (failed ? "acceptance: " + std::to_string(failed) + " criteria failed" : std::string("acceptance: all criteria passed"))
            << " (seed " << seed << ")" << std::endl;
  return failed ? 1 : 0;
}
