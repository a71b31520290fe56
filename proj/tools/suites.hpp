#pragma once

#include <cstdint>
#include <ostream>
#include <string>

namespace musvm::cli {

struct SuiteOutcome {
  int cases = 0;
  int violations = 0;
};

/// Known suites: solver, theorem1, spans, binary, all.
bool is_suite(const std::string& name);
SuiteOutcome run_suite(const std::string& name, std::uint64_t seed, int count, std::ostream& log);

}  // namespace musvm::cli
