// Command-line pipeline: parse the specification and program, generate
// inputs from the precondition, explore, and write the suite and reports.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "slc/coverage.hpp"

namespace slc {

/// Exit statuses of run_cli.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;   // usage, parse or validation error
inline constexpr int kExitBudget = 2;  // budget exhausted; partial outputs written

/// Entry point behind the `slc` binary. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Builder-script rendering of a suite: per test, allocations, slot wirings,
/// parameter bindings and the entry call, in that order.
std::string suite_json(const std::vector<TestInput>& tests, const std::vector<RunOutcome>& outcomes,
                       const std::vector<bool>& valid, const Program& p, const SpecFile& defs);

}  // namespace slc
