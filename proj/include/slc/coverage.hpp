// Branch coverage of the IR measured on the constraint tree, infeasible-branch
// annotations, and the random-scalar baseline generator.
#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "slc/concolic.hpp"

namespace slc {

struct BranchId {
  std::string proc;
  int pc = 0;
  bool then = true;
  auto operator<=>(const BranchId&) const = default;
};

/// `proc:pc:T` or `proc:pc:F`.
std::string to_string(const BranchId& b);

/// One `proc:pc:T|F` per line; `//` starts a comment, blank lines are
/// ignored. Throws std::invalid_argument naming the offending line.
std::set<BranchId> parse_infeasible(std::string_view text);

/// Both outcomes of every `if` in the program.
std::vector<BranchId> all_branches(const Program& p);

/// Branches with an explored conditional child in the tree.
std::set<BranchId> covered_branches(const ConstraintTree& t);

struct BranchRow {
  int pc = 0;
  bool then_covered = false;
  bool else_covered = false;
  bool then_infeasible = false;
  bool else_infeasible = false;
};

struct ProcCoverage {
  std::string proc;
  std::vector<BranchRow> rows;
  std::size_t branches = 0;
  std::size_t infeasible = 0;
  std::size_t covered = 0;  // feasible branches only
};

struct CoverageReport {
  std::vector<ProcCoverage> procs;
  std::size_t branches = 0;
  std::size_t infeasible = 0;
  std::size_t covered = 0;
  /// Branches annotated infeasible that a run took anyway.
  std::vector<BranchId> contradicted;

  std::size_t tests = 0;
  std::size_t valid_tests = 0;
  std::size_t spec_solver_calls = 0;
  std::size_t concolic_solver_calls = 0;
  std::size_t unresolved = 0;  // parked nodes
  std::size_t pruned = 0;

  std::size_t feasible() const { return branches - infeasible; }
  /// Covered share of the feasible branches; 100 when there are none.
  double percent() const;
};

/// Fills the branch tables; the test and solver counters are left to the
/// caller.
CoverageReport measure_coverage(const Program& p, const std::set<BranchId>& covered,
                                 const std::set<BranchId>& infeasible);
CoverageReport measure_coverage(const Program& p, const ConstraintTree& t, const std::set<BranchId>& infeasible);

std::string to_text(const CoverageReport& r);

/// True once every branch outside `infeasible` is covered.
bool all_feasible_covered(const Program& p, const ConstraintTree& t, const std::set<BranchId>& infeasible);

// ---------------------------------------------------------------------------
// Baseline

struct BaselineConfig {
  std::uint64_t seed = 1;
  std::int32_t lo = -32;
  std::int32_t hi = 31;
};

/// Keeps the shape of each template (objects, references, reference
/// bindings) and redraws every integer slot and integer binding uniformly
/// from [lo, hi] and every boolean from {false, true}.
std::vector<TestInput> random_scalar_baseline(const std::vector<TestInput>& templates, const BaselineConfig& cfg);

}  // namespace slc
