// Phase two: concrete execution instrumented with the symbolic rules, the
// constraint tree it grows, field-form elimination for path conditions and
// the exploration driver.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "slc/formulas.hpp"
#include "slc/ir.hpp"
#include "slc/solver.hpp"
#include "slc/testgen.hpp"

namespace slc {

struct RunOutcome {
  enum class Kind : std::uint8_t { Ok, AssertionViolation, RuntimeError, BudgetExceeded };
  enum class Error : std::uint8_t { None, NullDeref, Dangling, GotoOutOfRange, FreeOfNull };
  Kind kind = Kind::Ok;
  Error error = Error::None;
  std::string proc;  // location of the failing statement
  int pc = -1;

  bool operator==(const RunOutcome&) const = default;
};

std::string to_string(const RunOutcome& o);
std::string to_string(RunOutcome::Error e);

// ---------------------------------------------------------------------------
// Concrete evaluation

class RuntimeFault : public std::runtime_error {
 public:
  RuntimeFault(RunOutcome::Error e, const std::string& what) : std::runtime_error(what), error(e) {}
  RunOutcome::Error error;
};

/// Variables to values plus the object store; freed addresses are
/// remembered so that later accesses report dangling rather than null.
struct Stack {
  std::map<std::string, Value> vars;
  Store heap;
  std::set<int> freed;
  int next_addr = 1;
};

/// Big-step evaluation with 32-bit wrapping arithmetic and short-circuit
/// `&&`/`||`; `p` supplies field layouts. Throws RuntimeFault on null or
/// dangling field reads and std::out_of_range on an unbound variable.
Value eval_expr(const Stack& s, const Expr& e, const Program& p);

// ---------------------------------------------------------------------------
// Constraint tree

struct TreeNode {
  enum class State : std::uint8_t { Open, Pruned, Parked };
  enum class Branch : std::uint8_t { None, Then, Else };

  int id = 0;
  int parent = -1;
  std::string label;  // edge label from the parent; identifies the node among its siblings
  int depth = 0;
  SymbolicHeap delta;
  std::string proc;   // procedure of ι
  std::string frame;  // variable suffix of the inlined frame, empty for the entry
  int pc = 0;
  std::string stmt;   // ι, printed
  Branch branch = Branch::None;
  bool explored = false;
  State state = State::Open;
  std::string note;  // why a node was pruned or parked
  std::optional<RunOutcome> outcome;  // set where a run stopped
  std::vector<int> children;

  /// Symbol holding each entry parameter's initial value in `delta`.
  std::map<std::string, std::string> inputs;
  /// Points-to heads in `delta` created by `new` rather than by the input.
  std::set<std::string> allocated;
};

class ConstraintTree {
 public:
  /// One root per precondition disjunct, each with the freshened disjunct
  /// as its path condition.
  ConstraintTree(const Formula& pre, const std::vector<Param>& entry, const std::string& entry_proc);

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const TreeNode& node(int id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  TreeNode& node(int id) { return nodes_.at(static_cast<std::size_t>(id)); }
  const std::vector<int>& roots() const { return roots_; }
  std::size_t size() const { return nodes_.size(); }

  std::optional<int> child(int parent, const std::string& label) const;
  int add_child(int parent, TreeNode n);

  /// Unexplored open node of minimal depth, leftmost among equals.
  std::optional<int> next_unexplored() const;
  std::size_t count_unexplored() const;

 private:
  std::vector<TreeNode> nodes_;
  std::vector<int> roots_;
};

/// Graphviz rendering: explored nodes solid, unexplored dashed, pruned and
/// parked annotated.
std::string to_dot(const ConstraintTree& t);

// ---------------------------------------------------------------------------
// Execution

struct RunConfig {
  std::size_t max_steps = 1000000;
  int max_call_depth = 8;  // deeper calls behave as `assert false`
  std::size_t max_nodes = 200000;  // the tree stops growing beyond this
};

struct RunResult {
  RunOutcome outcome;
  std::vector<int> path;  // tree nodes visited, root first
  std::size_t steps = 0;
  bool truncated = false;  // ran past max_nodes without growing the tree
  std::optional<Value> returned;
};

/// Runs `t` on the entry procedure of `p`, walking and growing the tree.
/// The root is the first disjunct the input satisfies (the first one if none
/// does).
RunResult run_test(const TestInput& t, const Program& p, const SpecFile& defs, ConstraintTree& tree,
                   const RunConfig& cfg = {});

// ---------------------------------------------------------------------------
// Path-condition preprocessing

struct PreprocessResult {
  std::vector<SymbolicHeap> heaps;
  /// Some branch was dropped because the unfolding bound was hit rather than
  /// because it was contradictory or lacked heap information.
  bool truncated = false;
};

/// Eliminates v.f reads and v.f := e assignments: reads resolve through
/// points-to slots (directly or via an alias), assignments introduce a fresh
/// name for the slot; a base constrained only by a predicate instance is
/// unfolded and every resulting heap processed. A base equal to null, or with
/// no heap information, drops the branch.
PreprocessResult preprocess(const SymbolicHeap& d, const SpecFile& defs, int max_unfolds = 16);

// ---------------------------------------------------------------------------
// Exploration

struct ExploreConfig {
  SolverConfig solver;
  RunConfig run;  // run.max_nodes also bounds the loop
  double time_limit = 60.0;  // seconds for the whole loop
  std::size_t max_iterations = 10000;
  /// Optional early exit, checked before each iteration (e.g. every feasible
  /// branch covered).
  std::function<bool(const ConstraintTree&)> goal;
};

struct ExploreStats {
  std::size_t iterations = 0;
  std::size_t solver_calls = 0;
  std::size_t sat = 0;
  std::size_t unsat = 0;
  std::size_t unknown = 0;
  std::size_t pruned = 0;
  std::size_t parked = 0;
  std::size_t generated = 0;
  bool goal_reached = false;
  bool budget_exhausted = false;
};

struct ExecutedTest {
  TestInput input;
  RunOutcome outcome;
  int target = -1;  // node the test was generated for; -1 for seeds
};

struct ExploreResult {
  ConstraintTree tree;
  std::vector<ExecutedTest> tests;
  ExploreStats stats;
  std::vector<std::string> log;
};

/// Path condition of `node` ready for the solver: entry parameters stand for
/// their initial values.
SymbolicHeap solver_query(const TreeNode& node);

/// Runs the seeds, then repeatedly solves the shallowest leftmost unexplored
/// node and runs the resulting input until no open node remains, the goal
/// holds or the budget (time, iterations, tree size) is spent.
ExploreResult explore(const Program& p, const SpecFile& defs, const Formula& pre,
                      const std::vector<TestInput>& seeds, const ExploreConfig& cfg = {});

}  // namespace slc
