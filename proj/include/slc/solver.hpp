// Bounded satisfiability for symbolic heaps: breadth-first predicate
// unfolding down to base heaps, separation saturation, and a finite-domain
// pure solver. Complete only within the unfold depth and integer domain.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "slc/formulas.hpp"
#include "slc/sorts.hpp"

namespace slc {

struct SolverConfig {
  int unfold_depth = 6;  // nesting depth of unfolded predicate instances
  double time_limit = 10.0;  // seconds per query
  std::int32_t int_lo = -64;
  std::int32_t int_hi = 63;
  std::size_t max_pure_nodes = 200000;  // labeling nodes per pure query
  std::size_t max_heaps = 50000;        // heaps examined per sat query
};

enum class Decision { Sat, Unsat, Unknown };
std::string to_string(Decision d);

// ---------------------------------------------------------------------------
// Pure solving

struct PureValue {
  enum class Kind : std::uint8_t { Null, Int, Loc };
  Kind kind = Kind::Null;
  std::int64_t value = 0;  // Int (booleans are 0/1)
  std::string loc;         // Loc: representative variable of the alias class
  bool operator==(const PureValue&) const = default;
};

struct PureResult {
  Decision status = Decision::Unknown;
  bool bounded = false;  // UNSAT only because of the finite integer domain
  std::map<std::string, PureValue> values;
  std::size_t nodes = 0;
};

/// Solves a conjunction of pure formulas. `sorts` decides which variables
/// are locations (Ref) and which are booleans; everything else is an
/// integer. `order` lists variables to label first (the rest follow in
/// first-occurrence order). Unconstrained locations are null.
PureResult pure_solve(const std::vector<Pure>& conjuncts, const SortMap& sorts, const SolverConfig& cfg,
                      const std::vector<std::string>& order = {});

/// True when the conjunction is unsatisfiable independently of the integer
/// domain bound (alias contradiction or linear infeasibility over Z).
bool proven_unsat(const std::vector<Pure>& conjuncts, const SortMap& sorts, const SolverConfig& cfg);

/// Evaluates a pure formula under a total valuation. Locations compare by
/// representative. Throws std::out_of_range on a missing variable.
bool eval_pure(const Pure& p, const std::map<std::string, PureValue>& values);

// ---------------------------------------------------------------------------
// Heaps

struct Saturation {
  bool contradiction = false;
  std::vector<Pure> additions;
};

/// Separation facts of a base heap: every head is non-null and heads are
/// pairwise distinct. Contradiction when the syntactic alias closure of the
/// pure part already identifies a head with null or two heads.
Saturation saturate(const SymbolicHeap& d);

/// Syntactic alias closure over the top-level equalities of d's pure part.
bool entails_eq(const SymbolicHeap& d, const std::string& v, const Term& other);

/// Quantifier-free base heap resolving every variable: cells for allocated
/// locations, and for every other variable an equality with null, a
/// constant, or an allocated head / class representative.
struct SymbolicModel {
  std::vector<SpatialAtom> cells;
  std::map<std::string, Term> values;
  /// Non-null locations with no cell (dangling in the model); they are the
  /// representatives other variables may alias.
  std::set<std::string> dangling;

  SymbolicHeap to_heap() const;
  bool operator==(const SymbolicModel&) const = default;
};

struct SatStats {
  int unfold_rounds = 0;  // deepest instance unfolded
  std::size_t heaps = 0;
  std::size_t pure_nodes = 0;
  bool bounded = false;
  bool timed_out = false;
};

struct SatResult {
  Decision decision = Decision::Unknown;
  std::optional<SymbolicModel> model;
  SatStats stats;
};

SatResult sat(const SymbolicHeap& d, const SpecFile& defs, const SolverConfig& cfg = {});

/// Concretizes `m` and evaluates `d` on it with exact footprint semantics.
/// Free variables of `d` missing from the model read as 0 / null.
bool model_check(const SymbolicModel& m, const SymbolicHeap& d, const SpecFile& defs);

}  // namespace slc
