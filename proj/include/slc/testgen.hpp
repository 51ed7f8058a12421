// Test inputs from specifications: concrete heaps, the footprint-exact
// formula evaluator used as validity checker, model-to-input construction,
// specification-driven generation and the brute-force oracle.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "slc/formulas.hpp"
#include "slc/ir.hpp"
#include "slc/solver.hpp"

namespace slc {

struct Value {
  enum class Kind : std::uint8_t { Null, Int, Bool, Addr };
  Kind kind = Kind::Null;
  std::int32_t num = 0;  // Int value, or 0/1 for Bool
  int addr = 0;          // Addr

  static Value null() { return {}; }
  static Value integer(std::int32_t k) { return {Kind::Int, k, 0}; }
  static Value boolean(bool b) { return {Kind::Bool, b ? 1 : 0, 0}; }
  static Value address(int a) { return {Kind::Addr, 0, a}; }
  static Value default_for(const Type& t);

  bool is_ref() const { return kind == Kind::Null || kind == Kind::Addr; }
  bool operator==(const Value&) const = default;
  auto operator<=>(const Value&) const = default;
};

std::string to_string(const Value& v);

struct HeapObject {
  std::string type;
  std::vector<Value> slots;
  bool operator==(const HeapObject&) const = default;
  auto operator<=>(const HeapObject&) const = default;
};

/// Address -> object. Addresses are positive; 0 is never used.
using Store = std::map<int, HeapObject>;

struct TestInput {
  Store store;
  std::vector<std::pair<std::string, Value>> bindings;  // entry parameters in order
  std::string provenance;

  std::optional<Value> binding(const std::string& name) const;
  /// Same store and bindings; provenance is ignored.
  bool same_input(const TestInput& o) const { return store == o.store && bindings == o.bindings; }
};

/// Renumbers addresses 1..n in breadth-first order from the bindings (slots
/// in field order); unreachable objects keep their relative order at the end.
TestInput canonicalize(const TestInput& t);

// ---------------------------------------------------------------------------
// Evaluation

struct EvalOptions {
  /// Integer candidates for unbound variables are the neighbours of every
  /// constant in the store, bindings and formulas, 0 and the 32-bit extremes,
  /// plus every value of this range when set.
  std::optional<std::pair<std::int32_t, std::int32_t>> int_range;
  std::size_t max_steps = 200000;
};

/// Does `d` hold on exactly the objects of `store`? Variables bound in `env`
/// are fixed; every other variable (existentials, ghosts) is searched for.
bool eval_heap(const SymbolicHeap& d, const Store& store, const std::map<std::string, Value>& env,
               const SpecFile& defs, const EvalOptions& opts = {});

/// The predicate instance `pred(args)` on the whole store of `input`.
bool eval_pred(const TestInput& input, const std::string& pred, const std::vector<Value>& args, const SpecFile& defs,
               const EvalOptions& opts = {});

/// Some disjunct of `pre` holds on the input; entry bindings fix the
/// parameters, remaining free variables are ghosts.
bool satisfies(const TestInput& input, const Formula& pre, const SpecFile& defs, const EvalOptions& opts = {});

// ---------------------------------------------------------------------------
// Construction

class ConstructionError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Builds the concrete input for a symbolic model: cells and constants
/// first, then aliases, then slot wiring. Parameters the model leaves open
/// get 0 / false / null.
TestInput to_unit_test(const SymbolicModel& m, const std::vector<Param>& entry, const SpecFile& defs);

struct GenStats {
  std::size_t heaps = 0;
  std::size_t solver_calls = 0;
  std::size_t sat = 0;
  std::size_t unsat = 0;
  std::size_t unknown = 0;
  std::size_t dropped = 0;     // failed the validity check
  std::size_t duplicates = 0;  // identical to an earlier test
};

struct GenResult {
  std::vector<TestInput> tests;
  GenStats stats;
  std::vector<std::string> log;
};

/// Unfolds `g` to depth `n`, solves every heap of the closure and converts
/// each model into a test. Tests failing `satisfies` against `g` are dropped.
GenResult gen_from_spec(const std::vector<SymbolicHeap>& g, int n, const SpecFile& defs,
                        const std::vector<Param>& entry, const SolverConfig& cfg = {});

// ---------------------------------------------------------------------------
// Oracle

struct OracleBounds {
  int max_objects = 3;
  std::int32_t lo = -4;
  std::int32_t hi = 4;
};

/// Every store with at most `max_objects` objects (addresses in
/// breadth-first order from the inputs, every object reachable) and every
/// value of the `inputs` variables, with scalars in [lo, hi], on which `d`
/// holds. Other free variables of `d` are ghosts.
/// Throws std::invalid_argument when max_objects exceeds 4.
std::vector<TestInput> oracle_enumerate(const SymbolicHeap& d, const std::vector<Param>& inputs,
                                        const SpecFile& defs, const OracleBounds& b);

/// Whether any such store satisfies `d`. Free location variables of `d` are
/// inputs and may also dangle (point outside the store, counted against
/// max_objects); free scalars are ghosts.
bool oracle_exists(const SymbolicHeap& d, const SpecFile& defs, const OracleBounds& b);

/// Does the model fit in the oracle bounds (object count, scalar range)?
bool fits_bounds(const SymbolicModel& m, const OracleBounds& b);

}  // namespace slc
