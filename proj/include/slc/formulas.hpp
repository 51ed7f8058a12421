// Separation-logic formulas: terms, pure and spatial parts, symbolic heaps,
// data/predicate definitions and the manipulation primitives the rest of the
// engine is built on (substitution, free variables, normalization).
#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace slc {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Well-formedness violations found after a successful parse (unknown names,
/// arity mismatches, duplicate definitions, ill-typed programs).
class ValidationError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when a substitution would put a non-variable term in a position
/// that must hold a variable (points-to head, field-access base).
class StructuralError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Terms

/// Arithmetic/reference term. `Mul` and `Field` never come out of the
/// specification parser; they appear in path conditions built from programs.
class Term {
 public:
  enum class Kind : std::uint8_t { Null, Int, Bool, Var, Scale, Add, Neg, Mul, Field };

  Term() = default;

  static Term null();
  static Term constant(std::int32_t k);
  static Term boolean(bool b);
  static Term var(std::string name);
  static Term scale(std::int32_t k, Term a);
  static Term add(Term a, Term b);
  static Term sub(Term a, Term b) { return add(std::move(a), neg(std::move(b))); }
  static Term neg(Term a);
  static Term mul(Term a, Term b);
  static Term field(std::string base, std::string field);

  Kind kind() const { return kind_; }
  bool is_var() const { return kind_ == Kind::Var; }
  bool is_null() const { return kind_ == Kind::Null; }
  std::int32_t value() const { return value_; }
  /// Variable name, or the base variable of a field access.
  const std::string& name() const { return name_; }
  const std::string& field_name() const { return field_; }
  const Term& lhs() const { return kids_.at(0); }
  const Term& rhs() const { return kids_.at(1); }
  const Term& operand() const { return kids_.at(0); }
  const std::vector<Term>& kids() const { return kids_; }

  bool has_field_access() const;
  bool is_linear() const;

  bool operator==(const Term& o) const;
  std::strong_ordering operator<=>(const Term& o) const;

 private:
  Kind kind_ = Kind::Null;
  std::int32_t value_ = 0;
  std::string name_;
  std::string field_;
  std::vector<Term> kids_;
};

// ---------------------------------------------------------------------------
// Pure formulas

/// Pure part. Surface comparisons are desugared into Eq/Le/Not/And at parse
/// time. `FieldAssign` (v.f := e) only occurs in path conditions.
class Pure {
 public:
  enum class Kind : std::uint8_t { True, Eq, Le, Not, And, FieldAssign };

  Pure() = default;

  static Pure truth();
  static Pure eq(Term a, Term b);
  static Pure le(Term a, Term b);
  static Pure lt(Term a, Term b);  // ¬(b ≤ a)
  static Pure ne(Term a, Term b);  // ¬(a = b)
  static Pure negate(Pure p);
  static Pure conj(Pure a, Pure b);
  static Pure conj(std::vector<Pure> parts);
  static Pure disj(Pure a, Pure b);  // ¬(¬a ∧ ¬b)
  static Pure field_assign(std::string base, std::string field, Term value);

  Kind kind() const { return kind_; }
  const Term& left() const { return terms_.at(0); }
  const Term& right() const { return terms_.at(1); }
  const Pure& operand() const { return kids_.at(0); }
  const std::vector<Pure>& kids() const { return kids_; }

  bool has_field_forms() const;

  bool operator==(const Pure& o) const;
  std::strong_ordering operator<=>(const Pure& o) const;

 private:
  Kind kind_ = Kind::True;
  std::vector<Term> terms_;
  std::vector<Pure> kids_;
};

/// Flattens nested conjunctions and drops `true`.
std::vector<Pure> conjuncts(const Pure& p);

// ---------------------------------------------------------------------------
// Spatial atoms and symbolic heaps

struct SpatialAtom {
  enum class Kind : std::uint8_t { PointsTo, Pred };
  Kind kind = Kind::PointsTo;
  std::string head;  // points-to head variable (empty for predicates)
  std::string name;  // data type (points-to) or predicate name
  std::vector<Term> args;

  static SpatialAtom points_to(std::string head, std::string type, std::vector<Term> args);
  static SpatialAtom pred(std::string name, std::vector<Term> args);

  bool is_points_to() const { return kind == Kind::PointsTo; }
  bool is_pred() const { return kind == Kind::Pred; }

  bool operator==(const SpatialAtom&) const = default;
  std::strong_ordering operator<=>(const SpatialAtom&) const = default;
};

/// ∃ exists. (spatial ∧ pure). An empty spatial list is `emp`, an empty pure
/// list is `true`. Pure conjuncts keep their insertion order: path conditions
/// depend on it.
struct SymbolicHeap {
  std::vector<std::string> exists;
  std::vector<SpatialAtom> spatial;
  std::vector<Pure> pure;

  bool is_base() const;
  std::vector<std::size_t> pred_positions() const;

  bool operator==(const SymbolicHeap&) const = default;
};

struct Formula {
  std::vector<SymbolicHeap> disjuncts;
  bool operator==(const Formula&) const = default;
};

// ---------------------------------------------------------------------------
// Definitions

struct FieldDef {
  std::string type;  // "int", "bool" or a data type name
  std::string name;
  bool operator==(const FieldDef&) const = default;
};

struct DataDef {
  std::string name;
  std::vector<FieldDef> fields;

  std::optional<std::size_t> field_index(std::string_view f) const;
  bool operator==(const DataDef&) const = default;
};

struct PredDef {
  std::string name;
  std::vector<std::string> params;
  Formula body;

  bool is_base_disjunct(std::size_t i) const { return body.disjuncts.at(i).is_base(); }
  bool operator==(const PredDef&) const = default;
};

struct Precondition {
  std::string proc;
  Formula formula;
  bool operator==(const Precondition&) const = default;
};

struct SpecFile {
  std::vector<DataDef> data;
  std::vector<PredDef> preds;
  std::vector<Precondition> pres;

  const DataDef* find_data(std::string_view name) const;
  const PredDef* find_pred(std::string_view name) const;
  const Formula* find_pre(std::string_view proc) const;

  bool operator==(const SpecFile&) const = default;
};

inline bool is_scalar_type(std::string_view t) { return t == "int" || t == "bool"; }

// ---------------------------------------------------------------------------
// Variables

using Binding = std::map<std::string, Term>;

/// Session-wide fresh name: `<hint>'<n>` with a global atomic counter.
std::string fresh_var(std::string_view hint);
/// Strips a trailing `'<n>` freshness suffix.
std::string base_name(std::string_view name);
/// Restarts the counter; one call per pipeline session keeps output stable.
void reset_fresh_counter();
/// Raises the counter past any `'<n>` suffix in `name`.
void note_parsed_name(std::string_view name);

void collect_vars(const Term& t, std::set<std::string>& out);
void collect_vars(const Pure& p, std::set<std::string>& out);
void collect_vars(const SpatialAtom& a, std::set<std::string>& out);
std::set<std::string> free_vars(const SymbolicHeap& d);
std::set<std::string> free_vars(const Formula& f);
/// All variable names occurring in the heap, bound ones included.
std::set<std::string> all_vars(const SymbolicHeap& d);

// ---------------------------------------------------------------------------
// Substitution and normalization

Term substitute(const Term& t, const Binding& b);
Pure substitute(const Pure& p, const Binding& b);
SpatialAtom substitute(const SpatialAtom& a, const Binding& b);
/// Simultaneous capture-avoiding substitution of free variables. Bound
/// variables of `d` must not be in the binding's domain.
SymbolicHeap substitute(const SymbolicHeap& d, const Binding& b);

/// Renames every existential of `d` to a fresh name.
SymbolicHeap freshen(const SymbolicHeap& d);

/// Raw composition of heaps before normalization.
struct RawFormula {
  enum class Kind : std::uint8_t { Heap, Star, Or };
  Kind kind = Kind::Heap;
  SymbolicHeap heap;
  std::vector<RawFormula> kids;

  static RawFormula leaf(SymbolicHeap h);
  static RawFormula star(std::vector<RawFormula> kids);
  static RawFormula disj(std::vector<RawFormula> kids);
  static RawFormula of(const Formula& f);
};

/// Applies the two ∗-axioms (pure parts float out, existentials merge with
/// renaming on clash) and distributes ∗ over ∨. Output order follows the
/// left-to-right disjunct order of the input.
std::vector<SymbolicHeap> normalize(const RawFormula& f);
/// Separating conjunction of two normalized heaps.
SymbolicHeap star(const SymbolicHeap& a, const SymbolicHeap& b);

/// True when the heap is a grammar-conforming symbolic heap: unique binders,
/// every binder used, no field forms unless `allow_field_forms`.
bool conforms(const SymbolicHeap& d, bool allow_field_forms = false);

/// Structural equality up to renaming of existentials and reordering of
/// spatial atoms and pure conjuncts.
bool alpha_equivalent(const SymbolicHeap& a, const SymbolicHeap& b);
/// Deterministic key used to deduplicate heaps; equal keys imply
/// alpha-equivalence (the converse holds for all but pathological ties).
std::string canonical_key(const SymbolicHeap& d);
std::vector<SymbolicHeap> dedup(std::vector<SymbolicHeap> heaps);

// ---------------------------------------------------------------------------
// Printing and parsing

std::string to_string(const Term& t);
std::string to_string(const Pure& p);
std::string to_string(const SpatialAtom& a);
std::string to_string(const SymbolicHeap& d);
std::string to_string(const Formula& f);
std::string to_string(const SpecFile& s);

/// Parses a `.sl` specification and checks its well-formedness.
SpecFile parse_spec(std::string_view text);
/// Parses one symbolic heap in the disjunct syntax. Path-condition forms
/// (v.f reads, v.f := e) are accepted when `allow_field_forms` is set.
SymbolicHeap parse_heap(std::string_view text, bool allow_field_forms = false);
Formula parse_formula(std::string_view text, bool allow_field_forms = false);

/// Checks `d` against the definitions: known predicates/types, arities.
void check_heap(const SymbolicHeap& d, const SpecFile& defs);

}  // namespace slc
