// Sort inference for the untyped variables of formulas. Sorts come from
// points-to positions, field types, predicate parameter positions and
// (in)equalities; conflicting evidence is a validation error.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "slc/formulas.hpp"

namespace slc {

struct Sort {
  enum class Kind : std::uint8_t { Unknown, Int, Bool, Ref };
  Kind kind = Kind::Unknown;
  std::string type;  // data type for Ref; empty when the target type is unknown

  static Sort unknown() { return {}; }
  static Sort integer() { return {Kind::Int, ""}; }
  static Sort boolean() { return {Kind::Bool, ""}; }
  static Sort ref(std::string t = "") { return {Kind::Ref, std::move(t)}; }
  static Sort of_type(const std::string& t);

  bool is_ref() const { return kind == Kind::Ref; }
  bool operator==(const Sort&) const = default;
};

std::string to_string(const Sort& s);

/// Least upper bound in the flat lattice Unknown < Int|Bool|Ref < Ref(c).
/// Throws ValidationError (mentioning `what`) on conflict.
Sort join(const Sort& a, const Sort& b, const std::string& what);

using SortMap = std::map<std::string, Sort>;
using PredSorts = std::map<std::string, std::vector<Sort>>;

/// Parameter sorts of every predicate, by fixpoint over the definitions.
PredSorts pred_param_sorts(const SpecFile& defs);

/// Sorts of all variables (bound ones included) of `d`. `seed` supplies known
/// sorts, e.g. entry-procedure parameter types.
SortMap infer_sorts(const SymbolicHeap& d, const SpecFile& defs, const PredSorts& ps,
                    const SortMap& seed = {});
SortMap infer_sorts(const SymbolicHeap& d, const SpecFile& defs, const SortMap& seed = {});

}  // namespace slc
