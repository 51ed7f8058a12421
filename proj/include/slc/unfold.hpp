// Predicate unfolding: replacing an inductive predicate instance by the
// disjuncts of its definition.
#pragma once

#include <cstddef>
#include <vector>

#include "slc/formulas.hpp"

namespace slc {

/// Unfolds the predicate instance at spatial position `index` of `d`. One
/// heap per disjunct of the definition, in definition order; the instance is
/// replaced in place and the definition's existentials are freshened.
std::vector<SymbolicHeap> unfold_at(const SymbolicHeap& d, std::size_t index, const SpecFile& defs);

/// {d} for a base heap; otherwise the union of unfold_at over every
/// predicate instance of d, each applied to d independently.
std::vector<SymbolicHeap> unfold_all(const SymbolicHeap& d, const SpecFile& defs);

/// Heaps reachable from `g` by 1..n rounds of unfold_all, accumulated over
/// rounds in round order and deduplicated up to bound-variable renaming.
/// n = 0 returns `g` unchanged.
std::vector<SymbolicHeap> unfold_closure(const std::vector<SymbolicHeap>& g, int n, const SpecFile& defs);

}  // namespace slc
