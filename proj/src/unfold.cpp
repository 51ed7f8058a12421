#include "slc/unfold.hpp"

#include <set>

namespace slc {

namespace {

// Parameters used as a points-to head or field-access base must be bound
// to variables; other arguments are routed through a fresh existential.
std::set<std::string> head_params(const SymbolicHeap& body) {
  std::set<std::string> out;
  for (const auto& a : body.spatial) {
    if (a.is_points_to()) out.insert(a.head);
  }
  return out;
}

}  // namespace

std::vector<SymbolicHeap> unfold_at(const SymbolicHeap& d, std::size_t index, const SpecFile& defs) {
  const SpatialAtom& inst = d.spatial.at(index);
  if (!inst.is_pred()) throw StructuralError("unfold_at: atom is not a predicate instance");
  const PredDef* def = defs.find_pred(inst.name);
  if (!def) throw ValidationError("unknown predicate '" + inst.name + "'");
  if (def->params.size() != inst.args.size()) {
    throw ValidationError("predicate '" + inst.name + "' arity mismatch");
  }

  std::vector<SymbolicHeap> out;
  for (const auto& disjunct : def->body.disjuncts) {
    SymbolicHeap body = freshen(disjunct);
    auto heads = head_params(body);
    Binding b;
    std::vector<Pure> routed;
    for (std::size_t i = 0; i < def->params.size(); ++i) {
      const Term& arg = inst.args[i];
      if (!arg.is_var() && heads.count(def->params[i])) {
        auto w = fresh_var(def->params[i]);
        body.exists.push_back(w);
        b[def->params[i]] = Term::var(w);
        routed.push_back(Pure::eq(Term::var(w), arg));
      } else {
        b[def->params[i]] = arg;
      }
    }
    auto binders = body.exists;
    body.exists.clear();
    SymbolicHeap inst_body = substitute(body, b);
    inst_body.exists = binders;

    SymbolicHeap r;
    r.exists = d.exists;
    r.exists.insert(r.exists.end(), inst_body.exists.begin(), inst_body.exists.end());
    r.spatial.assign(d.spatial.begin(), d.spatial.begin() + static_cast<std::ptrdiff_t>(index));
    r.spatial.insert(r.spatial.end(), inst_body.spatial.begin(), inst_body.spatial.end());
    r.spatial.insert(r.spatial.end(), d.spatial.begin() + static_cast<std::ptrdiff_t>(index) + 1, d.spatial.end());
    r.pure = d.pure;
    r.pure.insert(r.pure.end(), routed.begin(), routed.end());
    r.pure.insert(r.pure.end(), inst_body.pure.begin(), inst_body.pure.end());
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<SymbolicHeap> unfold_all(const SymbolicHeap& d, const SpecFile& defs) {
  auto positions = d.pred_positions();
  if (positions.empty()) return {d};
  std::vector<SymbolicHeap> out;
  for (auto i : positions) {
    auto part = unfold_at(d, i, defs);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

std::vector<SymbolicHeap> unfold_closure(const std::vector<SymbolicHeap>& g, int n, const SpecFile& defs) {
  if (n <= 0) return g;
  std::vector<SymbolicHeap> acc;
  std::vector<SymbolicHeap> round = g;
  for (int k = 1; k <= n; ++k) {
    std::vector<SymbolicHeap> next;
    for (const auto& d : round) {
      auto part = unfold_all(d, defs);
      next.insert(next.end(), part.begin(), part.end());
    }
    round = dedup(std::move(next));
    acc.insert(acc.end(), round.begin(), round.end());
  }
  return dedup(std::move(acc));
}

}  // namespace slc
