#include "slc/sorts.hpp"

namespace slc {

Sort Sort::of_type(const std::string& t) {
  if (t == "int") return integer();
  if (t == "bool") return boolean();
  return ref(t);
}

std::string to_string(const Sort& s) {
  switch (s.kind) {
    case Sort::Kind::Unknown:
      return "?";
    case Sort::Kind::Int:
      return "int";
    case Sort::Kind::Bool:
      return "bool";
    case Sort::Kind::Ref:
      return s.type.empty() ? "ref" : s.type;
  }
  return "?";
}

Sort join(const Sort& a, const Sort& b, const std::string& what) {
  if (a.kind == Sort::Kind::Unknown) return b;
  if (b.kind == Sort::Kind::Unknown) return a;
  if (a.kind == b.kind) {
    if (a.kind != Sort::Kind::Ref || a.type == b.type || b.type.empty()) return a;
    if (a.type.empty()) return b;
  }
  throw ValidationError("sort conflict for " + what + ": " + to_string(a) + " vs " + to_string(b));
}

namespace {

class Inference {
 public:
  Inference(const SpecFile& defs, const PredSorts& ps) : defs_(defs), ps_(ps) {}

  std::string find(const std::string& v) {
    auto it = parent_.find(v);
    if (it == parent_.end()) {
      parent_.emplace(v, v);
      sort_.emplace(v, Sort{});
      return v;
    }
    if (it->second == v) return v;
    auto root = find(it->second);
    parent_[v] = root;
    return root;
  }

  void constrain(const std::string& v, const Sort& s) {
    auto r = find(v);
    sort_[r] = join(sort_[r], s, "'" + v + "'");
  }

  void unify(const std::string& a, const std::string& b) {
    auto ra = find(a);
    auto rb = find(b);
    if (ra == rb) return;
    Sort s = join(sort_[ra], sort_[rb], "'" + a + "' and '" + b + "'");
    parent_[rb] = ra;
    sort_[ra] = s;
  }

  Sort field_sort(const std::string& base, const std::string& f) {
    Sort b = sort_[find(base)];
    if (b.kind == Sort::Kind::Ref && !b.type.empty()) {
      if (const DataDef* d = defs_.find_data(b.type)) {
        if (auto i = d->field_index(f)) return Sort::of_type(d->fields[*i].type);
      }
    }
    return {};
  }

  Sort sort_of(const Term& t) {
    switch (t.kind()) {
      case Term::Kind::Null:
        return Sort::ref();
      case Term::Kind::Int:
        return Sort::integer();
      case Term::Kind::Bool:
        return Sort::boolean();
      case Term::Kind::Var:
        return sort_[find(t.name())];
      case Term::Kind::Field:
        constrain(t.name(), Sort::ref());
        return field_sort(t.name(), t.field_name());
      default:
        for (const auto& k : t.kids()) expect(k, Sort::integer());
        return Sort::integer();
    }
  }

  void expect(const Term& t, const Sort& s) {
    if (t.kind() == Term::Kind::Var) {
      constrain(t.name(), s);
      return;
    }
    join(sort_of(t), s, "'" + to_string(t) + "'");
  }

  void visit(const Pure& p) {
    switch (p.kind()) {
      case Pure::Kind::True:
        return;
      case Pure::Kind::Eq:
      case Pure::Kind::FieldAssign: {
        const Term& a = p.left();
        const Term& b = p.right();
        if (a.is_var() && b.is_var()) {
          unify(a.name(), b.name());
        } else if (a.is_var()) {
          expect(a, sort_of(b));
        } else if (b.is_var()) {
          expect(b, sort_of(a));
        } else {
          join(sort_of(a), sort_of(b), "'" + to_string(p) + "'");
        }
        return;
      }
      case Pure::Kind::Le:
        expect(p.left(), Sort::integer());
        expect(p.right(), Sort::integer());
        return;
      default:
        for (const auto& k : p.kids()) visit(k);
    }
  }

  void visit(const SpatialAtom& a) {
    if (a.is_points_to()) {
      constrain(a.head, Sort::ref(a.name));
      if (const DataDef* d = defs_.find_data(a.name)) {
        for (std::size_t i = 0; i < a.args.size() && i < d->fields.size(); ++i) {
          expect(a.args[i], Sort::of_type(d->fields[i].type));
        }
      }
      return;
    }
    auto it = ps_.find(a.name);
    if (it == ps_.end()) return;
    for (std::size_t i = 0; i < a.args.size() && i < it->second.size(); ++i) expect(a.args[i], it->second[i]);
  }

  SortMap run(const SymbolicHeap& d, const SortMap& seed) {
    for (const auto& [v, s] : seed) constrain(v, s);
    for (const auto& v : all_vars(d)) find(v);
    // Field-access sorts depend on base sorts discovered later in the walk.
    for (int round = 0; round < 2; ++round) {
      for (const auto& a : d.spatial) visit(a);
      for (const auto& p : d.pure) visit(p);
    }
    SortMap out;
    for (const auto& [v, _] : parent_) out[v] = sort_[find(v)];
    return out;
  }

 private:
  const SpecFile& defs_;
  const PredSorts& ps_;
  std::map<std::string, std::string> parent_;
  std::map<std::string, Sort> sort_;
};

}  // namespace

PredSorts pred_param_sorts(const SpecFile& defs) {
  PredSorts ps;
  for (const auto& p : defs.preds) ps[p.name] = std::vector<Sort>(p.params.size());
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& p : defs.preds) {
      for (const auto& d : p.body.disjuncts) {
        SortMap seed;
        for (std::size_t i = 0; i < p.params.size(); ++i) seed[p.params[i]] = ps[p.name][i];
        SortMap m;
        try {
          m = infer_sorts(d, defs, ps, seed);
        } catch (const ValidationError& e) {
          throw ValidationError("predicate " + p.name + ": " + e.what());
        }
        for (std::size_t i = 0; i < p.params.size(); ++i) {
          auto it = m.find(p.params[i]);
          if (it == m.end()) continue;
          Sort s = join(ps[p.name][i], it->second, "parameter '" + p.params[i] + "' of " + p.name);
          if (!(s == ps[p.name][i])) {
            ps[p.name][i] = s;
            changed = true;
          }
        }
      }
    }
  }
  return ps;
}

SortMap infer_sorts(const SymbolicHeap& d, const SpecFile& defs, const PredSorts& ps, const SortMap& seed) {
  Inference inf(defs, ps);
  return inf.run(d, seed);
}

SortMap infer_sorts(const SymbolicHeap& d, const SpecFile& defs, const SortMap& seed) {
  return infer_sorts(d, defs, pred_param_sorts(defs), seed);
}

}  // namespace slc
