#include <chrono>
#include <deque>
#include <numeric>

#include "slc/solver.hpp"
#include "slc/unfold.hpp"

namespace slc {

namespace {

// Union-find over variable names; "" stands for null.
class Aliases {
 public:
  std::string find(const std::string& v) {
    auto it = parent_.find(v);
    if (it == parent_.end() || it->second == v) return v;
    auto r = find(it->second);
    parent_[v] = r;
    return r;
  }
  void unite(const std::string& a, const std::string& b) {
    auto x = find(a), y = find(b);
    if (x == y) return;
    if (y.empty()) std::swap(x, y);  // null stays the root
    parent_[y] = x;
  }

 private:
  std::map<std::string, std::string> parent_;
};

std::optional<std::string> alias_name(const Term& t) {
  if (t.is_null()) return std::string();
  if (t.is_var()) return t.name();
  return std::nullopt;
}

Aliases syntactic_aliases(const SymbolicHeap& d) {
  Aliases al;
  for (const auto& p : d.pure) {
    for (const auto& c : conjuncts(p)) {
      if (c.kind() != Pure::Kind::Eq) continue;
      auto a = alias_name(c.left());
      auto b = alias_name(c.right());
      if (a && b) al.unite(*a, *b);
    }
  }
  return al;
}

std::vector<Pure> flat_pure(const SymbolicHeap& d) {
  std::vector<Pure> out;
  for (const auto& p : d.pure) {
    for (auto& c : conjuncts(p)) out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

Saturation saturate(const SymbolicHeap& d) {
  Saturation s;
  auto al = syntactic_aliases(d);
  std::vector<std::string> heads;
  for (const auto& a : d.spatial) {
    if (a.is_points_to()) heads.push_back(a.head);
  }
  for (std::size_t i = 0; i < heads.size(); ++i) {
    if (al.find(heads[i]).empty()) s.contradiction = true;
    s.additions.push_back(Pure::ne(Term::var(heads[i]), Term::null()));
  }
  for (std::size_t i = 0; i < heads.size(); ++i) {
    for (std::size_t j = i + 1; j < heads.size(); ++j) {
      if (al.find(heads[i]) == al.find(heads[j])) s.contradiction = true;
      s.additions.push_back(Pure::ne(Term::var(heads[i]), Term::var(heads[j])));
    }
  }
  return s;
}

bool entails_eq(const SymbolicHeap& d, const std::string& v, const Term& other) {
  auto o = alias_name(other);
  if (!o) return false;
  if (v == *o) return true;
  auto al = syntactic_aliases(d);
  return al.find(v) == al.find(*o);
}

SymbolicHeap SymbolicModel::to_heap() const {
  SymbolicHeap h;
  h.spatial = cells;
  for (const auto& [v, t] : values) h.pure.push_back(Pure::eq(Term::var(v), t));
  for (const auto& v : dangling) h.pure.push_back(Pure::ne(Term::var(v), Term::null()));
  return h;
}

namespace {

using Clock = std::chrono::steady_clock;

struct Budget {
  Clock::time_point deadline;
  bool expired() const { return Clock::now() > deadline; }
};

std::vector<std::string> label_hint(const SymbolicHeap& d) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  auto push = [&](const std::string& v) {
    if (seen.insert(v).second) out.push_back(v);
  };
  for (const auto& a : d.spatial) {
    if (a.is_points_to()) push(a.head);
    for (const auto& t : a.args) {
      std::set<std::string> vs;
      collect_vars(t, vs);
      for (const auto& v : vs) push(v);
    }
  }
  return out;
}

Term default_value(const Sort& s) {
  switch (s.kind) {
    case Sort::Kind::Ref:
      return Term::null();
    case Sort::Kind::Bool:
      return Term::boolean(false);
    default:
      return Term::constant(0);
  }
}

SymbolicModel build_model(const SymbolicHeap& base, const SortMap& sorts, const PureResult& r,
                          const std::set<std::string>& query_free) {
  SymbolicModel m;
  std::set<std::string> heads;
  for (const auto& a : base.spatial) {
    m.cells.push_back(a);
    heads.insert(a.head);
  }
  // Location classes: representative -> allocated head in that class.
  std::map<std::string, std::string> class_head;
  for (const auto& h : heads) {
    auto it = r.values.find(h);
    if (it != r.values.end() && it->second.kind == PureValue::Kind::Loc) class_head[it->second.loc] = h;
  }
  auto vars = all_vars(base);
  vars.insert(query_free.begin(), query_free.end());
  for (const auto& v : vars) {
    if (heads.count(v)) continue;
    auto sit = sorts.find(v);
    Sort s = sit == sorts.end() ? Sort::integer() : sit->second;
    auto it = r.values.find(v);
    if (it == r.values.end()) {
      m.values[v] = default_value(s);
      continue;
    }
    const PureValue& pv = it->second;
    switch (pv.kind) {
      case PureValue::Kind::Null:
        m.values[v] = Term::null();
        break;
      case PureValue::Kind::Int:
        m.values[v] = s.kind == Sort::Kind::Bool ? Term::boolean(pv.value != 0)
                                                 : Term::constant(static_cast<std::int32_t>(pv.value));
        break;
      case PureValue::Kind::Loc: {
        auto h = class_head.find(pv.loc);
        if (h != class_head.end()) {
          m.values[v] = Term::var(h->second);
        } else if (pv.loc == v) {
          m.dangling.insert(v);
        } else {
          m.values[v] = Term::var(pv.loc);
          m.dangling.insert(pv.loc);
        }
        break;
      }
    }
  }
  return m;
}

}  // namespace

SatResult sat(const SymbolicHeap& d, const SpecFile& defs, const SolverConfig& cfg) {
  SatResult res;
  Budget budget{Clock::now() + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(cfg.time_limit))};
  auto ps = pred_param_sorts(defs);
  SortMap root_sorts = infer_sorts(d, defs, ps);
  auto query_free = free_vars(d);

  // Each heap carries the unfolding depth of its spatial atoms.
  std::deque<std::pair<SymbolicHeap, std::vector<int>>> queue;
  queue.emplace_back(d, std::vector<int>(d.spatial.size(), 0));
  bool open = false;
  while (!queue.empty()) {
    if (budget.expired() || res.stats.heaps >= cfg.max_heaps) {
      res.stats.timed_out = true;
      open = true;
      break;
    }
    auto [h, depths] = std::move(queue.front());
    queue.pop_front();
    ++res.stats.heaps;

    auto satn = saturate(h);
    if (satn.contradiction) continue;
    auto pure = flat_pure(h);
    pure.insert(pure.end(), satn.additions.begin(), satn.additions.end());
    SortMap sorts = infer_sorts(h, defs, ps, root_sorts);
    if (proven_unsat(pure, sorts, cfg)) continue;

    if (h.is_base()) {
      auto r = pure_solve(pure, sorts, cfg, label_hint(h));
      res.stats.pure_nodes += r.nodes;
      if (r.status == Decision::Sat) {
        res.decision = Decision::Sat;
        res.model = build_model(h, sorts, r, query_free);
        return res;
      }
      if (r.status == Decision::Unknown) open = true;
      if (r.bounded) res.stats.bounded = true;
      continue;
    }
    std::size_t at = h.pred_positions().front();
    int depth = depths[at];
    if (depth >= cfg.unfold_depth) {
      open = true;
      continue;
    }
    res.stats.unfold_rounds = std::max(res.stats.unfold_rounds, depth + 1);
    for (auto& child : unfold_at(h, at, defs)) {
      std::size_t added = child.spatial.size() + 1 - h.spatial.size();
      std::vector<int> cd(depths.begin(), depths.begin() + static_cast<std::ptrdiff_t>(at));
      cd.insert(cd.end(), added, depth + 1);
      cd.insert(cd.end(), depths.begin() + static_cast<std::ptrdiff_t>(at) + 1, depths.end());
      queue.emplace_back(std::move(child), std::move(cd));
    }
  }
  res.decision = open ? Decision::Unknown : Decision::Unsat;
  return res;
}

}  // namespace slc
