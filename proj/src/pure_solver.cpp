#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

#include "slc/solver.hpp"

namespace slc {

std::string to_string(Decision d) {
  switch (d) {
    case Decision::Sat:
      return "SAT";
    case Decision::Unsat:
      return "UNSAT";
    case Decision::Unknown:
      return "UNKNOWN";
  }
  return "?";
}

namespace {

using i64 = std::int64_t;
using i128 = __int128;

constexpr i64 kInt32Min = std::numeric_limits<std::int32_t>::min();
constexpr i64 kInt32Max = std::numeric_limits<std::int32_t>::max();

// Σ coef·x + c  (compared against 0)
struct Lin {
  std::map<int, i64> coef;
  i64 c = 0;

  void add(const Lin& o, i64 k) {
    for (const auto& [v, a] : o.coef) {
      i64& slot = coef[v];
      slot += a * k;
      if (slot == 0) coef.erase(v);
    }
    c += o.c * k;
  }
  bool operator<(const Lin& o) const { return std::tie(coef, c) < std::tie(o.coef, o.c); }
  bool operator==(const Lin& o) const = default;
};

enum class LitKind { RefEq, RefNe, Eq, Ne, Le, NlEq, NlNe, NlLe, False };

struct Lit {
  LitKind kind = LitKind::False;
  int a = 0;  // ref node ids (0 is null)
  int b = 0;
  Lin lin;
  Term diff;  // nonlinear: diff op 0
};

struct Node {
  bool is_or = false;
  Lit lit;
  std::vector<std::vector<Node>> alts;
};

class Problem {
 public:
  Problem(const SortMap& sorts, const SolverConfig& cfg) : sorts_(sorts), cfg_(cfg) {
    ref_names_.push_back("");  // null
  }

  bool is_ref_var(const std::string& v) const {
    auto it = sorts_.find(v);
    return it != sorts_.end() && it->second.kind == Sort::Kind::Ref;
  }
  bool is_bool_var(const std::string& v) const {
    auto it = sorts_.find(v);
    return it != sorts_.end() && it->second.kind == Sort::Kind::Bool;
  }
  bool is_ref_term(const Term& t) const { return t.is_null() || (t.is_var() && is_ref_var(t.name())); }

  int ref_id(const Term& t) {
    if (t.is_null()) return 0;
    if (!t.is_var()) throw std::invalid_argument("location term must be a variable or null: " + to_string(t));
    auto it = ref_ids_.find(t.name());
    if (it != ref_ids_.end()) return it->second;
    int id = static_cast<int>(ref_names_.size());
    ref_names_.push_back(t.name());
    ref_ids_.emplace(t.name(), id);
    return id;
  }

  int int_id(const std::string& v) {
    auto it = int_ids_.find(v);
    if (it != int_ids_.end()) return it->second;
    int id = static_cast<int>(int_names_.size());
    int_names_.push_back(v);
    int_ids_.emplace(v, id);
    return id;
  }

  std::optional<Lin> linearize(const Term& t) {
    Lin out;
    switch (t.kind()) {
      case Term::Kind::Int:
        out.c = t.value();
        return out;
      case Term::Kind::Bool:
        out.c = t.value();
        return out;
      case Term::Kind::Null:
        throw std::invalid_argument("null in arithmetic");
      case Term::Kind::Var:
        out.coef[int_id(t.name())] = 1;
        return out;
      case Term::Kind::Field:
        throw std::invalid_argument("field access reached the solver: " + to_string(t));
      case Term::Kind::Scale: {
        auto a = linearize(t.operand());
        if (!a) return std::nullopt;
        Lin r;
        r.add(*a, t.value());
        return r;
      }
      case Term::Kind::Add: {
        auto a = linearize(t.lhs());
        auto b = linearize(t.rhs());
        if (!a || !b) return std::nullopt;
        a->add(*b, 1);
        return a;
      }
      case Term::Kind::Neg: {
        auto a = linearize(t.operand());
        if (!a) return std::nullopt;
        Lin r;
        r.add(*a, -1);
        return r;
      }
      case Term::Kind::Mul: {
        auto a = linearize(t.lhs());
        auto b = linearize(t.rhs());
        if (!a || !b) return std::nullopt;
        if (a->coef.empty()) {
          Lin r;
          r.add(*b, a->c);
          return r;
        }
        if (b->coef.empty()) {
          Lin r;
          r.add(*a, b->c);
          return r;
        }
        return std::nullopt;
      }
    }
    return std::nullopt;
  }

  void register_vars(const Term& t) {
    if (t.is_var()) {
      if (!is_ref_var(t.name())) int_id(t.name());
    }
    for (const auto& k : t.kids()) register_vars(k);
  }

  Lit comparison(bool eq, const Term& a, const Term& b, bool positive) {
    Lit l;
    if (eq && (is_ref_term(a) || is_ref_term(b))) {
      l.kind = positive ? LitKind::RefEq : LitKind::RefNe;
      l.a = ref_id(a);
      l.b = ref_id(b);
      return l;
    }
    Term diff = eq || positive ? Term::sub(a, b) : Term::add(Term::sub(b, a), Term::constant(1));
    register_vars(diff);
    if (auto lin = linearize(diff)) {
      l.lin = *lin;
      l.kind = eq ? (positive ? LitKind::Eq : LitKind::Ne) : LitKind::Le;
    } else {
      l.diff = diff;
      l.kind = eq ? (positive ? LitKind::NlEq : LitKind::NlNe) : LitKind::NlLe;
    }
    return l;
  }

  void to_nodes(const Pure& p, bool positive, std::vector<Node>& out) {
    switch (p.kind()) {
      case Pure::Kind::True:
        if (!positive) out.push_back(Node{false, Lit{}, {}});
        return;
      case Pure::Kind::Eq:
        out.push_back(Node{false, comparison(true, p.left(), p.right(), positive), {}});
        return;
      case Pure::Kind::Le:
        out.push_back(Node{false, comparison(false, p.left(), p.right(), positive), {}});
        return;
      case Pure::Kind::Not:
        to_nodes(p.operand(), !positive, out);
        return;
      case Pure::Kind::And:
        if (positive) {
          for (const auto& k : p.kids()) to_nodes(k, true, out);
        } else {
          Node n;
          n.is_or = true;
          for (const auto& k : p.kids()) {
            std::vector<Node> alt;
            to_nodes(k, false, alt);
            n.alts.push_back(std::move(alt));
          }
          out.push_back(std::move(n));
        }
        return;
      case Pure::Kind::FieldAssign:
        throw std::invalid_argument("field assignment reached the solver: " + to_string(p));
    }
  }

  // ---- alias part -------------------------------------------------------

  struct RefState {
    std::vector<int> parent;
    int find(int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    }
  };

  // Returns false on contradiction.
  bool solve_refs(const std::vector<const Lit*>& lits, std::map<std::string, PureValue>* out) {
    RefState uf;
    uf.parent.resize(ref_names_.size());
    std::iota(uf.parent.begin(), uf.parent.end(), 0);
    for (const Lit* l : lits) {
      if (l->kind == LitKind::RefEq) {
        int x = uf.find(l->a), y = uf.find(l->b);
        if (x != y) uf.parent[std::max(x, y)] = std::min(x, y);  // null (0) stays the root
      }
    }
    std::vector<std::pair<int, int>> ne;
    for (const Lit* l : lits) {
      if (l->kind == LitKind::RefNe) {
        int x = uf.find(l->a), y = uf.find(l->b);
        if (x == y) return false;
        ne.emplace_back(x, y);
      }
    }
    if (!out) return true;
    // Greedy: a class is null unless a disequality forbids it.
    std::map<int, bool> is_null;
    is_null[0] = true;
    for (std::size_t id = 1; id < ref_names_.size(); ++id) {
      int r = uf.find(static_cast<int>(id));
      if (is_null.count(r)) continue;
      bool can_null = true;
      for (auto [x, y] : ne) {
        int other = x == r ? y : (y == r ? x : -1);
        if (other < 0) continue;
        auto it = is_null.find(other);
        if (it != is_null.end() && it->second) can_null = false;
      }
      is_null[r] = can_null;
    }
    for (std::size_t id = 1; id < ref_names_.size(); ++id) {
      int r = uf.find(static_cast<int>(id));
      PureValue v;
      if (is_null[r]) {
        v.kind = PureValue::Kind::Null;
      } else {
        v.kind = PureValue::Kind::Loc;
        v.loc = ref_names_[r];
      }
      (*out)[ref_names_[id]] = v;
    }
    return true;
  }

  // ---- integer part -----------------------------------------------------

  struct Interval {
    i64 lo;
    i64 hi;
  };

  enum class Outcome { Sat, Unsat, Unknown };

  static i64 floor_div(i128 a, i64 b) {
    i128 q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return static_cast<i64>(std::clamp<i128>(q, std::numeric_limits<i64>::min() / 4, std::numeric_limits<i64>::max() / 4));
  }
  static i64 ceil_div(i128 a, i64 b) { return -floor_div(-a, b); }

  static bool prop_le(const Lin& l, std::vector<Interval>& dom, bool& changed) {
    i128 min_sum = l.c;
    for (const auto& [v, a] : l.coef) min_sum += a > 0 ? static_cast<i128>(a) * dom[v].lo : static_cast<i128>(a) * dom[v].hi;
    if (min_sum > 0) return false;
    for (const auto& [v, a] : l.coef) {
      i128 mine = a > 0 ? static_cast<i128>(a) * dom[v].lo : static_cast<i128>(a) * dom[v].hi;
      i128 r = -(min_sum - mine);  // a·x ≤ r
      if (a > 0) {
        i64 ub = floor_div(r, a);
        if (ub < dom[v].hi) {
          dom[v].hi = ub;
          changed = true;
        }
      } else {
        i64 lb = ceil_div(r, a);
        if (lb > dom[v].lo) {
          dom[v].lo = lb;
          changed = true;
        }
      }
      if (dom[v].lo > dom[v].hi) return false;
    }
    return true;
  }

  static bool prop_ne(const Lin& l, std::vector<Interval>& dom, bool& changed) {
    int open = -1;
    i128 sum = l.c;
    for (const auto& [v, a] : l.coef) {
      if (dom[v].lo == dom[v].hi) {
        sum += static_cast<i128>(a) * dom[v].lo;
      } else if (open >= 0) {
        return true;
      } else {
        open = v;
      }
    }
    if (open < 0) return sum != 0;
    i64 a = l.coef.at(open);
    if (sum % a != 0) return true;
    i64 bad = static_cast<i64>(-sum / a);
    if (dom[open].lo == bad) {
      ++dom[open].lo;
      changed = true;
    }
    if (dom[open].hi == bad) {
      --dom[open].hi;
      changed = true;
    }
    return dom[open].lo <= dom[open].hi;
  }

  std::optional<i64> eval_term(const Term& t, const std::vector<Interval>& dom) const {
    switch (t.kind()) {
      case Term::Kind::Int:
      case Term::Kind::Bool:
        return t.value();
      case Term::Kind::Var: {
        int v = int_ids_.at(t.name());
        if (dom[v].lo != dom[v].hi) return std::nullopt;
        return dom[v].lo;
      }
      case Term::Kind::Scale: {
        auto a = eval_term(t.operand(), dom);
        if (!a) return std::nullopt;
        return t.value() * *a;
      }
      case Term::Kind::Neg: {
        auto a = eval_term(t.operand(), dom);
        if (!a) return std::nullopt;
        return -*a;
      }
      case Term::Kind::Add:
      case Term::Kind::Mul: {
        auto a = eval_term(t.lhs(), dom);
        auto b = eval_term(t.rhs(), dom);
        if (!a || !b) return std::nullopt;
        return t.kind() == Term::Kind::Add ? *a + *b : *a * *b;
      }
      default:
        throw std::invalid_argument("unexpected term in arithmetic: " + to_string(t));
    }
  }

  bool check_nl(const Lit& l, const std::vector<Interval>& dom) const {
    auto v = eval_term(l.diff, dom);
    if (!v) return true;
    switch (l.kind) {
      case LitKind::NlEq:
        return *v == 0;
      case LitKind::NlNe:
        return *v != 0;
      default:
        return *v <= 0;
    }
  }

  bool propagate(const std::vector<const Lit*>& lits, std::vector<Interval>& dom) const {
    for (int pass = 0; pass < 256; ++pass) {
      bool changed = false;
      for (const Lit* l : lits) {
        bool ok = true;
        switch (l->kind) {
          case LitKind::Le:
            ok = prop_le(l->lin, dom, changed);
            break;
          case LitKind::Eq: {
            Lin neg;
            neg.add(l->lin, -1);
            ok = prop_le(l->lin, dom, changed) && prop_le(neg, dom, changed);
            break;
          }
          case LitKind::Ne:
            ok = prop_ne(l->lin, dom, changed);
            break;
          case LitKind::NlEq:
          case LitKind::NlNe:
          case LitKind::NlLe:
            ok = check_nl(*l, dom);
            break;
          default:
            break;
        }
        if (!ok) return false;
      }
      if (!changed) return true;
    }
    return true;
  }

  // Candidates ordered by |v|, negative first on ties, clipped to [lo, hi].
  static std::vector<i64> candidates(const Interval& d) {
    std::vector<i64> out;
    if (d.lo > 0 || d.hi < 0) {
      // The interval does not contain 0: walk outward from the bound nearest 0.
      if (d.lo > 0) {
        for (i64 v = d.lo; v <= d.hi; ++v) out.push_back(v);
      } else {
        for (i64 v = d.hi; v >= d.lo; --v) out.push_back(v);
      }
      return out;
    }
    out.push_back(0);
    for (i64 k = 1; -k >= d.lo || k <= d.hi; ++k) {
      if (-k >= d.lo) out.push_back(-k);
      if (k <= d.hi) out.push_back(k);
    }
    return out;
  }

  Outcome label(const std::vector<const Lit*>& lits, std::vector<Interval> dom, const std::vector<int>& order,
                std::size_t& nodes, std::vector<Interval>& solution) const {
    if (++nodes > cfg_.max_pure_nodes) return Outcome::Unknown;
    if (!propagate(lits, dom)) return Outcome::Unsat;
    int next = -1;
    for (int v : order) {
      if (dom[v].lo != dom[v].hi) {
        next = v;
        break;
      }
    }
    if (next < 0) {
      for (const Lit* l : lits) {
        bool ok = true;
        switch (l->kind) {
          case LitKind::Le:
          case LitKind::Eq:
          case LitKind::Ne: {
            i128 s = l->lin.c;
            for (const auto& [v, a] : l->lin.coef) s += static_cast<i128>(a) * dom[v].lo;
            ok = l->kind == LitKind::Le ? s <= 0 : (l->kind == LitKind::Eq ? s == 0 : s != 0);
            break;
          }
          case LitKind::NlEq:
          case LitKind::NlNe:
          case LitKind::NlLe:
            ok = check_nl(*l, dom);
            break;
          default:
            break;
        }
        if (!ok) return Outcome::Unsat;
      }
      solution = dom;
      return Outcome::Sat;
    }
    bool unknown = false;
    for (i64 v : candidates(dom[next])) {
      auto d2 = dom;
      d2[next] = {v, v};
      auto r = label(lits, d2, order, nodes, solution);
      if (r == Outcome::Sat) return r;
      if (r == Outcome::Unknown) {
        unknown = true;
        break;
      }
    }
    return unknown ? Outcome::Unknown : Outcome::Unsat;
  }

  // ---- unbounded infeasibility proof -------------------------------------

  static bool normalize_le(Lin& l, bool& infeasible) {
    if (l.coef.empty()) {
      infeasible = l.c > 0;
      return false;
    }
    i64 g = 0;
    for (const auto& [v, a] : l.coef) g = std::gcd(g, a < 0 ? -a : a);
    if (g > 1) {
      for (auto& [v, a] : l.coef) a /= g;
      l.c = ceil_div(l.c, g);
    }
    return true;
  }

  bool fm_infeasible(std::vector<Lin> sys) const {
    std::set<Lin> cur;
    for (auto& l : sys) {
      bool inf = false;
      if (normalize_le(l, inf)) {
        cur.insert(l);
      } else if (inf) {
        return true;
      }
    }
    while (!cur.empty()) {
      std::map<int, std::pair<int, int>> counts;
      for (const auto& l : cur) {
        for (const auto& [v, a] : l.coef) (a > 0 ? counts[v].first : counts[v].second)++;
      }
      int best = -1;
      long best_cost = std::numeric_limits<long>::max();
      for (const auto& [v, pn] : counts) {
        long cost = static_cast<long>(pn.first) * pn.second - pn.first - pn.second;
        if (cost < best_cost) {
          best_cost = cost;
          best = v;
        }
      }
      std::vector<Lin> pos, neg;
      std::set<Lin> next;
      for (const auto& l : cur) {
        auto it = l.coef.find(best);
        if (it == l.coef.end()) {
          next.insert(l);
        } else if (it->second > 0) {
          pos.push_back(l);
        } else {
          neg.push_back(l);
        }
      }
      for (const auto& p : pos) {
        for (const auto& n : neg) {
          i64 ap = p.coef.at(best);
          i64 an = -n.coef.at(best);
          Lin r;
          r.add(p, an);
          r.add(n, ap);
          for (const auto& [v, a] : r.coef) {
            if (a > (1LL << 40) || a < -(1LL << 40)) return false;
          }
          if (r.c > (1LL << 50) || r.c < -(1LL << 50)) return false;
          bool inf = false;
          if (normalize_le(r, inf)) {
            next.insert(r);
          } else if (inf) {
            return true;
          }
        }
      }
      if (next.size() > 4000) return false;
      cur = std::move(next);
    }
    return false;
  }

  bool int_proven_unsat(const std::vector<const Lit*>& lits) const {
    std::vector<Lin> sys;
    for (const Lit* l : lits) {
      if (l->kind == LitKind::Le) {
        sys.push_back(l->lin);
      } else if (l->kind == LitKind::Eq) {
        sys.push_back(l->lin);
        Lin n;
        n.add(l->lin, -1);
        sys.push_back(n);
      }
    }
    for (std::size_t v = 0; v < int_names_.size(); ++v) {
      i64 lo = is_bool_var(int_names_[v]) ? 0 : kInt32Min;
      i64 hi = is_bool_var(int_names_[v]) ? 1 : kInt32Max;
      Lin up;
      up.coef[static_cast<int>(v)] = 1;
      up.c = -hi;
      Lin down;
      down.coef[static_cast<int>(v)] = -1;
      down.c = lo;
      sys.push_back(up);
      sys.push_back(down);
    }
    if (fm_infeasible(sys)) return true;
    for (const Lit* l : lits) {
      if (l->kind != LitKind::Ne) continue;
      auto below = sys;  // e ≤ -1
      Lin b = l->lin;
      b.c += 1;
      below.push_back(b);
      auto above = sys;  // e ≥ 1
      Lin a;
      a.add(l->lin, -1);
      a.c += 1;
      above.push_back(a);
      if (fm_infeasible(below) && fm_infeasible(above)) return true;
    }
    return false;
  }

  // ---- leaves and search -------------------------------------------------

  struct LeafResult {
    Outcome outcome = Outcome::Unsat;
    bool bounded = false;
    std::map<std::string, PureValue> values;
  };

  LeafResult solve_leaf(const std::vector<const Lit*>& lits, const std::vector<int>& order, std::size_t& nodes,
                        bool want_model) {
    LeafResult res;
    for (const Lit* l : lits) {
      if (l->kind == LitKind::False) return res;
    }
    std::map<std::string, PureValue> values;
    if (!solve_refs(lits, want_model ? &values : nullptr)) return res;
    std::vector<Interval> dom(int_names_.size());
    for (std::size_t v = 0; v < int_names_.size(); ++v) {
      dom[v] = is_bool_var(int_names_[v]) ? Interval{0, 1} : Interval{cfg_.int_lo, cfg_.int_hi};
    }
    std::vector<Interval> sol;
    auto out = label(lits, dom, order, nodes, sol);
    if (out == Outcome::Sat) {
      res.outcome = Outcome::Sat;
      if (want_model) {
        for (std::size_t v = 0; v < int_names_.size(); ++v) {
          PureValue pv;
          pv.kind = PureValue::Kind::Int;
          pv.value = sol[v].lo;
          values[int_names_[v]] = pv;
        }
        res.values = std::move(values);
      }
      return res;
    }
    if (out == Outcome::Unknown) {
      res.outcome = Outcome::Unknown;
      return res;
    }
    res.bounded = !int_proven_unsat(lits);
    return res;
  }

  // Depth-first over disjunctions; first satisfiable leaf wins.
  LeafResult search(std::vector<const Lit*> lits, std::vector<const Node*> pending, const std::vector<int>& order,
                    std::size_t& nodes, bool want_model, bool& any_bounded, bool& any_unknown) {
    while (!pending.empty() && !pending.front()->is_or) {
      lits.push_back(&pending.front()->lit);
      pending.erase(pending.begin());
    }
    auto or_it = std::find_if(pending.begin(), pending.end(), [](const Node* n) { return n->is_or; });
    if (or_it == pending.end()) {
      auto r = solve_leaf(lits, order, nodes, want_model);
      if (r.outcome == Outcome::Unknown) any_unknown = true;
      if (r.outcome == Outcome::Unsat && r.bounded) any_bounded = true;
      return r;
    }
    // Cheap pruning before branching.
    for (auto it = pending.begin(); it != pending.end(); ++it) {
      if (!(*it)->is_or) lits.push_back(&(*it)->lit);
    }
    const Node* split = *or_it;
    std::vector<const Node*> rest;
    for (const Node* n : pending) {
      if (n->is_or && n != split) rest.push_back(n);
    }
    if (!solve_refs(lits, nullptr)) return {};
    for (const auto& alt : split->alts) {
      std::vector<const Node*> next;
      for (const auto& n : alt) next.push_back(&n);
      next.insert(next.end(), rest.begin(), rest.end());
      auto r = search(lits, next, order, nodes, want_model, any_bounded, any_unknown);
      if (r.outcome == Outcome::Sat) return r;
      if (nodes > cfg_.max_pure_nodes) {
        any_unknown = true;
        return {};
      }
    }
    return {};
  }

  std::vector<int> label_order(const std::vector<std::string>& hint, const std::vector<Pure>& conjuncts) {
    std::vector<int> order;
    std::set<int> seen;
    auto push = [&](const std::string& v) {
      auto it = int_ids_.find(v);
      if (it != int_ids_.end() && seen.insert(it->second).second) order.push_back(it->second);
    };
    for (const auto& v : hint) push(v);
    std::function<void(const Term&)> walk_t = [&](const Term& t) {
      if (t.is_var()) push(t.name());
      for (const auto& k : t.kids()) walk_t(k);
    };
    std::function<void(const Pure&)> walk = [&](const Pure& p) {
      if (p.kind() == Pure::Kind::Eq || p.kind() == Pure::Kind::Le) {
        walk_t(p.left());
        walk_t(p.right());
      }
      for (const auto& k : p.kids()) walk(k);
    };
    for (const auto& p : conjuncts) walk(p);
    for (std::size_t v = 0; v < int_names_.size(); ++v) {
      if (seen.insert(static_cast<int>(v)).second) order.push_back(static_cast<int>(v));
    }
    return order;
  }

  PureResult run(const std::vector<Pure>& conjuncts, const std::vector<std::string>& hint, bool want_model) {
    std::vector<Node> roots;
    for (const auto& p : conjuncts) to_nodes(p, true, roots);
    auto order = label_order(hint, conjuncts);
    std::vector<const Node*> pending;
    for (const auto& n : roots) pending.push_back(&n);
    std::size_t nodes = 0;
    bool any_bounded = false, any_unknown = false;
    auto r = search({}, pending, order, nodes, want_model, any_bounded, any_unknown);
    PureResult out;
    out.nodes = nodes;
    if (r.outcome == Outcome::Sat) {
      out.status = Decision::Sat;
      out.values = std::move(r.values);
    } else if (any_unknown) {
      out.status = Decision::Unknown;
    } else {
      out.status = Decision::Unsat;
      out.bounded = any_bounded;
    }
    return out;
  }

  bool proof(const std::vector<Pure>& conjuncts) {
    std::vector<Node> roots;
    for (const auto& p : conjuncts) to_nodes(p, true, roots);
    std::size_t branches = 0;
    std::function<bool(std::vector<const Lit*>, std::vector<const Node*>)> all_closed =
        [&](std::vector<const Lit*> lits, std::vector<const Node*> pending) -> bool {
      const Node* split = nullptr;
      std::vector<const Node*> rest;
      for (const Node* n : pending) {
        if (n->is_or && !split) {
          split = n;
        } else if (n->is_or) {
          rest.push_back(n);
        } else {
          lits.push_back(&n->lit);
        }
      }
      for (const Lit* l : lits) {
        if (l->kind == LitKind::False) return true;
      }
      if (!solve_refs(lits, nullptr)) return true;
      if (!split) return int_proven_unsat(lits);
      if (int_proven_unsat(lits)) return true;
      for (const auto& alt : split->alts) {
        if (++branches > 256) return false;
        std::vector<const Node*> next = rest;
        for (const auto& n : alt) next.push_back(&n);
        if (!all_closed(lits, next)) return false;
      }
      return true;
    };
    std::vector<const Node*> pending;
    for (const auto& n : roots) pending.push_back(&n);
    return all_closed({}, pending);
  }

 private:
  const SortMap& sorts_;
  const SolverConfig& cfg_;
  std::vector<std::string> ref_names_;
  std::map<std::string, int> ref_ids_;
  std::vector<std::string> int_names_;
  std::map<std::string, int> int_ids_;
};

}  // namespace

PureResult pure_solve(const std::vector<Pure>& conjuncts, const SortMap& sorts, const SolverConfig& cfg,
                      const std::vector<std::string>& order) {
  Problem p(sorts, cfg);
  return p.run(conjuncts, order, true);
}

bool proven_unsat(const std::vector<Pure>& conjuncts, const SortMap& sorts, const SolverConfig& cfg) {
  Problem p(sorts, cfg);
  return p.proof(conjuncts);
}

namespace {

std::optional<PureValue> eval_value(const Term& t, const std::map<std::string, PureValue>& values) {
  PureValue out;
  switch (t.kind()) {
    case Term::Kind::Null:
      return out;
    case Term::Kind::Int:
    case Term::Kind::Bool:
      out.kind = PureValue::Kind::Int;
      out.value = t.value();
      return out;
    case Term::Kind::Var:
      return values.at(t.name());
    case Term::Kind::Field:
      throw std::invalid_argument("field access in eval_pure");
    default: {
      out.kind = PureValue::Kind::Int;
      std::vector<std::int64_t> ks;
      for (const auto& k : t.kids()) ks.push_back(eval_value(k, values)->value);
      switch (t.kind()) {
        case Term::Kind::Scale:
          out.value = t.value() * ks[0];
          break;
        case Term::Kind::Neg:
          out.value = -ks[0];
          break;
        case Term::Kind::Add:
          out.value = ks[0] + ks[1];
          break;
        default:
          out.value = ks[0] * ks[1];
      }
      return out;
    }
  }
}

}  // namespace

bool eval_pure(const Pure& p, const std::map<std::string, PureValue>& values) {
  switch (p.kind()) {
    case Pure::Kind::True:
      return true;
    case Pure::Kind::Eq:
      return *eval_value(p.left(), values) == *eval_value(p.right(), values);
    case Pure::Kind::Le:
      return eval_value(p.left(), values)->value <= eval_value(p.right(), values)->value;
    case Pure::Kind::Not:
      return !eval_pure(p.operand(), values);
    case Pure::Kind::And:
      return std::all_of(p.kids().begin(), p.kids().end(), [&](const Pure& k) { return eval_pure(k, values); });
    case Pure::Kind::FieldAssign:
      throw std::invalid_argument("field assignment in eval_pure");
  }
  return false;
}

}  // namespace slc
