#include <algorithm>
#include <functional>
#include <optional>
#include <set>

#include "slc/sorts.hpp"
#include "slc/testgen.hpp"
#include "slc/unfold.hpp"

namespace slc {

namespace {

struct Input {
  std::string name;
  Type type;
  bool enumerate = true;  // false: ghost searched by the evaluator
};

// Generates every store whose addresses follow breadth-first discovery
// order from the reference inputs, then every scalar filling.
class StoreGen {
 public:
  // Dangling locations are addresses above this with no object.
  static constexpr int kDangling = 1000;

  using Visit = std::function<bool(const Store&, const std::map<std::string, Value>&)>;

  // A points-to atom whose head is an enumerated input: the head must be a
  // distinct object of that type, and reference slots given as null or as
  // another input must hold that value.
  struct Pin {
    std::string head;
    std::string type;
    std::vector<std::optional<Term>> slots;
  };

  // A pure (dis)equality between inputs or null.
  struct Rel {
    Term a;
    Term b;
    bool negated;
  };

  StoreGen(const SpecFile& defs, const OracleBounds& b, std::vector<Input> inputs, bool dangling, Visit visit,
           std::vector<Pin> pins = {}, std::vector<Rel> rels = {})
      : defs_(defs),
        b_(b),
        inputs_(std::move(inputs)),
        dangling_(dangling),
        visit_(std::move(visit)),
        pins_(std::move(pins)),
        rels_(std::move(rels)) {
    for (const auto& d : defs.data) all_types_.push_back(d.name);
  }

  void run() {
    env_.clear();
    store_.clear();
    dangling_used_ = 0;
    refs(0, 1, 0);
  }

 private:
  std::vector<std::string> types_for(const std::string& t) const {
    if (!t.empty()) return {t};
    return all_types_;
  }

  // Choices for one reference hole; `fill` receives each value.
  bool choose(const std::string& type, const std::function<bool(const Value&)>& fill) {
    if (fill(Value::null())) return true;
    for (const auto& [a, obj] : store_) {
      if (type.empty() || obj.type == type) {
        if (fill(Value::address(a))) return true;
      }
    }
    for (int k = 1; k <= dangling_used_; ++k) {
      if (fill(Value::address(kDangling + k))) return true;
    }
    if (static_cast<int>(store_.size()) + dangling_used_ >= b_.max_objects) return false;
    if (dangling_) {
      ++dangling_used_;
      bool stop = fill(Value::address(kDangling + dangling_used_));
      --dangling_used_;
      if (stop) return true;
    }
    for (const auto& t : types_for(type)) {
      const DataDef* dd = defs_.find_data(t);
      if (!dd) continue;
      int a = static_cast<int>(store_.size()) + 1;
      HeapObject obj{t, {}};
      for (const auto& f : dd->fields) obj.slots.push_back(Value::default_for(Type::of_name(f.type)));
      store_[a] = std::move(obj);
      bool stop = fill(Value::address(a));
      store_.erase(a);
      if (stop) return true;
    }
    return false;
  }

  // Pins that can already be decided with slots before (obj, slot) filled.
  bool consistent(int obj, std::size_t slot) const {
    for (const auto& r : rels_) {
      auto a = lookup(r.a);
      auto b = lookup(r.b);
      if (a && b && (*a == *b) == r.negated) return false;
    }
    std::set<int> heads;
    for (const auto& p : pins_) {
      auto h = env_.find(p.head);
      if (h == env_.end()) continue;
      if (h->second.kind != Value::Kind::Addr) return false;
      auto it = store_.find(h->second.addr);
      if (it == store_.end() || it->second.type != p.type || !heads.insert(h->second.addr).second) return false;
      for (std::size_t i = 0; i < p.slots.size(); ++i) {
        if (!p.slots[i]) continue;
        if (h->second.addr > obj || (h->second.addr == obj && i >= slot)) break;
        const Term& t = *p.slots[i];
        Value want = Value::null();
        if (t.is_var()) {
          auto v = env_.find(t.name());
          if (v == env_.end()) continue;
          want = v->second;
        }
        if (it->second.slots[i] != want) return false;
      }
    }
    return true;
  }

  std::optional<Value> lookup(const Term& t) const {
    if (t.is_null()) return Value::null();
    auto it = env_.find(t.name());
    if (it == env_.end()) return std::nullopt;
    return it->second;
  }

  // Cursor: reference inputs first, then object `obj` slot `slot`.
  bool refs(std::size_t input, int obj, std::size_t slot) {
    while (input < inputs_.size() && !(inputs_[input].enumerate && inputs_[input].type.is_ref())) ++input;
    if ((!pins_.empty() || !rels_.empty()) && !consistent(obj, slot)) return false;
    if (input < inputs_.size()) {
      const auto& in = inputs_[input];
      return choose(in.type.data, [&](const Value& v) {
        env_[in.name] = v;
        bool stop = refs(input + 1, obj, slot);
        env_.erase(in.name);
        return stop;
      });
    }
    while (true) {
      auto it = store_.find(obj);
      if (it == store_.end()) return scalars();
      const DataDef* dd = defs_.find_data(it->second.type);
      while (slot < dd->fields.size() && is_scalar_type(dd->fields[slot].type)) ++slot;
      if (slot < dd->fields.size()) break;
      ++obj;
      slot = 0;
    }
    const DataDef* dd = defs_.find_data(store_.at(obj).type);
    return choose(dd->fields[slot].type, [&](const Value& v) {
      store_.at(obj).slots[slot] = v;
      return refs(input, obj, slot + 1);
    });
  }

  bool scalars() {
    std::vector<Value*> holes;
    std::vector<std::string> env_holes;
    for (auto& [a, obj] : store_) {
      for (auto& s : obj.slots) {
        if (s.kind == Value::Kind::Int || s.kind == Value::Kind::Bool) holes.push_back(&s);
      }
    }
    for (const auto& in : inputs_) {
      if (in.enumerate && !in.type.is_ref()) {
        env_[in.name] = Value::default_for(in.type);
        env_holes.push_back(in.name);
      }
    }
    for (const auto& n : env_holes) holes.push_back(&env_.at(n));
    std::function<bool(std::size_t)> fill = [&](std::size_t i) -> bool {
      if (i == holes.size()) return visit_(store_, env_);
      Value& h = *holes[i];
      if (h.kind == Value::Kind::Bool) {
        for (int k = 0; k <= 1; ++k) {
          h = Value::boolean(k);
          if (fill(i + 1)) return true;
        }
      } else {
        for (std::int32_t k = b_.lo; k <= b_.hi; ++k) {
          h = Value::integer(k);
          if (fill(i + 1)) return true;
        }
      }
      return false;
    };
    bool stop = fill(0);
    for (const auto& n : env_holes) env_.erase(n);
    return stop;
  }

  const SpecFile& defs_;
  OracleBounds b_;
  std::vector<Input> inputs_;
  bool dangling_;
  int dangling_used_ = 0;
  Visit visit_;
  std::vector<Pin> pins_;
  std::vector<Rel> rels_;
  std::vector<std::string> all_types_;
  Store store_;
  std::map<std::string, Value> env_;
};

// Fast path for oracle_exists: unfolds predicates until only points-to
// atoms remain (at most max_objects) and builds stores from each such heap.
// Heads get distinct addresses, other location variables range over null,
// the heads and dangling addresses, scalar slots over [lo, hi]. Candidates
// are confirmed by eval_heap on the original heap, so a hit is a witness; a
// miss proves nothing and the caller falls back to full enumeration.
class WitnessSearch {
 public:
  WitnessSearch(const SymbolicHeap& d, const SpecFile& defs, const OracleBounds& b, const EvalOptions& opts,
                std::vector<std::string> inputs)
      : d_(d), defs_(defs), b_(b), opts_(opts), inputs_(std::move(inputs)) {}

  bool run() { return expand(d_, 0); }

 private:
  static constexpr int kDangling = 1000;

  bool expand(const SymbolicHeap& h, int steps) {
    std::size_t cells = 0;
    for (const auto& a : h.spatial) cells += a.is_points_to();
    if (static_cast<int>(cells) > b_.max_objects) return false;
    auto preds = h.pred_positions();
    if (preds.empty()) return try_base(h);
    if (steps >= 3 * b_.max_objects + 3) return false;
    for (const auto& u : unfold_at(h, preds.front(), defs_)) {
      if (expand(u, steps + 1)) return true;
    }
    return false;
  }

  bool try_base(const SymbolicHeap& h) {
    SortMap sorts;
    try {
      sorts = infer_sorts(h, defs_);
    } catch (const std::exception&) {
      return false;
    }
    vals_.clear();
    heads_.clear();
    int k = 0;
    for (const auto& a : h.spatial) {
      if (!a.head.empty() && vals_.count(a.head)) return false;
      vals_[a.head] = Value::address(++k);
      heads_.push_back(&a);
    }
    locs_.clear();
    ints_.clear();
    for (const auto& [v, s] : sorts) {
      if (vals_.count(v)) continue;
      if (s.is_ref()) locs_.push_back(v);
    }
    for (const auto* a : heads_) {
      for (const auto& t : a->args) {
        if (t.is_var() && !vals_.count(t.name()) && !sorts.at(t.name()).is_ref() &&
            std::find(ints_.begin(), ints_.end(), t.name()) == ints_.end()) {
          ints_.push_back(t.name());
        }
        if (!t.is_var() && t.kind() != Term::Kind::Null && t.kind() != Term::Kind::Int &&
            t.kind() != Term::Kind::Bool) {
          return false;
        }
      }
    }
    checks_.clear();
    for (const auto& p : h.pure) {
      for (const auto& c : conjuncts(p)) {
        bool neg = c.kind() == Pure::Kind::Not && c.operand().kind() == Pure::Kind::Eq;
        const Pure& e = neg ? c.operand() : c;
        if (e.kind() != Pure::Kind::Eq) continue;
        auto loc = [&](const Term& t) { return t.is_null() || (t.is_var() && sorts.count(t.name()) && sorts.at(t.name()).is_ref()); };
        if (loc(e.left()) && loc(e.right())) checks_.push_back({e.left(), e.right(), neg});
      }
    }
    cells_ = k;
    return assign(0, 0);
  }

  std::optional<Value> value_of(const Term& t) const {
    if (t.is_null()) return Value::null();
    auto it = vals_.find(t.name());
    if (it == vals_.end()) return std::nullopt;
    return it->second;
  }

  bool pure_ok() const {
    for (const auto& c : checks_) {
      auto a = value_of(c.a);
      auto b = value_of(c.b);
      if (a && b && ((*a == *b) == c.negated)) return false;
    }
    return true;
  }

  bool assign(std::size_t i, int dangling) {
    if (!pure_ok()) return false;
    if (i == locs_.size()) return scalars(0);
    const std::string& v = locs_[i];
    std::vector<Value> choices{Value::null()};
    for (int a = 1; a <= cells_; ++a) choices.push_back(Value::address(a));
    for (int j = 1; j <= dangling; ++j) choices.push_back(Value::address(kDangling + j));
    bool fresh = cells_ + dangling < b_.max_objects;
    if (fresh) choices.push_back(Value::address(kDangling + dangling + 1));
    for (const auto& c : choices) {
      vals_[v] = c;
      bool stop = assign(i + 1, c.addr == kDangling + dangling + 1 ? dangling + 1 : dangling);
      vals_.erase(v);
      if (stop) return true;
    }
    return false;
  }

  bool scalars(std::size_t i) {
    if (i == ints_.size()) return check();
    for (std::int32_t k = b_.lo; k <= b_.hi; ++k) {
      vals_[ints_[i]] = Value::integer(k);
      if (scalars(i + 1)) return true;
    }
    vals_.erase(ints_[i]);
    return false;
  }

  bool check() {
    Store store;
    for (const auto* a : heads_) {
      const DataDef* dd = defs_.find_data(a->name);
      if (!dd) return false;
      HeapObject obj{a->name, {}};
      for (std::size_t i = 0; i < a->args.size(); ++i) {
        const Term& t = a->args[i];
        Value v;
        if (t.is_var()) {
          v = vals_.at(t.name());
        } else if (t.kind() == Term::Kind::Int) {
          v = Value::integer(t.value());
        } else if (t.kind() == Term::Kind::Bool) {
          v = Value::boolean(t.value() != 0);
        }
        if (dd->fields.at(i).type == "bool" && v.kind == Value::Kind::Int) {
          if (v.num != 0 && v.num != 1) return false;
          v = Value::boolean(v.num == 1);
        }
        obj.slots.push_back(v);
      }
      store[vals_.at(a->head).addr] = std::move(obj);
    }
    std::map<std::string, Value> env;
    for (const auto& in : inputs_) {
      auto it = vals_.find(in);
      env[in] = it == vals_.end() ? Value::null() : it->second;
    }
    return eval_heap(d_, store, env, defs_, opts_);
  }

  struct Check {
    Term a;
    Term b;
    bool negated;
  };

  const SymbolicHeap& d_;
  const SpecFile& defs_;
  OracleBounds b_;
  EvalOptions opts_;
  std::vector<std::string> inputs_;
  std::map<std::string, Value> vals_;
  std::vector<const SpatialAtom*> heads_;
  std::vector<std::string> locs_;
  std::vector<std::string> ints_;
  std::vector<Check> checks_;
  int cells_ = 0;
};

void check_bounds(const OracleBounds& b) {
  if (b.max_objects > 4 || b.max_objects < 0) throw std::invalid_argument("oracle supports at most 4 objects");
  if (b.lo > b.hi) throw std::invalid_argument("empty scalar domain");
}

}  // namespace

std::vector<TestInput> oracle_enumerate(const SymbolicHeap& d, const std::vector<Param>& inputs,
                                        const SpecFile& defs, const OracleBounds& b) {
  check_bounds(b);
  std::vector<Input> ins;
  for (const auto& p : inputs) ins.push_back({p.name, p.type, true});
  EvalOptions opts;
  opts.int_range = std::make_pair(b.lo, b.hi);
  std::vector<TestInput> out;
  StoreGen gen(defs, b, ins, false, [&](const Store& s, const std::map<std::string, Value>& env) {
    if (eval_heap(d, s, env, defs, opts)) {
      TestInput t;
      t.store = s;
      for (const auto& p : inputs) t.bindings.emplace_back(p.name, env.at(p.name));
      t.provenance = "oracle";
      out.push_back(std::move(t));
    }
    return false;
  });
  gen.run();
  return out;
}

bool oracle_exists(const SymbolicHeap& d, const SpecFile& defs, const OracleBounds& b) {
  check_bounds(b);
  auto sorts = infer_sorts(d, defs);
  std::vector<Input> ins;
  for (const auto& v : free_vars(d)) {
    auto it = sorts.find(v);
    if (it != sorts.end() && it->second.is_ref()) ins.push_back({v, Type::ref(it->second.type), true});
  }
  EvalOptions opts;
  opts.int_range = std::make_pair(b.lo, b.hi);
  std::vector<std::string> names;
  for (const auto& i : ins) names.push_back(i.name);
  if (WitnessSearch(d, defs, b, opts, names).run()) return true;
  std::vector<StoreGen::Pin> pins;
  auto is_input = [&](const std::string& v) {
    return std::any_of(ins.begin(), ins.end(), [&](const Input& i) { return i.name == v; });
  };
  for (const auto& a : d.spatial) {
    if (!a.is_points_to() || !is_input(a.head)) continue;
    const DataDef* dd = defs.find_data(a.name);
    if (!dd) continue;
    StoreGen::Pin p{a.head, a.name, {}};
    for (std::size_t i = 0; i < a.args.size() && i < dd->fields.size(); ++i) {
      const Term& t = a.args[i];
      bool ref_slot = !is_scalar_type(dd->fields[i].type);
      p.slots.push_back(ref_slot && (t.is_null() || (t.is_var() && is_input(t.name()))) ? std::optional<Term>(t)
                                                                                          : std::nullopt);
    }
    pins.push_back(std::move(p));
  }
  std::vector<StoreGen::Rel> rels;
  auto input_or_null = [&](const Term& t) { return t.is_null() || (t.is_var() && is_input(t.name())); };
  for (const auto& p : d.pure) {
    for (const auto& c : conjuncts(p)) {
      bool neg = c.kind() == Pure::Kind::Not && c.operand().kind() == Pure::Kind::Eq;
      const Pure& e = neg ? c.operand() : c;
      if (e.kind() == Pure::Kind::Eq && input_or_null(e.left()) && input_or_null(e.right())) {
        rels.push_back({e.left(), e.right(), neg});
      }
    }
  }
  bool found = false;
  StoreGen gen(
      defs, b, ins, true,
      [&](const Store& s, const std::map<std::string, Value>& env) {
        found = eval_heap(d, s, env, defs, opts);
        return found;
      },
      std::move(pins), std::move(rels));
  gen.run();
  return found;
}

bool fits_bounds(const SymbolicModel& m, const OracleBounds& b) {
  if (static_cast<int>(m.cells.size() + m.dangling.size()) > b.max_objects) return false;
  auto in_range = [&](const Term& t) { return t.kind() != Term::Kind::Int || (t.value() >= b.lo && t.value() <= b.hi); };
  for (const auto& [v, t] : m.values) {
    if (!in_range(t)) return false;
  }
  for (const auto& c : m.cells) {
    for (const auto& t : c.args) {
      if (!in_range(t)) return false;
    }
  }
  return true;
}

}  // namespace slc
