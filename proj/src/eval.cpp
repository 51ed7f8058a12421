#include <algorithm>
#include <functional>
#include <limits>

#include "slc/sorts.hpp"
#include "slc/testgen.hpp"

namespace slc {

Value Value::default_for(const Type& t) {
  switch (t.kind) {
    case Type::Kind::Int:
      return integer(0);
    case Type::Kind::Bool:
      return boolean(false);
    default:
      return null();
  }
}

std::string to_string(const Value& v) {
  switch (v.kind) {
    case Value::Kind::Null:
      return "null";
    case Value::Kind::Int:
      return std::to_string(v.num);
    case Value::Kind::Bool:
      return v.num ? "true" : "false";
    case Value::Kind::Addr:
      return "@" + std::to_string(v.addr);
  }
  return "?";
}

std::optional<Value> TestInput::binding(const std::string& name) const {
  for (const auto& [n, v] : bindings) {
    if (n == name) return v;
  }
  return std::nullopt;
}

namespace {

using i64 = std::int64_t;

// Concrete value during evaluation: numbers are unbounded-ish (64 bit).
struct CV {
  enum class Kind : std::uint8_t { Null, Num, Addr, Bad };
  Kind kind = Kind::Null;
  i64 n = 0;

  static CV of(const Value& v) {
    switch (v.kind) {
      case Value::Kind::Null:
        return {};
      case Value::Kind::Addr:
        return {Kind::Addr, v.addr};
      default:
        return {Kind::Num, v.num};
    }
  }
  bool operator==(const CV&) const = default;
};

using Env = std::map<std::string, Value>;

std::optional<CV> eval_term(const Term& t, const Env& env) {
  switch (t.kind()) {
    case Term::Kind::Null:
      return CV{};
    case Term::Kind::Int:
    case Term::Kind::Bool:
      return CV{CV::Kind::Num, t.value()};
    case Term::Kind::Var: {
      auto it = env.find(t.name());
      if (it == env.end()) return std::nullopt;
      return CV::of(it->second);
    }
    case Term::Kind::Field:
      throw std::invalid_argument("field access in evaluated formula: " + to_string(t));
    default: {
      std::vector<i64> ks;
      for (const auto& k : t.kids()) {
        auto v = eval_term(k, env);
        if (!v) return std::nullopt;
        if (v->kind != CV::Kind::Num) return CV{CV::Kind::Bad, 0};
        ks.push_back(v->n);
      }
      i64 r = 0;
      switch (t.kind()) {
        case Term::Kind::Scale:
          r = t.value() * ks[0];
          break;
        case Term::Kind::Neg:
          r = -ks[0];
          break;
        case Term::Kind::Add:
          r = ks[0] + ks[1];
          break;
        default:
          r = ks[0] * ks[1];
      }
      return CV{CV::Kind::Num, r};
    }
  }
}

// Three-valued evaluation plus a poison value for ill-typed comparisons
// (an integer against a location), which no polarity can satisfy.
enum class Truth : std::uint8_t { False, True, Open, Bad };

Truth eval_pure3(const Pure& p, const Env& env) {
  switch (p.kind()) {
    case Pure::Kind::True:
      return Truth::True;
    case Pure::Kind::Eq:
    case Pure::Kind::Le: {
      auto a = eval_term(p.left(), env);
      auto b = eval_term(p.right(), env);
      if (!a || !b) return Truth::Open;
      if (a->kind == CV::Kind::Bad || b->kind == CV::Kind::Bad) return Truth::Bad;
      bool na = a->kind == CV::Kind::Num, nb = b->kind == CV::Kind::Num;
      if (na != nb) return Truth::Bad;
      if (p.kind() == Pure::Kind::Eq) return *a == *b ? Truth::True : Truth::False;
      if (!na) return Truth::Bad;
      return a->n <= b->n ? Truth::True : Truth::False;
    }
    case Pure::Kind::Not:
      switch (eval_pure3(p.operand(), env)) {
        case Truth::True:
          return Truth::False;
        case Truth::False:
          return Truth::True;
        case Truth::Open:
          return Truth::Open;
        case Truth::Bad:
          return Truth::Bad;
      }
      return Truth::Bad;
    case Pure::Kind::And: {
      Truth out = Truth::True;
      for (const auto& k : p.kids()) {
        auto v = eval_pure3(k, env);
        if (v == Truth::Bad) return v;
        if (v == Truth::False) out = Truth::False;
        if (v == Truth::Open && out == Truth::True) out = Truth::Open;
      }
      return out;
    }
    case Pure::Kind::FieldAssign:
      throw std::invalid_argument("field assignment in evaluated formula");
  }
  return Truth::Bad;
}

void collect_constants(const Term& t, std::set<i64>& out) {
  if (t.kind() == Term::Kind::Int) out.insert(t.value());
  for (const auto& k : t.kids()) collect_constants(k, out);
}

void collect_constants(const Pure& p, std::set<i64>& out) {
  if (p.kind() == Pure::Kind::Eq || p.kind() == Pure::Kind::Le) {
    collect_constants(p.left(), out);
    collect_constants(p.right(), out);
  }
  for (const auto& k : p.kids()) collect_constants(k, out);
}

void collect_constants(const SymbolicHeap& d, std::set<i64>& out) {
  for (const auto& a : d.spatial) {
    for (const auto& t : a.args) collect_constants(t, out);
  }
  for (const auto& p : d.pure) collect_constants(p, out);
}

class Matcher {
 public:
  Matcher(const Store& store, const SpecFile& defs, const EvalOptions& opts) : store_(store), defs_(defs), opts_(opts) {}

  void set_int_candidates(std::vector<i64> c) { ints_ = std::move(c); }

  bool run(const SymbolicHeap& d, Env env) {
    State st;
    st.atoms = d.spatial;
    for (const auto& p : d.pure) {
      for (auto& c : conjuncts(p)) st.pure.push_back(std::move(c));
    }
    for (const auto& v : d.exists) env.erase(v);
    for (const auto& [a, obj] : store_) {
      st.remaining.insert(a);
      env["@" + std::to_string(a)] = Value::address(a);
    }
    st.env = std::move(env);
    return solve(st);
  }

 private:
  struct State {
    std::vector<SpatialAtom> atoms;
    std::vector<Pure> pure;
    Env env;
    std::set<int> remaining;
  };

  static Term constant_term(const Value& v) {
    switch (v.kind) {
      case Value::Kind::Null:
        return Term::null();
      case Value::Kind::Addr:
        return Term::var("@" + std::to_string(v.addr));
      default:
        return Term::constant(v.num);
    }
  }

  // Binds or checks `t` against a slot value; undecided cases become pure
  // constraints checked later.
  static bool unify(const Term& t, const Value& v, State& st) {
    if (t.is_var() && !st.env.count(t.name())) {
      st.env[t.name()] = v;
      return true;
    }
    auto e = eval_term(t, st.env);
    if (e) return *e == CV::of(v);
    st.pure.push_back(Pure::eq(t, constant_term(v)));
    return true;
  }

  static bool prune(State& st) {
    std::vector<Pure> open;
    for (auto& p : st.pure) {
      auto v = eval_pure3(p, st.env);
      if (v == Truth::Open) {
        open.push_back(std::move(p));
      } else if (v != Truth::True) {
        return false;
      }
    }
    st.pure = std::move(open);
    return true;
  }

  bool consume(State st, std::size_t i, int addr) {
    const SpatialAtom a = st.atoms[i];
    auto it = store_.find(addr);
    if (it == store_.end() || !st.remaining.count(addr)) return false;
    const HeapObject& obj = it->second;
    if (obj.type != a.name || obj.slots.size() != a.args.size()) return false;
    st.remaining.erase(addr);
    st.atoms.erase(st.atoms.begin() + static_cast<std::ptrdiff_t>(i));
    for (std::size_t k = 0; k < a.args.size(); ++k) {
      if (!unify(a.args[k], obj.slots[k], st)) return false;
    }
    return solve(st);
  }

  SymbolicHeap instantiate(const PredDef& def, const SpatialAtom& inst, const SymbolicHeap& disjunct) {
    Binding b;
    for (std::size_t k = 0; k < def.params.size(); ++k) b[def.params[k]] = inst.args[k];
    for (const auto& v : disjunct.exists) b[v] = Term::var(v + "%" + std::to_string(++fresh_));
    SymbolicHeap body = disjunct;
    body.exists.clear();
    return substitute(body, b);
  }

  bool finish(State& st) {
    if (!st.remaining.empty()) return false;
    std::vector<std::string> open;
    std::set<std::string> seen;
    for (const auto& p : st.pure) {
      std::set<std::string> vs;
      collect_vars(p, vs);
      for (const auto& v : vs) {
        if (!st.env.count(v) && seen.insert(v).second) open.push_back(v);
      }
    }
    std::vector<Value> cands{Value::null()};
    for (const auto& [a, obj] : store_) cands.push_back(Value::address(a));
    for (i64 k : ints_) cands.push_back(Value::integer(static_cast<std::int32_t>(k)));
    std::function<bool(std::size_t)> assign = [&](std::size_t i) -> bool {
      if (++steps_ > opts_.max_steps) return false;
      std::vector<Pure> saved = st.pure;
      if (!prune(st)) {
        st.pure = std::move(saved);
        return false;
      }
      if (i == open.size()) return st.pure.empty();
      for (const auto& c : cands) {
        st.env[open[i]] = c;
        if (assign(i + 1)) return true;
      }
      st.env.erase(open[i]);
      st.pure = std::move(saved);
      return false;
    };
    return assign(0);
  }

  bool solve(State& st) {
    if (++steps_ > opts_.max_steps) return false;
    if (!prune(st)) return false;
    // Points-to atoms with a known head first: they consume deterministically.
    for (std::size_t i = 0; i < st.atoms.size(); ++i) {
      const auto& a = st.atoms[i];
      if (!a.is_points_to()) continue;
      auto h = st.env.find(a.head);
      if (h == st.env.end()) continue;
      if (h->second.kind != Value::Kind::Addr) return false;
      return consume(st, i, h->second.addr);
    }
    for (std::size_t i = 0; i < st.atoms.size(); ++i) {
      const auto& a = st.atoms[i];
      if (!a.is_pred()) continue;
      const PredDef* def = defs_.find_pred(a.name);
      if (!def) throw ValidationError("unknown predicate '" + a.name + "'");
      for (const auto& disjunct : def->body.disjuncts) {
        bool allocates = std::any_of(disjunct.spatial.begin(), disjunct.spatial.end(),
                                     [](const SpatialAtom& x) { return x.is_points_to(); });
        if (allocates && st.remaining.empty()) continue;
        State next = st;
        auto body = instantiate(*def, a, disjunct);
        next.atoms.erase(next.atoms.begin() + static_cast<std::ptrdiff_t>(i));
        next.atoms.insert(next.atoms.begin() + static_cast<std::ptrdiff_t>(i), body.spatial.begin(),
                          body.spatial.end());
        next.pure.insert(next.pure.end(), body.pure.begin(), body.pure.end());
        if (solve(next)) return true;
        if (steps_ > opts_.max_steps) return false;
      }
      return false;
    }
    for (std::size_t i = 0; i < st.atoms.size(); ++i) {
      const auto& a = st.atoms[i];
      for (int addr : st.remaining) {
        State next = st;
        next.env[a.head] = Value::address(addr);
        if (consume(next, i, addr)) return true;
      }
      return false;
    }
    return finish(st);
  }

  const Store& store_;
  const SpecFile& defs_;
  const EvalOptions& opts_;
  std::vector<i64> ints_;
  std::size_t steps_ = 0;
  int fresh_ = 0;
};

std::vector<i64> int_candidates(const SymbolicHeap& d, const Store& store, const Env& env, const SpecFile& defs,
                                const EvalOptions& opts) {
  std::set<i64> base{0, 1, -1};
  collect_constants(d, base);
  for (const auto& p : defs.preds) {
    for (const auto& dj : p.body.disjuncts) collect_constants(dj, base);
  }
  for (const auto& [a, obj] : store) {
    for (const auto& s : obj.slots) {
      if (s.kind == Value::Kind::Int) base.insert(s.num);
    }
  }
  for (const auto& [n, v] : env) {
    if (v.kind == Value::Kind::Int) base.insert(v.num);
  }
  std::set<i64> all;
  constexpr i64 lo = std::numeric_limits<std::int32_t>::min();
  constexpr i64 hi = std::numeric_limits<std::int32_t>::max();
  for (i64 k : base) {
    for (i64 j = k - 1; j <= k + 1; ++j) {
      if (j >= lo && j <= hi) all.insert(j);
    }
  }
  all.insert(lo);
  all.insert(hi);
  if (opts.int_range) {
    for (i64 k = opts.int_range->first; k <= opts.int_range->second; ++k) all.insert(k);
  }
  std::vector<i64> out(all.begin(), all.end());
  std::stable_sort(out.begin(), out.end(), [](i64 a, i64 b) {
    i64 x = a < 0 ? -a : a, y = b < 0 ? -b : b;
    return x != y ? x < y : a < b;
  });
  return out;
}

}  // namespace

bool eval_heap(const SymbolicHeap& d, const Store& store, const std::map<std::string, Value>& env,
               const SpecFile& defs, const EvalOptions& opts) {
  Matcher m(store, defs, opts);
  m.set_int_candidates(int_candidates(d, store, env, defs, opts));
  return m.run(d, env);
}

bool eval_pred(const TestInput& input, const std::string& pred, const std::vector<Value>& args, const SpecFile& defs,
               const EvalOptions& opts) {
  Env env;
  std::vector<Term> terms;
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string name = "arg#" + std::to_string(i);
    env[name] = args[i];
    terms.push_back(Term::var(name));
  }
  SymbolicHeap d;
  d.spatial.push_back(SpatialAtom::pred(pred, terms));
  return eval_heap(d, input.store, env, defs, opts);
}

bool satisfies(const TestInput& input, const Formula& pre, const SpecFile& defs, const EvalOptions& opts) {
  Env env(input.bindings.begin(), input.bindings.end());
  return std::any_of(pre.disjuncts.begin(), pre.disjuncts.end(),
                     [&](const SymbolicHeap& d) { return eval_heap(d, input.store, env, defs, opts); });
}

bool model_check(const SymbolicModel& m, const SymbolicHeap& d, const SpecFile& defs) {
  Env env;
  Store store;
  int next = 0;
  for (const auto& c : m.cells) env[c.head] = Value::address(++next);
  for (const auto& v : m.dangling) env[v] = Value::address(++next);
  std::function<std::optional<Value>(const std::string&, int)> resolve = [&](const std::string& v,
                                                                            int depth) -> std::optional<Value> {
    auto e = env.find(v);
    if (e != env.end()) return e->second;
    auto it = m.values.find(v);
    if (it == m.values.end() || depth > 64) return std::nullopt;
    const Term& t = it->second;
    std::optional<Value> out;
    switch (t.kind()) {
      case Term::Kind::Null:
        out = Value::null();
        break;
      case Term::Kind::Int:
        out = Value::integer(t.value());
        break;
      case Term::Kind::Bool:
        out = Value::boolean(t.value() != 0);
        break;
      case Term::Kind::Var:
        out = resolve(t.name(), depth + 1);
        break;
      default:
        return std::nullopt;
    }
    if (out) env[v] = *out;
    return out;
  };
  for (const auto& [v, t] : m.values) {
    if (!resolve(v, 0)) return false;
  }
  for (std::size_t i = 0; i < m.cells.size(); ++i) {
    const auto& c = m.cells[i];
    const DataDef* dd = defs.find_data(c.name);
    if (!dd || dd->fields.size() != c.args.size()) return false;
    HeapObject obj{c.name, {}};
    for (std::size_t k = 0; k < c.args.size(); ++k) {
      auto v = eval_term(c.args[k], env);
      const std::string& ft = dd->fields[k].type;
      if (!v) {
        obj.slots.push_back(Value::default_for(Type::of_name(ft)));
      } else if (v->kind == CV::Kind::Null) {
        obj.slots.push_back(Value::null());
      } else if (v->kind == CV::Kind::Addr) {
        obj.slots.push_back(Value::address(static_cast<int>(v->n)));
      } else if (ft == "bool") {
        obj.slots.push_back(Value::boolean(v->n != 0));
      } else {
        obj.slots.push_back(Value::integer(static_cast<std::int32_t>(v->n)));
      }
    }
    store[static_cast<int>(i) + 1] = std::move(obj);
  }
  SortMap sorts = infer_sorts(d, defs);
  for (const auto& v : free_vars(d)) {
    if (env.count(v)) continue;
    auto s = sorts.find(v);
    env[v] = s != sorts.end() && s->second.is_ref() ? Value::null() : Value::integer(0);
  }
  return eval_heap(d, store, env, defs);
}

}  // namespace slc
