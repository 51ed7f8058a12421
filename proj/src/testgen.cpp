#include <deque>

#include "slc/sorts.hpp"
#include "slc/testgen.hpp"
#include "slc/unfold.hpp"

namespace slc {

TestInput canonicalize(const TestInput& t) {
  std::map<int, int> renum;
  std::deque<int> queue;
  auto visit = [&](const Value& v) {
    if (v.kind == Value::Kind::Addr && t.store.count(v.addr) && !renum.count(v.addr)) {
      int n = static_cast<int>(renum.size()) + 1;
      renum[v.addr] = n;
      queue.push_back(v.addr);
    }
  };
  for (const auto& [n, v] : t.bindings) visit(v);
  while (true) {
    while (!queue.empty()) {
      int a = queue.front();
      queue.pop_front();
      for (const auto& s : t.store.at(a).slots) visit(s);
    }
    auto it = std::find_if(t.store.begin(), t.store.end(), [&](const auto& kv) { return !renum.count(kv.first); });
    if (it == t.store.end()) break;
    visit(Value::address(it->first));
  }
  auto map_value = [&](Value v) {
    if (v.kind == Value::Kind::Addr) {
      auto it = renum.find(v.addr);
      if (it != renum.end()) v.addr = it->second;
    }
    return v;
  };
  TestInput out;
  out.provenance = t.provenance;
  for (const auto& [n, v] : t.bindings) out.bindings.emplace_back(n, map_value(v));
  for (const auto& [a, obj] : t.store) {
    HeapObject o{obj.type, {}};
    for (const auto& s : obj.slots) o.slots.push_back(map_value(s));
    out.store[renum.at(a)] = std::move(o);
  }
  return out;
}

namespace {

Value value_of_type(const Term& t, const std::map<std::string, Value>& env, const std::string& type) {
  switch (t.kind()) {
    case Term::Kind::Null:
      return Value::null();
    case Term::Kind::Int:
      return type == "bool" ? Value::boolean(t.value() != 0) : Value::integer(t.value());
    case Term::Kind::Bool:
      return Value::boolean(t.value() != 0);
    case Term::Kind::Var: {
      auto it = env.find(t.name());
      if (it == env.end()) throw ConstructionError("variable '" + t.name() + "' is not initialized");
      return it->second;
    }
    default:
      throw ConstructionError("unsupported model term " + to_string(t));
  }
}

bool fits(const Value& v, const std::string& type, const Store& store) {
  if (type == "int") return v.kind == Value::Kind::Int;
  if (type == "bool") return v.kind == Value::Kind::Bool;
  if (v.kind == Value::Kind::Null) return true;
  return v.kind == Value::Kind::Addr && store.at(v.addr).type == type;
}

}  // namespace

TestInput to_unit_test(const SymbolicModel& m, const std::vector<Param>& entry, const SpecFile& defs) {
  TestInput t;
  std::map<std::string, Value> env;
  int next = 0;
  auto allocate = [&](const std::string& type) {
    const DataDef* dd = defs.find_data(type);
    if (!dd) throw ConstructionError("unknown data type '" + type + "'");
    HeapObject obj{type, {}};
    for (const auto& f : dd->fields) obj.slots.push_back(Value::default_for(Type::of_name(f.type)));
    t.store[++next] = std::move(obj);
    return Value::address(next);
  };

  // Cells and constants.
  for (const auto& c : m.cells) env[c.head] = allocate(c.name);
  for (const auto& [v, term] : m.values) {
    if (term.kind() == Term::Kind::Var) continue;
    env[v] = value_of_type(term, env, "");
  }

  // Aliases: an initialized alias wins, otherwise one fresh object per class.
  SortMap seed;
  for (const auto& p : entry) {
    if (p.type.is_ref()) seed[p.name] = Sort::ref(p.type.data);
  }
  std::optional<SortMap> sorts;
  auto fresh_object = [&](const std::string& v) {
    if (!sorts) sorts = infer_sorts(m.to_heap(), defs, seed);
    auto it = sorts->find(v);
    if (it == sorts->end() || !it->second.is_ref() || it->second.type.empty()) {
      throw ConstructionError("cannot determine the type of location '" + v + "'");
    }
    return allocate(it->second.type);
  };
  for (const auto& [v, term] : m.values) {
    if (term.kind() != Term::Kind::Var) continue;
    const std::string& w = term.name();
    if (!env.count(w)) env[w] = fresh_object(w);
    env[v] = env.at(w);
  }
  for (const auto& v : m.dangling) {
    if (!env.count(v)) env[v] = fresh_object(v);
  }

  // Slot wiring.
  for (const auto& c : m.cells) {
    const DataDef* dd = defs.find_data(c.name);
    if (dd->fields.size() != c.args.size()) throw ConstructionError("field count mismatch for " + c.name);
    auto& obj = t.store.at(env.at(c.head).addr);
    for (std::size_t k = 0; k < c.args.size(); ++k) {
      Value v = value_of_type(c.args[k], env, dd->fields[k].type);
      if (!fits(v, dd->fields[k].type, t.store)) {
        throw ConstructionError("value " + to_string(v) + " does not fit field " + c.name + "." + dd->fields[k].name);
      }
      obj.slots[k] = v;
    }
  }

  for (const auto& p : entry) {
    auto it = env.find(p.name);
    Value v = it == env.end() ? Value::default_for(p.type) : it->second;
    if (p.type.kind == Type::Kind::Bool && v.kind == Value::Kind::Int) v = Value::boolean(v.num != 0);
    if (!fits(v, to_string(p.type), t.store)) {
      throw ConstructionError("value " + to_string(v) + " does not fit parameter " + p.name);
    }
    t.bindings.emplace_back(p.name, v);
  }
  return canonicalize(t);
}

GenResult gen_from_spec(const std::vector<SymbolicHeap>& g, int n, const SpecFile& defs,
                        const std::vector<Param>& entry, const SolverConfig& cfg) {
  GenResult res;
  Formula pre{g};
  auto closure = unfold_closure(g, n, defs);
  for (std::size_t i = 0; i < closure.size(); ++i) {
    const auto& d = closure[i];
    ++res.stats.heaps;
    ++res.stats.solver_calls;
    auto r = sat(d, defs, cfg);
    std::string tag = "spec#" + std::to_string(i);
    if (r.decision == Decision::Unsat) {
      ++res.stats.unsat;
      res.log.push_back(tag + ": unsat");
      continue;
    }
    if (r.decision == Decision::Unknown) {
      ++res.stats.unknown;
      res.log.push_back(tag + ": unknown, skipped");
      continue;
    }
    ++res.stats.sat;
    TestInput t;
    try {
      t = to_unit_test(*r.model, entry, defs);
    } catch (const ConstructionError& e) {
      ++res.stats.dropped;
      res.log.push_back(tag + ": construction failed: " + e.what());
      continue;
    }
    t.provenance = tag;
    if (!satisfies(t, pre, defs)) {
      ++res.stats.dropped;
      res.log.push_back(tag + ": generated input fails the precondition, dropped");
      continue;
    }
    bool dup = std::any_of(res.tests.begin(), res.tests.end(), [&](const TestInput& o) { return o.same_input(t); });
    if (dup) {
      ++res.stats.duplicates;
      continue;
    }
    res.tests.push_back(std::move(t));
  }
  return res;
}

}  // namespace slc
