#include "slc/concolic.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <functional>
#include <sstream>

#include "slc/unfold.hpp"

namespace slc {

std::string to_string(RunOutcome::Error e) {
  switch (e) {
    case RunOutcome::Error::None:
      return "none";
    case RunOutcome::Error::NullDeref:
      return "null-deref";
    case RunOutcome::Error::Dangling:
      return "dangling";
    case RunOutcome::Error::GotoOutOfRange:
      return "goto-out-of-range";
    case RunOutcome::Error::FreeOfNull:
      return "free-of-null";
  }
  return "?";
}

std::string to_string(const RunOutcome& o) {
  auto at = [&] { return " at " + o.proc + ":" + std::to_string(o.pc); };
  switch (o.kind) {
    case RunOutcome::Kind::Ok:
      return "OK";
    case RunOutcome::Kind::AssertionViolation:
      return "AssertionViolation" + at();
    case RunOutcome::Kind::RuntimeError:
      return "RuntimeError(" + to_string(o.error) + ")" + at();
    case RunOutcome::Kind::BudgetExceeded:
      return "BudgetExceeded";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Concrete evaluation

namespace {

std::int32_t wrap(std::uint32_t v) { return static_cast<std::int32_t>(v); }

const HeapObject& deref(const Stack& s, const Value& base, const std::string& what) {
  if (base.kind == Value::Kind::Null) throw RuntimeFault(RunOutcome::Error::NullDeref, "null dereference of " + what);
  if (base.kind != Value::Kind::Addr) throw std::logic_error("dereference of a scalar: " + what);
  auto it = s.heap.find(base.addr);
  if (it == s.heap.end()) throw RuntimeFault(RunOutcome::Error::Dangling, "dangling dereference of " + what);
  return it->second;
}

std::size_t slot_of(const Program& p, const std::string& type, const std::string& field) {
  const DataDef* d = p.find_data(type);
  if (!d) throw std::logic_error("unknown data type " + type);
  auto i = d->field_index(field);
  if (!i) throw std::logic_error("type " + type + " has no field " + field);
  return *i;
}

std::int32_t as_int(const Value& v) {
  if (v.kind != Value::Kind::Int) throw std::logic_error("integer expected, got " + to_string(v));
  return v.num;
}

bool as_bool(const Value& v) {
  if (v.kind != Value::Kind::Bool) throw std::logic_error("boolean expected, got " + to_string(v));
  return v.num != 0;
}

}  // namespace

Value eval_expr(const Stack& s, const Expr& e, const Program& p) {
  switch (e.kind) {
    case Expr::Kind::Int:
      return Value::integer(e.value);
    case Expr::Kind::Bool:
      return Value::boolean(e.value != 0);
    case Expr::Kind::Null:
      return Value::null();
    case Expr::Kind::Var: {
      auto it = s.vars.find(e.name);
      if (it == s.vars.end()) throw std::out_of_range("unbound variable '" + e.name + "'");
      return it->second;
    }
    case Expr::Kind::Field: {
      auto it = s.vars.find(e.name);
      Value base = it == s.vars.end() ? Value::null() : it->second;
      const HeapObject& obj = deref(s, base, e.name + "." + e.field);
      return obj.slots.at(slot_of(p, obj.type, e.field));
    }
    case Expr::Kind::Unary: {
      Value a = eval_expr(s, e.kids.at(0), p);
      if (e.uop == UnOp::Not) return Value::boolean(!as_bool(a));
      return Value::integer(wrap(0u - static_cast<std::uint32_t>(as_int(a))));
    }
    case Expr::Kind::Binary: {
      if (e.bop == BinOp::And || e.bop == BinOp::Or) {
        bool a = as_bool(eval_expr(s, e.kids.at(0), p));
        if (e.bop == BinOp::And && !a) return Value::boolean(false);
        if (e.bop == BinOp::Or && a) return Value::boolean(true);
        return Value::boolean(as_bool(eval_expr(s, e.kids.at(1), p)));
      }
      Value a = eval_expr(s, e.kids.at(0), p);
      Value b = eval_expr(s, e.kids.at(1), p);
      auto ua = [&] { return static_cast<std::uint32_t>(as_int(a)); };
      auto ub = [&] { return static_cast<std::uint32_t>(as_int(b)); };
      switch (e.bop) {
        case BinOp::Add:
          return Value::integer(wrap(ua() + ub()));
        case BinOp::Sub:
          return Value::integer(wrap(ua() - ub()));
        case BinOp::Mul:
          return Value::integer(wrap(ua() * ub()));
        case BinOp::Eq:
          return Value::boolean(a == b);
        case BinOp::Ne:
          return Value::boolean(a != b);
        case BinOp::Lt:
          return Value::boolean(as_int(a) < as_int(b));
        case BinOp::Le:
          return Value::boolean(as_int(a) <= as_int(b));
        case BinOp::Gt:
          return Value::boolean(as_int(a) > as_int(b));
        case BinOp::Ge:
          return Value::boolean(as_int(a) >= as_int(b));
        default:
          break;
      }
      break;
    }
  }
  throw std::logic_error("unsupported expression " + to_string(e));
}

// ---------------------------------------------------------------------------
// Constraint tree

ConstraintTree::ConstraintTree(const Formula& pre, const std::vector<Param>& entry, const std::string& entry_proc) {
  for (const auto& d : pre.disjuncts) {
    TreeNode n;
    n.id = static_cast<int>(nodes_.size());
    n.label = "pre#" + std::to_string(roots_.size());
    n.delta = freshen(d);
    n.proc = entry_proc;
    n.explored = false;
    for (const auto& p : entry) n.inputs[p.name] = p.name;
    roots_.push_back(n.id);
    nodes_.push_back(std::move(n));
  }
}

std::optional<int> ConstraintTree::child(int parent, const std::string& label) const {
  for (int c : node(parent).children) {
    if (node(c).label == label) return c;
  }
  return std::nullopt;
}

int ConstraintTree::add_child(int parent, TreeNode n) {
  n.id = static_cast<int>(nodes_.size());
  n.parent = parent;
  n.depth = node(parent).depth + 1;
  nodes_.push_back(std::move(n));
  node(parent).children.push_back(nodes_.back().id);
  return nodes_.back().id;
}

std::optional<int> ConstraintTree::next_unexplored() const {
  std::deque<int> queue(roots_.begin(), roots_.end());
  while (!queue.empty()) {
    int id = queue.front();
    queue.pop_front();
    const TreeNode& n = node(id);
    if (!n.explored && n.state == TreeNode::State::Open) return id;
    queue.insert(queue.end(), n.children.begin(), n.children.end());
  }
  return std::nullopt;
}

std::size_t ConstraintTree::count_unexplored() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) {
    return !n.explored && n.state == TreeNode::State::Open;
  }));
}

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string to_dot(const ConstraintTree& t) {
  std::ostringstream os;
  os << "digraph constraint_tree {\n  node [shape=box, fontname=\"monospace\"];\n";
  for (const auto& n : t.nodes()) {
    std::string text = n.proc + n.frame + ":" + std::to_string(n.pc) + "  " + n.stmt;
    if (!n.explored) {
      text = "? " + text;
      if (n.state == TreeNode::State::Pruned) text += "\n[pruned: " + n.note + "]";
      if (n.state == TreeNode::State::Parked) text += "\n[parked: " + n.note + "]";
    }
    if (n.outcome) text += "\n" + to_string(*n.outcome);
    os << "  n" << n.id << " [label=\"" << dot_escape(text) << "\"" << (n.explored ? "" : ", style=dashed") << "];\n";
  }
  for (const auto& n : t.nodes()) {
    for (int c : n.children) os << "  n" << n.id << " -> n" << c << " [label=\"" << dot_escape(t.node(c).label) << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Symbolic translation of program expressions

namespace {

Expr default_expr(const Type& t) {
  switch (t.kind) {
    case Type::Kind::Int:
      return Expr::integer(0);
    case Type::Kind::Bool:
      return Expr::boolean(false);
    default:
      return Expr::null();
  }
}

Pure bool_def(const std::string& w, const Pure& phi) {
  return Pure::disj(Pure::conj(Pure::eq(Term::var(w), Term::boolean(true)), phi),
                    Pure::conj(Pure::eq(Term::var(w), Term::boolean(false)), Pure::negate(phi)));
}

class Sym {
 public:
  Sym(const Program& p, const std::map<std::string, Type>& types) : p_(p), types_(types) {}

  Type type_of(const Expr& e) const {
    switch (e.kind) {
      case Expr::Kind::Int:
        return Type::integer();
      case Expr::Kind::Bool:
        return Type::boolean();
      case Expr::Kind::Null:
        return Type::ref();
      case Expr::Kind::Var: {
        auto it = types_.find(e.name);
        return it == types_.end() ? Type::integer() : it->second;
      }
      case Expr::Kind::Field: {
        auto it = types_.find(e.name);
        if (it == types_.end()) return Type::integer();
        const DataDef* d = p_.find_data(it->second.data);
        if (!d) return Type::integer();
        auto i = d->field_index(e.field);
        return i ? Type::of_name(d->fields[*i].type) : Type::integer();
      }
      case Expr::Kind::Unary:
        return e.uop == UnOp::Not ? Type::boolean() : Type::integer();
      case Expr::Kind::Binary:
        switch (e.bop) {
          case BinOp::Add:
          case BinOp::Sub:
          case BinOp::Mul:
            return Type::integer();
          default:
            return Type::boolean();
        }
    }
    return Type::integer();
  }

  static bool atomic(const Expr& e) {
    return e.kind == Expr::Kind::Bool || e.kind == Expr::Kind::Var || e.kind == Expr::Kind::Field;
  }

  Term term(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::Int:
        return Term::constant(e.value);
      case Expr::Kind::Bool:
        return Term::boolean(e.value != 0);
      case Expr::Kind::Null:
        return Term::null();
      case Expr::Kind::Var:
        return Term::var(e.name);
      case Expr::Kind::Field:
        return Term::field(e.name, e.field);
      case Expr::Kind::Unary:
        if (e.uop == UnOp::Neg) return Term::neg(term(e.kids.at(0)));
        break;
      case Expr::Kind::Binary:
        if (e.bop == BinOp::Add) return Term::add(term(e.kids.at(0)), term(e.kids.at(1)));
        if (e.bop == BinOp::Sub) return Term::sub(term(e.kids.at(0)), term(e.kids.at(1)));
        if (e.bop == BinOp::Mul) return Term::mul(term(e.kids.at(0)), term(e.kids.at(1)));
        break;
    }
    std::string w = fresh_var("b");
    exists.push_back(w);
    side.push_back(bool_def(w, pure(e)));
    return Term::var(w);
  }

  Pure pure(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::Bool:
        return e.value ? Pure::truth() : Pure::negate(Pure::truth());
      case Expr::Kind::Var:
      case Expr::Kind::Field:
        return Pure::eq(term(e), Term::boolean(true));
      case Expr::Kind::Unary:
        return Pure::negate(pure(e.kids.at(0)));
      case Expr::Kind::Binary: {
        const Expr& a = e.kids.at(0);
        const Expr& b = e.kids.at(1);
        switch (e.bop) {
          case BinOp::And:
            return Pure::conj(pure(a), pure(b));
          case BinOp::Or:
            return Pure::disj(pure(a), pure(b));
          case BinOp::Eq:
          case BinOp::Ne: {
            Pure eq;
            if (type_of(a).kind == Type::Kind::Bool && !(atomic(a) && atomic(b))) {
              Pure pa = pure(a);
              Pure pb = pure(b);
              eq = Pure::disj(Pure::conj(pa, pb), Pure::conj(Pure::negate(pa), Pure::negate(pb)));
            } else {
              eq = Pure::eq(term(a), term(b));
            }
            return e.bop == BinOp::Eq ? eq : Pure::negate(eq);
          }
          case BinOp::Lt:
            return Pure::lt(term(a), term(b));
          case BinOp::Le:
            return Pure::le(term(a), term(b));
          case BinOp::Gt:
            return Pure::lt(term(b), term(a));
          case BinOp::Ge:
            return Pure::le(term(b), term(a));
          default:
            break;
        }
        break;
      }
      default:
        break;
    }
    throw std::logic_error("not a condition: " + to_string(e));
  }

  std::vector<Pure> side;
  std::vector<std::string> exists;

 private:
  const Program& p_;
  const std::map<std::string, Type>& types_;
};

// Renames `v` to a fresh existential when it occurs free in the node's path
// condition; returns the substitution applied (empty when none was needed).
Binding retire(TreeNode& n, const std::string& v) {
  Binding b;
  if (!free_vars(n.delta).count(v)) return b;
  std::string fresh = fresh_var(v);
  b.emplace(v, Term::var(fresh));
  n.delta = substitute(n.delta, b);
  n.delta.exists.push_back(fresh);
  for (auto& [p, sym] : n.inputs) {
    if (sym == v) sym = fresh;
  }
  if (n.allocated.erase(v)) n.allocated.insert(fresh);
  return b;
}

void add_side(TreeNode& n, const Sym& sym, const Binding& b) {
  n.delta.exists.insert(n.delta.exists.end(), sym.exists.begin(), sym.exists.end());
  for (const auto& p : sym.side) n.delta.pure.push_back(substitute(p, b));
}

// ---------------------------------------------------------------------------
// Execution

struct Frame {
  const Procedure* proc = nullptr;
  std::string suffix;
  int pc = 0;
};

class Runner {
 public:
  Runner(const Program& p, const SpecFile& defs, ConstraintTree& tree, const RunConfig& cfg)
      : p_(p), defs_(defs), tree_(tree), cfg_(cfg) {}

  RunResult run(const TestInput& t) {
    const Procedure* entry = p_.find_proc(p_.entry);
    if (!entry) throw ValidationError("entry procedure '" + p_.entry + "' not found");
    s_ = Stack{};
    s_.heap = t.store;
    s_.next_addr = t.store.empty() ? 1 : t.store.rbegin()->first + 1;
    for (const auto& [n, v] : t.bindings) s_.vars[n] = v;
    types_.clear();
    declare(*entry, "");
    frames_ = {Frame{entry, "", 0}};
    calls_ = 0;
    res_ = RunResult{};
    on_tree_ = true;
    cur_ = pick_root(t);
    if (tree_.node(cur_).stmt.empty()) locate(tree_.node(cur_), frames_.back());
    mark(cur_);

    while (true) {
      if (res_.steps >= cfg_.max_steps) {
        stop({RunOutcome::Kind::BudgetExceeded, RunOutcome::Error::None, frames_.back().proc->name,
              frames_.back().pc});
        break;
      }
      ++res_.steps;
      try {
        if (step()) break;
      } catch (const RuntimeFault& e) {
        stop({RunOutcome::Kind::RuntimeError, e.error, frames_.back().proc->name, frames_.back().pc});
        break;
      }
    }
    return res_;
  }

 private:
  void declare(const Procedure& proc, const std::string& suffix) {
    for (const auto& prm : proc.params) types_[prm.name + suffix] = prm.type;
    for (const auto& [v, t] : proc.locals) types_[v + suffix] = t;
  }

  int pick_root(const TestInput& t) const {
    const auto& roots = tree_.roots();
    if (roots.size() > 1) {
      for (int r : roots) {
        if (satisfies(t, Formula{{tree_.node(r).delta}}, defs_)) return r;
      }
    }
    return roots.at(0);
  }

  void mark(int id) {
    if (id < 0) return;
    tree_.node(id).explored = true;
    res_.path.push_back(id);
  }

  void stop(const RunOutcome& o) {
    res_.outcome = o;
    if (on_tree_) tree_.node(cur_).outcome = o;
  }

  // Program variables of the current frame get its suffix; variables read
  // before any assignment read as their type's default.
  Expr inst(const Expr& e) const {
    const std::string& sfx = frames_.back().suffix;
    Expr out = e;
    std::function<void(Expr&)> go = [&](Expr& x) {
      if (x.kind == Expr::Kind::Var) {
        std::string n = x.name + sfx;
        if (!s_.vars.count(n)) {
          auto it = types_.find(n);
          x = default_expr(it == types_.end() ? Type::integer() : it->second);
          return;
        }
        x.name = n;
      } else if (x.kind == Expr::Kind::Field) {
        x.name += sfx;
      }
      for (auto& k : x.kids) go(k);
    };
    go(out);
    return out;
  }

  TreeNode derive() const {
    const TreeNode& parent = tree_.node(cur_);
    TreeNode n;
    n.delta = parent.delta;
    n.inputs = parent.inputs;
    n.allocated = parent.allocated;
    return n;
  }

  void locate(TreeNode& n, const Frame& f) const {
    n.proc = f.proc->name;
    n.frame = f.suffix;
    n.pc = f.pc;
    const auto& body = f.proc->body;
    if (f.pc == static_cast<int>(body.size())) {
      n.stmt = "exit";
    } else if (f.pc < 0 || f.pc > static_cast<int>(body.size())) {
      n.stmt = "<target out of range>";
    } else {
      n.stmt = to_string(body[static_cast<std::size_t>(f.pc)]);
    }
  }

  // Moves to the child labelled `label`, creating it with `make` on first visit.
  void advance(const std::string& label, const std::function<TreeNode()>& make) {
    if (on_tree_) {
      if (auto c = tree_.child(cur_, label)) {
        cur_ = *c;
      } else if (tree_.size() < cfg_.max_nodes) {
        TreeNode n = make();
        n.label = label;
        locate(n, frames_.back());
        cur_ = tree_.add_child(cur_, std::move(n));
      } else {
        on_tree_ = false;
        res_.truncated = true;
        cur_ = -1;
      }
    }
    mark(cur_);
  }

  void assign(TreeNode& n, const std::string& v, const Expr& e) {
    Sym sym(p_, types_);
    if (sym.type_of(e).kind == Type::Kind::Bool && !Sym::atomic(e)) {
      Pure phi = sym.pure(e);
      Binding b = retire(n, v);
      add_side(n, sym, b);
      n.delta.pure.push_back(substitute(bool_def(v, phi), b));
      return;
    }
    Term t = sym.term(e);
    Binding b = retire(n, v);
    add_side(n, sym, b);
    n.delta.pure.push_back(Pure::eq(Term::var(v), substitute(t, b)));
  }

  void condition(TreeNode& n, const Expr& e, bool positive) {
    Sym sym(p_, types_);
    Pure phi = sym.pure(e);
    add_side(n, sym, {});
    n.delta.pure.push_back(positive ? phi : Pure::negate(phi));
  }

  int target(const Expr& e) const { return as_int(eval_expr(s_, inst(e), p_)); }

  bool in_range(int k) const { return k >= 0 && k <= static_cast<int>(frames_.back().proc->body.size()); }

  // Executes one statement; true when the run is over.
  bool step() {
    Frame& f = frames_.back();
    const auto& body = f.proc->body;
    if (f.pc == static_cast<int>(body.size())) return leave(nullptr);
    const Stmt& st = body[static_cast<std::size_t>(f.pc)];
    const std::string& sfx = f.suffix;
    switch (st.kind) {
      case Stmt::Kind::Assign: {
        Expr e = inst(st.e);
        std::string v = st.var + sfx;
        s_.vars[v] = eval_expr(s_, e, p_);
        ++f.pc;
        advance("C-ASSIGN", [&] {
          TreeNode n = derive();
          assign(n, v, e);
          return n;
        });
        return false;
      }
      case Stmt::Kind::New: {
        std::vector<Expr> args;
        HeapObject obj{st.name, {}};
        for (const auto& a : st.args) {
          args.push_back(inst(a));
          obj.slots.push_back(eval_expr(s_, args.back(), p_));
        }
        std::string v = st.var + sfx;
        int addr = s_.next_addr++;
        s_.heap[addr] = std::move(obj);
        s_.vars[v] = Value::address(addr);
        ++f.pc;
        advance("C-NEW", [&] {
          TreeNode n = derive();
          Sym sym(p_, types_);
          std::vector<Term> terms;
          for (const auto& a : args) terms.push_back(sym.term(a));
          Binding b = retire(n, v);
          add_side(n, sym, b);
          for (auto& t : terms) t = substitute(t, b);
          n.delta.spatial.push_back(SpatialAtom::points_to(v, st.name, std::move(terms)));
          n.allocated.insert(v);
          return n;
        });
        return false;
      }
      case Stmt::Kind::Store: {
        std::string v = st.var + sfx;
        auto it = s_.vars.find(v);
        Value base = it == s_.vars.end() ? Value::null() : it->second;
        const HeapObject& obj = deref(s_, base, st.var + "." + st.field);
        std::size_t slot = slot_of(p_, obj.type, st.field);
        Expr e = inst(st.e);
        Value val = eval_expr(s_, e, p_);
        s_.heap.at(base.addr).slots.at(slot) = val;
        ++f.pc;
        advance("C-STORE", [&] {
          TreeNode n = derive();
          Sym sym(p_, types_);
          Term t = sym.term(e);
          add_side(n, sym, {});
          n.delta.pure.push_back(Pure::field_assign(v, st.field, t));
          return n;
        });
        return false;
      }
      case Stmt::Kind::Free: {
        auto it = s_.vars.find(st.var + sfx);
        Value base = it == s_.vars.end() ? Value::null() : it->second;
        if (base.kind == Value::Kind::Null) throw RuntimeFault(RunOutcome::Error::FreeOfNull, "free of null");
        deref(s_, base, st.var);
        s_.heap.erase(base.addr);
        s_.freed.insert(base.addr);
        ++f.pc;
        advance("C-FREE", [&] { return derive(); });
        return false;
      }
      case Stmt::Kind::Goto: {
        int k = target(st.e);
        if (!in_range(k)) throw RuntimeFault(RunOutcome::Error::GotoOutOfRange, "goto " + std::to_string(k));
        f.pc = k;
        advance("C-GOTO:" + std::to_string(k), [&] { return derive(); });
        return false;
      }
      case Stmt::Kind::Assert: {
        Expr e = inst(st.e);
        if (!as_bool(eval_expr(s_, e, p_))) {
          stop({RunOutcome::Kind::AssertionViolation, RunOutcome::Error::None, f.proc->name, f.pc});
          return true;
        }
        ++f.pc;
        advance("C-ASSERT", [&] {
          TreeNode n = derive();
          condition(n, e, true);
          return n;
        });
        return false;
      }
      case Stmt::Kind::If:
        return branch(st);
      case Stmt::Kind::Call:
        return call(st);
      case Stmt::Kind::Return:
        return leave(&st);
    }
    return false;
  }

  bool branch(const Stmt& st) {
    Frame& f = frames_.back();
    Expr e = inst(st.e);
    bool taken = as_bool(eval_expr(s_, e, p_));
    int k1 = target(st.then_target);
    int k2 = target(st.else_target);
    int k = taken ? k1 : k2;
    if (!in_range(k)) throw RuntimeFault(RunOutcome::Error::GotoOutOfRange, "goto " + std::to_string(k));
    if (on_tree_) {
      for (bool side : {true, false}) {
        const std::string label = side ? "then" : "else";
        if (tree_.child(cur_, label) || tree_.size() >= cfg_.max_nodes) continue;
        TreeNode n = derive();
        condition(n, e, side);
        n.label = label;
        n.branch = side ? TreeNode::Branch::Then : TreeNode::Branch::Else;
        Frame at = f;
        at.pc = side ? k1 : k2;
        locate(n, at);
        tree_.add_child(cur_, std::move(n));
      }
    }
    f.pc = k;
    advance(taken ? "then" : "else", [&]() -> TreeNode { throw std::logic_error("branch child missing"); });
    return false;
  }

  bool call(const Stmt& st) {
    Frame& f = frames_.back();
    if (static_cast<int>(frames_.size()) > cfg_.max_call_depth) {
      stop({RunOutcome::Kind::AssertionViolation, RunOutcome::Error::None, f.proc->name, f.pc});
      return true;
    }
    const Procedure* callee = p_.find_proc(st.name);
    if (!callee) throw std::logic_error("unknown procedure " + st.name);
    std::vector<Expr> args;
    std::vector<Value> vals;
    for (const auto& a : st.args) {
      args.push_back(inst(a));
      vals.push_back(eval_expr(s_, args.back(), p_));
    }
    std::string sfx = "#" + std::to_string(++calls_);
    declare(*callee, sfx);
    for (std::size_t i = 0; i < vals.size(); ++i) s_.vars[callee->params[i].name + sfx] = vals[i];
    frames_.push_back(Frame{callee, sfx, 0});
    advance("CALL", [&] {
      TreeNode n = derive();
      for (std::size_t i = 0; i < args.size(); ++i) assign(n, callee->params[i].name + sfx, args[i]);
      return n;
    });
    return false;
  }

  // Return from the current frame (`st` null: fell off the end).
  bool leave(const Stmt* st) {
    std::optional<Expr> e;
    std::optional<Value> val;
    if (st && st->has_value) {
      e = inst(st->e);
      val = eval_expr(s_, *e, p_);
    }
    if (frames_.size() == 1) {
      res_.returned = val;
      stop({RunOutcome::Kind::Ok, RunOutcome::Error::None, frames_.back().proc->name, frames_.back().pc});
      return true;
    }
    frames_.pop_back();
    Frame& caller = frames_.back();
    const Stmt& site = caller.proc->body.at(static_cast<std::size_t>(caller.pc));
    ++caller.pc;
    std::string target_var = site.var.empty() ? "" : site.var + caller.suffix;
    if (!target_var.empty() && val) s_.vars[target_var] = *val;
    advance("RETURN", [&] {
      TreeNode n = derive();
      if (!target_var.empty() && e) assign(n, target_var, *e);
      return n;
    });
    return false;
  }

  const Program& p_;
  const SpecFile& defs_;
  ConstraintTree& tree_;
  RunConfig cfg_;
  Stack s_;
  std::map<std::string, Type> types_;
  std::vector<Frame> frames_;
  int calls_ = 0;
  int cur_ = 0;
  bool on_tree_ = true;
  RunResult res_;
};

}  // namespace

RunResult run_test(const TestInput& t, const Program& p, const SpecFile& defs, ConstraintTree& tree,
                   const RunConfig& cfg) {
  Runner r(p, defs, tree, cfg);
  return r.run(t);
}

// ---------------------------------------------------------------------------
// Preprocessing

namespace {

std::optional<Term> first_field(const Term& t) {
  if (t.kind() == Term::Kind::Field) return t;
  for (const auto& k : t.kids()) {
    if (auto f = first_field(k)) return f;
  }
  return std::nullopt;
}

std::optional<Term> first_field(const Pure& p) {
  switch (p.kind()) {
    case Pure::Kind::True:
      return std::nullopt;
    case Pure::Kind::Eq:
    case Pure::Kind::Le: {
      if (auto f = first_field(p.left())) return f;
      return first_field(p.right());
    }
    case Pure::Kind::FieldAssign:
      return first_field(p.right());
    default:
      for (const auto& k : p.kids()) {
        if (auto f = first_field(k)) return f;
      }
      return std::nullopt;
  }
}

Term replace_field(const Term& t, const Term& f, const Term& by) {
  switch (t.kind()) {
    case Term::Kind::Field:
      return t == f ? by : t;
    case Term::Kind::Scale:
      return Term::scale(t.value(), replace_field(t.operand(), f, by));
    case Term::Kind::Add:
      return Term::add(replace_field(t.lhs(), f, by), replace_field(t.rhs(), f, by));
    case Term::Kind::Neg:
      return Term::neg(replace_field(t.operand(), f, by));
    case Term::Kind::Mul:
      return Term::mul(replace_field(t.lhs(), f, by), replace_field(t.rhs(), f, by));
    default:
      return t;
  }
}

Pure replace_field(const Pure& p, const Term& f, const Term& by) {
  switch (p.kind()) {
    case Pure::Kind::True:
      return p;
    case Pure::Kind::Eq:
      return Pure::eq(replace_field(p.left(), f, by), replace_field(p.right(), f, by));
    case Pure::Kind::Le:
      return Pure::le(replace_field(p.left(), f, by), replace_field(p.right(), f, by));
    case Pure::Kind::Not:
      return Pure::negate(replace_field(p.operand(), f, by));
    case Pure::Kind::And: {
      std::vector<Pure> ks;
      for (const auto& k : p.kids()) ks.push_back(replace_field(k, f, by));
      return Pure::conj(std::move(ks));
    }
    case Pure::Kind::FieldAssign:
      return Pure::field_assign(p.left().name(), p.left().field_name(), replace_field(p.right(), f, by));
  }
  return p;
}

class Preprocessor {
 public:
  Preprocessor(const SpecFile& defs, int max_unfolds) : defs_(defs), max_unfolds_(max_unfolds) {}

  struct State {
    std::vector<std::string> exists;
    std::vector<SpatialAtom> spatial;
    std::vector<Pure> done;
    std::deque<Pure> todo;
    // Slot values overridden by processed field assignments, by (head, field).
    std::map<std::pair<std::string, std::string>, Term> slots;
    int unfolds = 0;
  };

  void process(State st) {
    while (!st.todo.empty()) {
      Pure c = st.todo.front();
      auto access = first_field(c);
      bool assignment = false;
      if (!access) {
        if (c.kind() != Pure::Kind::FieldAssign) {
          st.done.push_back(std::move(c));
          st.todo.pop_front();
          continue;
        }
        access = c.left();
        assignment = true;
      }
      const std::string& v = access->name();
      const std::string& f = access->field_name();
      SymbolicHeap whole = view(st);
      if (entails_eq(whole, v, Term::null())) return;
      if (auto head = find_head(st, whole, v)) {
        const SpatialAtom& cell = st.spatial[*head];
        auto key = std::make_pair(cell.head, f);
        if (assignment) {
          std::string fresh = fresh_var(f);
          st.exists.push_back(fresh);
          st.slots[key] = Term::var(fresh);
          st.done.push_back(Pure::eq(Term::var(fresh), c.right()));
          st.todo.pop_front();
          continue;
        }
        auto over = st.slots.find(key);
        Term value;
        if (over != st.slots.end()) {
          value = over->second;
        } else {
          const DataDef* d = defs_.find_data(cell.name);
          auto i = d ? d->field_index(f) : std::nullopt;
          if (!i || *i >= cell.args.size()) return;
          value = cell.args[*i];
        }
        st.todo.front() = replace_field(c, *access, value);
        continue;
      }
      if (auto pred = find_pred(st, whole, v)) {
        if (st.unfolds >= max_unfolds_) {
          truncated = true;
          return;
        }
        SymbolicHeap spatial_only{st.exists, st.spatial, {}};
        for (auto& u : unfold_at(spatial_only, *pred, defs_)) {
          State next = st;
          next.exists = std::move(u.exists);
          next.spatial = std::move(u.spatial);
          next.done.insert(next.done.end(), u.pure.begin(), u.pure.end());
          ++next.unfolds;
          process(std::move(next));
        }
        return;
      }
      return;
    }
    out.push_back(SymbolicHeap{st.exists, st.spatial, st.done});
  }

  std::vector<SymbolicHeap> out;
  bool truncated = false;

 private:
  static SymbolicHeap view(const State& st) {
    SymbolicHeap h{st.exists, st.spatial, st.done};
    h.pure.insert(h.pure.end(), st.todo.begin(), st.todo.end());
    return h;
  }

  static std::optional<std::size_t> find_head(const State& st, const SymbolicHeap& whole, const std::string& v) {
    for (std::size_t i = 0; i < st.spatial.size(); ++i) {
      if (st.spatial[i].is_points_to() && st.spatial[i].head == v) return i;
    }
    for (std::size_t i = 0; i < st.spatial.size(); ++i) {
      if (st.spatial[i].is_points_to() && entails_eq(whole, v, Term::var(st.spatial[i].head))) return i;
    }
    return std::nullopt;
  }

  // A predicate instance with `v` (or an alias) among its arguments; root
  // positions are preferred over the others.
  static std::optional<std::size_t> find_pred(const State& st, const SymbolicHeap& whole, const std::string& v) {
    auto matches = [&](const Term& a) { return a.is_var() && entails_eq(whole, v, a); };
    for (std::size_t i = 0; i < st.spatial.size(); ++i) {
      const auto& a = st.spatial[i];
      if (a.is_pred() && !a.args.empty() && matches(a.args[0])) return i;
    }
    for (std::size_t i = 0; i < st.spatial.size(); ++i) {
      const auto& a = st.spatial[i];
      if (a.is_pred() && std::any_of(a.args.begin(), a.args.end(), matches)) return i;
    }
    return std::nullopt;
  }

  const SpecFile& defs_;
  int max_unfolds_;
};

}  // namespace

PreprocessResult preprocess(const SymbolicHeap& d, const SpecFile& defs, int max_unfolds) {
  Preprocessor pp(defs, max_unfolds);
  Preprocessor::State st;
  st.exists = d.exists;
  st.spatial = d.spatial;
  st.todo.assign(d.pure.begin(), d.pure.end());
  pp.process(std::move(st));
  return {std::move(pp.out), pp.truncated};
}

// ---------------------------------------------------------------------------
// Exploration

namespace {

struct Query {
  SymbolicHeap heap;
  std::set<std::string> allocated;
};

Query make_query(const TreeNode& node) {
  Query q{node.delta, {}};
  Binding b;
  std::set<std::string> unbind;
  for (const auto& [p, sym] : node.inputs) {
    if (sym == p) continue;
    b.emplace(p, Term::var(fresh_var(p)));
    b.emplace(sym, Term::var(p));
    unbind.insert(sym);
  }
  if (!b.empty()) {
    std::erase_if(q.heap.exists, [&](const std::string& v) { return unbind.count(v) > 0; });
    q.heap = substitute(q.heap, b);
  }
  for (const auto& a : node.allocated) {
    auto it = b.find(a);
    q.allocated.insert(it == b.end() ? a : it->second.name());
  }
  return q;
}

// Objects the program allocates are not part of the input.
SymbolicModel input_part(const SymbolicModel& m, const std::set<std::string>& allocated) {
  SymbolicModel out;
  std::set<std::string> gone;
  for (const auto& c : m.cells) {
    if (allocated.count(c.head)) {
      gone.insert(c.head);
    } else {
      out.cells.push_back(c);
    }
  }
  for (const auto& [v, t] : m.values) {
    if (gone.count(v) || (t.is_var() && gone.count(t.name()))) continue;
    out.values.emplace(v, t);
  }
  out.dangling = m.dangling;
  return out;
}

}  // namespace

SymbolicHeap solver_query(const TreeNode& node) { return make_query(node).heap; }

ExploreResult explore(const Program& p, const SpecFile& defs, const Formula& pre, const std::vector<TestInput>& seeds,
                      const ExploreConfig& cfg) {
  using Clock = std::chrono::steady_clock;
  const Procedure* entry = p.find_proc(p.entry);
  if (!entry) throw ValidationError("entry procedure '" + p.entry + "' not found");
  ExploreResult r{ConstraintTree(pre, entry->params, p.entry), {}, {}, {}};
  auto deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(cfg.time_limit));

  for (const auto& s : seeds) {
    auto run = run_test(s, p, defs, r.tree, cfg.run);
    r.tests.push_back({s, run.outcome, -1});
  }

  while (auto id = r.tree.next_unexplored()) {
    if (cfg.goal && cfg.goal(r.tree)) {
      r.stats.goal_reached = true;
      break;
    }
    if (Clock::now() > deadline || r.stats.iterations >= cfg.max_iterations || r.tree.size() >= cfg.run.max_nodes) {
      r.stats.budget_exhausted = true;
      r.log.push_back("budget exhausted with " + std::to_string(r.tree.count_unexplored()) + " open nodes");
      break;
    }
    ++r.stats.iterations;
    std::string tag = "node#" + std::to_string(*id);
    Query q = make_query(r.tree.node(*id));
    auto pp = preprocess(q.heap, defs);
    bool unresolved = pp.truncated;
    std::optional<TestInput> test;
    for (const auto& h : pp.heaps) {
      ++r.stats.solver_calls;
      SatResult sr;
      try {
        sr = sat(h, defs, cfg.solver);
      } catch (const ValidationError& e) {
        r.log.push_back(tag + ": solver rejected the query: " + e.what());
        unresolved = true;
        continue;
      }
      if (sr.decision == Decision::Unsat) {
        ++r.stats.unsat;
        continue;
      }
      if (sr.decision == Decision::Unknown) {
        ++r.stats.unknown;
        unresolved = true;
        continue;
      }
      ++r.stats.sat;
      try {
        TestInput t = to_unit_test(input_part(*sr.model, q.allocated), entry->params, defs);
        if (!satisfies(t, pre, defs)) {
          r.log.push_back(tag + ": model does not yield a valid input");
          unresolved = true;
          continue;
        }
        t.provenance = tag;
        test = std::move(t);
        break;
      } catch (const ConstructionError& e) {
        r.log.push_back(tag + ": construction failed: " + e.what());
        unresolved = true;
      }
    }
    TreeNode& node = r.tree.node(*id);
    if (!test) {
      if (unresolved) {
        node.state = TreeNode::State::Parked;
        node.note = "unknown";
        ++r.stats.parked;
        r.log.push_back(tag + ": parked");
      } else {
        node.state = TreeNode::State::Pruned;
        node.note = pp.heaps.empty() ? "no heap information" : "unsat";
        ++r.stats.pruned;
        r.log.push_back(tag + ": pruned (" + node.note + ")");
      }
      continue;
    }
    auto run = run_test(*test, p, defs, r.tree, cfg.run);
    ++r.stats.generated;
    r.tests.push_back({*test, run.outcome, *id});
    r.log.push_back(tag + ": new input, " + to_string(run.outcome));
    TreeNode& after = r.tree.node(*id);
    if (!after.explored) {
      after.state = TreeNode::State::Parked;
      after.note = "input did not reach the node";
      ++r.stats.parked;
      r.log.push_back(tag + ": generated input diverged, parked");
    }
  }
  return r;
}

}  // namespace slc
