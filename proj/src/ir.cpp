#include "slc/ir.hpp"

#include <limits>
#include <set>
#include <sstream>

#include "lexer.hpp"

namespace slc {

// ---------------------------------------------------------------------------
// Types and expressions

Type Type::of_name(std::string_view t) {
  if (t == "int") return integer();
  if (t == "bool") return boolean();
  if (t == "void") return none();
  return ref(std::string(t));
}

std::string to_string(const Type& t) {
  switch (t.kind) {
    case Type::Kind::Int:
      return "int";
    case Type::Kind::Bool:
      return "bool";
    case Type::Kind::Ref:
      return t.data.empty() ? "null" : t.data;
    case Type::Kind::Void:
      return "void";
  }
  return "?";
}

bool compatible(const Type& declared, const Type& actual) {
  if (declared.kind != actual.kind) return false;
  if (declared.kind != Type::Kind::Ref) return true;
  return actual.data.empty() || declared.data.empty() || declared.data == actual.data;
}

std::string_view op_text(BinOp op) {
  switch (op) {
    case BinOp::Add:
      return "+";
    case BinOp::Sub:
      return "-";
    case BinOp::Mul:
      return "*";
    case BinOp::Eq:
      return "=";
    case BinOp::Ne:
      return "!=";
    case BinOp::Lt:
      return "<";
    case BinOp::Le:
      return "<=";
    case BinOp::Gt:
      return ">";
    case BinOp::Ge:
      return ">=";
    case BinOp::And:
      return "&&";
    case BinOp::Or:
      return "||";
  }
  return "?";
}

bool is_comparison(BinOp op) {
  return op == BinOp::Eq || op == BinOp::Ne || op == BinOp::Lt || op == BinOp::Le || op == BinOp::Gt ||
         op == BinOp::Ge;
}

Expr Expr::integer(std::int32_t k) {
  Expr e;
  e.kind = Kind::Int;
  e.value = k;
  return e;
}

Expr Expr::boolean(bool b) {
  Expr e;
  e.kind = Kind::Bool;
  e.value = b ? 1 : 0;
  return e;
}

Expr Expr::null() { return Expr{}; }

Expr Expr::var(std::string v) {
  Expr e;
  e.kind = Kind::Var;
  e.name = std::move(v);
  return e;
}

Expr Expr::load(std::string v, std::string f) {
  Expr e;
  e.kind = Kind::Field;
  e.name = std::move(v);
  e.field = std::move(f);
  return e;
}

Expr Expr::unary(UnOp op, Expr a) {
  Expr e;
  e.kind = Kind::Unary;
  e.uop = op;
  e.kids.push_back(std::move(a));
  return e;
}

Expr Expr::binary(BinOp op, Expr a, Expr b) {
  Expr e;
  e.kind = Kind::Binary;
  e.bop = op;
  e.kids.push_back(std::move(a));
  e.kids.push_back(std::move(b));
  return e;
}

std::optional<std::int32_t> Expr::as_constant() const {
  if (kind == Kind::Int) return value;
  return std::nullopt;
}

std::optional<Type> Procedure::type_of(std::string_view v) const {
  for (const auto& p : params) {
    if (p.name == v) return p.type;
  }
  auto it = locals.find(std::string(v));
  if (it != locals.end()) return it->second;
  return std::nullopt;
}

const Procedure* Program::find_proc(std::string_view name) const {
  for (const auto& p : procs) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

const DataDef* Program::find_data(std::string_view name) const {
  for (const auto& d : data) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

int precedence(const Expr& e) {
  if (e.kind == Expr::Kind::Unary) return 6;
  if (e.kind != Expr::Kind::Binary) return 7;
  switch (e.bop) {
    case BinOp::Or:
      return 1;
    case BinOp::And:
      return 2;
    case BinOp::Add:
    case BinOp::Sub:
      return 4;
    case BinOp::Mul:
      return 5;
    default:
      return 3;
  }
}

void print_expr(const Expr& e, int ctx, std::ostream& os) {
  int p = precedence(e);
  bool paren = p < ctx;
  if (paren) os << "(";
  switch (e.kind) {
    case Expr::Kind::Int:
      os << e.value;
      break;
    case Expr::Kind::Bool:
      os << (e.value ? "true" : "false");
      break;
    case Expr::Kind::Null:
      os << "null";
      break;
    case Expr::Kind::Var:
      os << e.name;
      break;
    case Expr::Kind::Field:
      os << e.name << "." << e.field;
      break;
    case Expr::Kind::Unary:
      if (e.uop == UnOp::Not) {
        os << "!";
        print_expr(e.kids[0], 6, os);
      } else if (e.kids[0].kind == Expr::Kind::Int && e.kids[0].value >= 0) {
        os << "-(" << e.kids[0].value << ")";
      } else {
        os << "-";
        print_expr(e.kids[0], 6, os);
      }
      break;
    case Expr::Kind::Binary:
      if (p == 3) {
        print_expr(e.kids[0], 4, os);
        os << " " << op_text(e.bop) << " ";
        print_expr(e.kids[1], 4, os);
      } else {
        print_expr(e.kids[0], p, os);
        os << " " << op_text(e.bop) << " ";
        print_expr(e.kids[1], p + 1, os);
      }
      break;
  }
  if (paren) os << ")";
}

std::string args_text(const std::vector<Expr>& args) {
  std::string out = "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ", ";
    out += to_string(args[i]);
  }
  return out + ")";
}

}  // namespace

std::string to_string(const Expr& e) {
  std::ostringstream os;
  print_expr(e, 0, os);
  return os.str();
}

std::string to_string(const Stmt& s) {
  switch (s.kind) {
    case Stmt::Kind::Assign:
      return s.var + " := " + to_string(s.e);
    case Stmt::Kind::New:
      return s.var + " := new " + s.name + args_text(s.args);
    case Stmt::Kind::Store:
      return s.var + "." + s.field + " := " + to_string(s.e);
    case Stmt::Kind::Goto:
      return "goto " + to_string(s.e);
    case Stmt::Kind::Assert:
      return "assert " + to_string(s.e);
    case Stmt::Kind::If:
      return "if " + to_string(s.e) + " then goto " + to_string(s.then_target) + " else goto " +
             to_string(s.else_target);
    case Stmt::Kind::Free:
      return "free " + s.var;
    case Stmt::Kind::Call:
      return "call " + (s.var.empty() ? "" : s.var + " := ") + s.name + args_text(s.args);
    case Stmt::Kind::Return:
      return s.has_value ? "return " + to_string(s.e) : "return";
  }
  return "";
}

std::string to_string(const Program& p) {
  std::ostringstream os;
  for (const auto& d : p.data) {
    os << "data " << d.name << " {";
    for (const auto& f : d.fields) os << " " << f.type << " " << f.name << ";";
    os << " }\n";
  }
  for (const auto& pr : p.procs) {
    os << "\nproc " << pr.name << "(";
    for (std::size_t i = 0; i < pr.params.size(); ++i) {
      os << (i ? ", " : "") << pr.params[i].name << ": " << to_string(pr.params[i].type);
    }
    os << ")";
    if (pr.ret.kind != Type::Kind::Void) os << " -> " << to_string(pr.ret);
    os << " {\n";
    for (std::size_t i = 0; i < pr.body.size(); ++i) os << "  " << i << ": " << to_string(pr.body[i]) << "\n";
    os << "}\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

using detail::Token;
using detail::TokenStream;

const std::set<std::string> kKeywords{"goto", "assert", "if",   "then", "else", "free", "call",
                                      "return", "new",  "null", "true", "false", "proc", "data"};

class ProgramParser {
 public:
  explicit ProgramParser(std::string_view text) : ts_(text) {}

  std::string ident() {
    const Token tok = ts_.peek();
    std::string s = ts_.expect_ident();
    if (kKeywords.count(s)) ts_.fail_at(tok, "keyword used as identifier");
    if (s.find_first_of("'#") != std::string::npos) ts_.fail_at(tok, "identifiers may not contain ' or #");
    return s;
  }

  std::string type_name() {
    const Token tok = ts_.peek();
    std::string s = ts_.expect_ident();
    if (s != "int" && s != "bool" && kKeywords.count(s)) ts_.fail_at(tok, "expected type");
    return s;
  }

  Expr expr() {
    Expr e = conj();
    while (ts_.accept("||")) e = Expr::binary(BinOp::Or, std::move(e), conj());
    return e;
  }

  Expr conj() {
    Expr e = cmp();
    while (ts_.accept("&&")) e = Expr::binary(BinOp::And, std::move(e), cmp());
    return e;
  }

  Expr cmp() {
    Expr e = sum();
    static const std::pair<const char*, BinOp> ops[] = {{"==", BinOp::Eq}, {"=", BinOp::Eq},  {"!=", BinOp::Ne},
                                                        {"<=", BinOp::Le}, {"<", BinOp::Lt},  {">=", BinOp::Ge},
                                                        {">", BinOp::Gt}};
    for (const auto& [t, op] : ops) {
      if (ts_.peek().kind == Token::Kind::Punct && ts_.is(t)) {
        ts_.next();
        return Expr::binary(op, std::move(e), sum());
      }
    }
    return e;
  }

  Expr sum() {
    Expr e = product();
    while (true) {
      if (ts_.accept("+")) {
        e = Expr::binary(BinOp::Add, std::move(e), product());
      } else if (ts_.accept("-")) {
        e = Expr::binary(BinOp::Sub, std::move(e), product());
      } else {
        return e;
      }
    }
  }

  Expr product() {
    Expr e = unary();
    while (ts_.accept("*")) e = Expr::binary(BinOp::Mul, std::move(e), unary());
    return e;
  }

  Expr int_literal(bool negative) {
    const Token tok = ts_.peek();
    long long v = ts_.expect_int();
    if (negative) v = -v;
    if (v < std::numeric_limits<std::int32_t>::min() || v > std::numeric_limits<std::int32_t>::max()) {
      ts_.fail_at(tok, "integer literal out of 32-bit range");
    }
    return Expr::integer(static_cast<std::int32_t>(v));
  }

  Expr unary() {
    if (ts_.accept("!")) return Expr::unary(UnOp::Not, unary());
    if (ts_.accept("-")) {
      if (ts_.peek().kind == Token::Kind::Int) return int_literal(true);
      return Expr::unary(UnOp::Neg, unary());
    }
    return primary();
  }

  Expr primary() {
    if (ts_.peek().kind == Token::Kind::Int) return int_literal(false);
    if (ts_.accept("(")) {
      Expr e = expr();
      ts_.expect(")");
      return e;
    }
    if (ts_.accept("null")) return Expr::null();
    if (ts_.accept("true")) return Expr::boolean(true);
    if (ts_.accept("false")) return Expr::boolean(false);
    if (ts_.peek().kind != Token::Kind::Ident) ts_.fail("expected expression");
    std::string v = ident();
    if (ts_.accept(".")) return Expr::load(v, ident());
    return Expr::var(v);
  }

  std::vector<Expr> args() {
    std::vector<Expr> out;
    ts_.expect("(");
    if (!ts_.is(")")) {
      out.push_back(expr());
      while (ts_.accept(",")) out.push_back(expr());
    }
    ts_.expect(")");
    return out;
  }

  Stmt stmt() {
    Stmt s;
    s.line = ts_.peek().line;
    if (ts_.accept("goto")) {
      s.kind = Stmt::Kind::Goto;
      s.e = expr();
    } else if (ts_.accept("assert")) {
      s.kind = Stmt::Kind::Assert;
      s.e = expr();
    } else if (ts_.accept("if")) {
      s.kind = Stmt::Kind::If;
      s.e = expr();
      ts_.expect("then");
      ts_.expect("goto");
      s.then_target = expr();
      ts_.expect("else");
      ts_.expect("goto");
      s.else_target = expr();
    } else if (ts_.accept("free")) {
      s.kind = Stmt::Kind::Free;
      s.var = ident();
    } else if (ts_.accept("call")) {
      s.kind = Stmt::Kind::Call;
      std::string first = ident();
      if (ts_.accept(":=")) {
        s.var = first;
        s.name = ident();
      } else {
        s.name = first;
      }
      s.args = args();
    } else if (ts_.accept("return")) {
      s.kind = Stmt::Kind::Return;
      bool bare = ts_.is("}") || (ts_.peek().kind == Token::Kind::Int && ts_.is(":", 1));
      if (!bare) {
        s.has_value = true;
        s.e = expr();
      }
    } else {
      std::string v = ident();
      if (ts_.accept(".")) {
        s.kind = Stmt::Kind::Store;
        s.var = v;
        s.field = ident();
        ts_.expect(":=");
        s.e = expr();
      } else {
        ts_.expect(":=");
        s.var = v;
        if (ts_.accept("new")) {
          s.kind = Stmt::Kind::New;
          s.name = ident();
          s.args = args();
        } else {
          s.kind = Stmt::Kind::Assign;
          s.e = expr();
        }
      }
    }
    return s;
  }

  Procedure proc() {
    Procedure p;
    p.name = ident();
    ts_.expect("(");
    if (!ts_.is(")")) {
      do {
        Param prm;
        prm.name = ident();
        ts_.expect(":");
        prm.type = Type::of_name(type_name());
        p.params.push_back(std::move(prm));
      } while (ts_.accept(","));
    }
    ts_.expect(")");
    if (ts_.accept("->")) p.ret = Type::of_name(type_name());
    ts_.expect("{");
    while (!ts_.accept("}")) {
      const Token tok = ts_.peek();
      long long idx = ts_.expect_int();
      if (idx != static_cast<long long>(p.body.size())) {
        ts_.fail_at(tok, "statement index " + std::to_string(idx) + " out of sequence (expected " +
                             std::to_string(p.body.size()) + ")");
      }
      ts_.expect(":");
      p.body.push_back(stmt());
    }
    return p;
  }

  Program program() {
    Program prog;
    while (!ts_.at_end()) {
      if (ts_.accept("data")) {
        DataDef d;
        d.name = ident();
        ts_.expect("{");
        while (!ts_.accept("}")) {
          FieldDef f;
          f.type = type_name();
          f.name = ident();
          ts_.expect(";");
          d.fields.push_back(std::move(f));
        }
        ts_.accept(";");
        prog.data.push_back(std::move(d));
      } else if (ts_.accept("proc")) {
        prog.procs.push_back(proc());
      } else {
        ts_.fail("expected 'data' or 'proc'");
      }
    }
    return prog;
  }

 private:
  TokenStream ts_;
};

// ---------------------------------------------------------------------------
// Validation

class Checker {
 public:
  Checker(const Program& prog, Procedure& proc) : prog_(prog), proc_(proc) {}

  [[noreturn]] void fail(const Stmt* s, const std::string& msg) const {
    std::string where = proc_.name;
    if (s) where += ":" + std::to_string(s - proc_.body.data());
    throw ValidationError(where + ": " + msg);
  }

  std::optional<Type> var_type(const std::string& v) const {
    for (const auto& p : proc_.params) {
      if (p.name == v) return p.type;
    }
    auto it = env_.find(v);
    if (it != env_.end()) return it->second;
    return std::nullopt;
  }

  // Returns nullopt when a variable's type is not known yet (non-strict mode).
  std::optional<Type> type_of(const Expr& e, const Stmt* s, bool strict) const {
    switch (e.kind) {
      case Expr::Kind::Int:
        return Type::integer();
      case Expr::Kind::Bool:
        return Type::boolean();
      case Expr::Kind::Null:
        return Type::ref();
      case Expr::Kind::Var: {
        auto t = var_type(e.name);
        if (!t && strict) fail(s, "unknown variable '" + e.name + "'");
        return t;
      }
      case Expr::Kind::Field: {
        auto base = type_of(Expr::var(e.name), s, strict);
        if (!base) return std::nullopt;
        return field_type(*base, e.field, s);
      }
      case Expr::Kind::Unary: {
        auto t = type_of(e.kids[0], s, strict);
        if (!t) return std::nullopt;
        Type want = e.uop == UnOp::Not ? Type::boolean() : Type::integer();
        if (!(t->kind == want.kind)) {
          fail(s, "operand of '" + std::string(e.uop == UnOp::Not ? "!" : "-") + "' must be " + to_string(want));
        }
        return want;
      }
      case Expr::Kind::Binary: {
        auto a = type_of(e.kids[0], s, strict);
        auto b = type_of(e.kids[1], s, strict);
        if (!a || !b) return std::nullopt;
        std::string op(op_text(e.bop));
        switch (e.bop) {
          case BinOp::Add:
          case BinOp::Sub:
          case BinOp::Mul:
            if (a->kind != Type::Kind::Int || b->kind != Type::Kind::Int) fail(s, "'" + op + "' needs int operands");
            return Type::integer();
          case BinOp::Lt:
          case BinOp::Le:
          case BinOp::Gt:
          case BinOp::Ge:
            if (a->kind != Type::Kind::Int || b->kind != Type::Kind::Int) fail(s, "'" + op + "' needs int operands");
            return Type::boolean();
          case BinOp::Eq:
          case BinOp::Ne:
            if (!compatible(*a, *b) && !compatible(*b, *a)) {
              fail(s, "mixed-type comparison " + to_string(*a) + " " + op + " " + to_string(*b));
            }
            return Type::boolean();
          case BinOp::And:
          case BinOp::Or:
            if (a->kind != Type::Kind::Bool || b->kind != Type::Kind::Bool) {
              fail(s, "'" + op + "' needs bool operands");
            }
            return Type::boolean();
        }
      }
    }
    return std::nullopt;
  }

  Type field_type(const Type& base, const std::string& f, const Stmt* s) const {
    if (!base.is_ref() || base.data.empty()) fail(s, "field access '." + f + "' on non-object");
    const DataDef* d = prog_.find_data(base.data);
    if (!d) fail(s, "unknown type '" + base.data + "'");
    auto i = d->field_index(f);
    if (!i) fail(s, "unknown field '" + f + "' of type '" + base.data + "'");
    return Type::of_name(d->fields[*i].type);
  }

  bool define(const std::string& v, const Type& t, const Stmt* s) {
    for (const auto& p : proc_.params) {
      if (p.name == v) {
        if (!compatible(p.type, t)) fail(s, "cannot assign " + to_string(t) + " to parameter '" + v + "'");
        return false;
      }
    }
    auto it = env_.find(v);
    if (it == env_.end()) {
      env_.emplace(v, t);
      return true;
    }
    Type& cur = it->second;
    if (cur.kind != t.kind || (cur.is_ref() && !cur.data.empty() && !t.data.empty() && cur.data != t.data)) {
      fail(s, "variable '" + v + "' assigned both " + to_string(cur) + " and " + to_string(t));
    }
    if (cur.is_ref() && cur.data.empty() && !t.data.empty()) {
      cur = t;
      return true;
    }
    return false;
  }

  void infer_locals() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& s : proc_.body) {
        std::optional<Type> t;
        if (s.kind == Stmt::Kind::Assign) {
          t = type_of(s.e, &s, false);
        } else if (s.kind == Stmt::Kind::New) {
          t = Type::ref(s.name);
        } else if (s.kind == Stmt::Kind::Call && !s.var.empty()) {
          const Procedure* callee = prog_.find_proc(s.name);
          if (!callee) fail(&s, "unknown procedure '" + s.name + "'");
          if (callee->ret.kind == Type::Kind::Void) fail(&s, "procedure '" + s.name + "' returns no value");
          t = callee->ret;
        }
        if (t && define(s.var, *t, &s)) changed = true;
      }
    }
  }

  void check_target(const Expr& e, const Stmt* s) const {
    auto t = type_of(e, s, true);
    if (t->kind != Type::Kind::Int) fail(s, "goto target must be int");
    if (auto k = e.as_constant()) {
      if (*k < 0 || static_cast<std::size_t>(*k) > proc_.body.size()) {
        fail(s, "goto target " + std::to_string(*k) + " out of range [0," + std::to_string(proc_.body.size()) + "]");
      }
    }
  }

  void expect(const Expr& e, Type::Kind k, const Stmt* s, const char* what) const {
    auto t = type_of(e, s, true);
    if (t->kind != k) fail(s, std::string(what) + " must be " + to_string(Type{k, ""}));
  }

  void check() {
    std::set<std::string> pnames;
    for (const auto& p : proc_.params) {
      if (!pnames.insert(p.name).second) fail(nullptr, "duplicate parameter '" + p.name + "'");
      check_type(p.type);
    }
    if (proc_.ret.is_ref()) check_type(proc_.ret);
    infer_locals();
    for (const auto& s : proc_.body) {
      switch (s.kind) {
        case Stmt::Kind::Assign: {
          auto t = type_of(s.e, &s, true);
          if (t->kind == Type::Kind::Void) fail(&s, "void value");
          break;
        }
        case Stmt::Kind::New: {
          const DataDef* d = prog_.find_data(s.name);
          if (!d) fail(&s, "unknown type '" + s.name + "'");
          if (d->fields.size() != s.args.size()) {
            fail(&s, "new " + s.name + " expects " + std::to_string(d->fields.size()) + " arguments, got " +
                         std::to_string(s.args.size()));
          }
          for (std::size_t i = 0; i < s.args.size(); ++i) {
            const Expr& a = s.args[i];
            if (a.kind != Expr::Kind::Var && a.kind != Expr::Kind::Int && a.kind != Expr::Kind::Bool &&
                a.kind != Expr::Kind::Null) {
              fail(&s, "arguments of new must be variables or constants");
            }
            auto t = type_of(a, &s, true);
            if (!compatible(Type::of_name(d->fields[i].type), *t)) {
              fail(&s, "argument " + std::to_string(i + 1) + " of new " + s.name + " has type " + to_string(*t));
            }
          }
          break;
        }
        case Stmt::Kind::Store: {
          auto base = type_of(Expr::var(s.var), &s, true);
          Type ft = field_type(*base, s.field, &s);
          auto t = type_of(s.e, &s, true);
          if (!compatible(ft, *t)) fail(&s, "cannot store " + to_string(*t) + " into field '" + s.field + "'");
          break;
        }
        case Stmt::Kind::Goto:
          check_target(s.e, &s);
          break;
        case Stmt::Kind::Assert:
          expect(s.e, Type::Kind::Bool, &s, "assertion");
          break;
        case Stmt::Kind::If:
          expect(s.e, Type::Kind::Bool, &s, "condition");
          check_target(s.then_target, &s);
          check_target(s.else_target, &s);
          break;
        case Stmt::Kind::Free: {
          auto t = type_of(Expr::var(s.var), &s, true);
          if (!t->is_ref()) fail(&s, "free of non-reference '" + s.var + "'");
          break;
        }
        case Stmt::Kind::Call: {
          const Procedure* callee = prog_.find_proc(s.name);
          if (!callee) fail(&s, "unknown procedure '" + s.name + "'");
          if (callee->params.size() != s.args.size()) {
            fail(&s, "procedure '" + s.name + "' expects " + std::to_string(callee->params.size()) +
                         " arguments, got " + std::to_string(s.args.size()));
          }
          for (std::size_t i = 0; i < s.args.size(); ++i) {
            auto t = type_of(s.args[i], &s, true);
            if (!compatible(callee->params[i].type, *t)) {
              fail(&s, "argument " + std::to_string(i + 1) + " of '" + s.name + "' has type " + to_string(*t));
            }
          }
          break;
        }
        case Stmt::Kind::Return: {
          if (proc_.ret.kind == Type::Kind::Void) {
            if (s.has_value) fail(&s, "void procedure returns a value");
          } else {
            if (!s.has_value) fail(&s, "missing return value");
            auto t = type_of(s.e, &s, true);
            if (!compatible(proc_.ret, *t)) fail(&s, "returns " + to_string(*t) + ", expected " + to_string(proc_.ret));
          }
          break;
        }
      }
    }
    proc_.locals = env_;
  }

  void check_type(const Type& t) const {
    if (t.is_ref() && !prog_.find_data(t.data)) fail(nullptr, "unknown type '" + t.data + "'");
  }

 private:
  const Program& prog_;
  Procedure& proc_;
  std::map<std::string, Type> env_;
};

}  // namespace

void validate(Program& p) {
  std::set<std::string> names;
  for (const auto& d : p.data) {
    if (!names.insert(d.name).second) throw ValidationError("duplicate data type '" + d.name + "'");
    std::set<std::string> fields;
    for (const auto& f : d.fields) {
      if (!fields.insert(f.name).second) throw ValidationError("duplicate field '" + f.name + "' in '" + d.name + "'");
      if (!is_scalar_type(f.type) && !p.find_data(f.type)) {
        throw ValidationError("unknown type '" + f.type + "' for field '" + d.name + "." + f.name + "'");
      }
    }
  }
  names.clear();
  for (const auto& pr : p.procs) {
    if (!names.insert(pr.name).second) throw ValidationError("duplicate procedure '" + pr.name + "'");
  }
  if (p.procs.empty()) throw ValidationError("program has no procedures");
  for (auto& pr : p.procs) {
    Checker c(p, pr);
    c.check();
  }
  if (p.entry.empty()) p.entry = p.procs.front().name;
  if (!p.find_proc(p.entry)) throw ValidationError("unknown entry procedure '" + p.entry + "'");
}

void set_entry(Program& p, std::string_view name) {
  if (!p.find_proc(name)) throw ValidationError("unknown entry procedure '" + std::string(name) + "'");
  p.entry = std::string(name);
}

Program parse_program(std::string_view text, const std::vector<DataDef>& shared) {
  ProgramParser parser(text);
  Program prog = parser.program();
  std::vector<DataDef> merged = shared;
  for (auto& d : prog.data) {
    bool found = false;
    for (const auto& s : shared) {
      if (s.name == d.name) {
        if (!(s == d)) throw ValidationError("data type '" + d.name + "' disagrees with the specification");
        found = true;
      }
    }
    if (!found) merged.push_back(std::move(d));
  }
  prog.data = std::move(merged);
  validate(prog);
  return prog;
}

std::vector<std::string> check_ssa(const Program& p) {
  std::vector<std::string> warnings;
  for (const auto& pr : p.procs) {
    std::map<std::string, int> defs;
    std::vector<std::string> order;
    auto def = [&](const std::string& v) {
      if (defs[v]++ == 0) order.push_back(v);
    };
    for (const auto& prm : pr.params) def(prm.name);
    for (const auto& s : pr.body) {
      if (s.kind == Stmt::Kind::Assign || s.kind == Stmt::Kind::New ||
          (s.kind == Stmt::Kind::Call && !s.var.empty())) {
        def(s.var);
      }
    }
    for (const auto& v : order) {
      if (defs[v] > 1) {
        warnings.push_back(pr.name + ": variable '" + v + "' assigned " + std::to_string(defs[v]) + " times");
      }
    }
  }
  return warnings;
}

}  // namespace slc
