#include <limits>
#include <set>

#include "lexer.hpp"
#include "slc/formulas.hpp"
#include "slc/sorts.hpp"

namespace slc {

namespace {

using detail::Token;
using detail::TokenStream;

bool is_cmp(const TokenStream& ts) {
  for (auto op : {"=", "==", "!=", "<", "<=", ">", ">="}) {
    if (ts.peek().kind == Token::Kind::Punct && ts.is(op)) return true;
  }
  return false;
}

bool is_arith_op(const TokenStream& ts) {
  return ts.peek().kind == Token::Kind::Punct && (ts.is("+") || ts.is("-") || ts.is("*"));
}

class SpecParser {
 public:
  SpecParser(std::string_view text, bool field_forms) : ts_(text), field_forms_(field_forms) {}

  TokenStream& stream() { return ts_; }

  Term term() {
    Term t = product();
    while (true) {
      if (ts_.accept("+")) {
        t = Term::add(std::move(t), product());
      } else if (ts_.accept("-")) {
        t = Term::sub(std::move(t), product());
      } else {
        return t;
      }
    }
  }

  Term product() {
    const Token start = ts_.peek();
    Term t = unary();
    while (ts_.is("*") && !spatial_star_) {
      ts_.next();
      Term r = unary();
      if (t.kind() != Term::Kind::Int && r.kind() != Term::Kind::Int && !field_forms_) {
        ts_.fail_at(start, "nonlinear term");
      }
      if (t.kind() == Term::Kind::Int) {
        t = Term::scale(t.value(), std::move(r));
      } else if (r.kind() == Term::Kind::Int) {
        t = Term::scale(r.value(), std::move(t));
      } else {
        t = Term::mul(std::move(t), std::move(r));
      }
    }
    return t;
  }

  Term unary() {
    if (ts_.accept("-")) {
      if (ts_.peek().kind == Token::Kind::Int) return int_literal(true);
      return Term::neg(unary());
    }
    return primary();
  }

  Term int_literal(bool negative) {
    const Token tok = ts_.peek();
    long long v = ts_.expect_int();
    if (negative) v = -v;
    if (v < std::numeric_limits<std::int32_t>::min() || v > std::numeric_limits<std::int32_t>::max()) {
      ts_.fail_at(tok, "integer literal out of 32-bit range");
    }
    return Term::constant(static_cast<std::int32_t>(v));
  }

  Term primary() {
    const Token& tok = ts_.peek();
    if (tok.kind == Token::Kind::Int) return int_literal(false);
    if (ts_.accept("(")) {
      bool saved = spatial_star_;
      spatial_star_ = false;
      Term t = term();
      spatial_star_ = saved;
      ts_.expect(")");
      return t;
    }
    if (tok.kind != Token::Kind::Ident) ts_.fail("expected term");
    if (ts_.accept("null")) return Term::null();
    if (ts_.accept("true")) return Term::boolean(true);
    if (ts_.accept("false")) return Term::boolean(false);
    std::string name = variable_name();
    if (ts_.is(".") && ts_.peek(1).kind == Token::Kind::Ident) {
      if (!field_forms_) ts_.fail("field access is not allowed in specifications");
      ts_.next();
      return Term::field(name, ts_.expect_ident());
    }
    return Term::var(name);
  }

  std::string variable_name() {
    const Token tok = ts_.peek();
    std::string name = ts_.expect_ident();
    static const std::set<std::string> reserved{"emp", "exists", "data", "pred", "pre", "null", "true", "false"};
    if (reserved.count(name)) ts_.fail_at(tok, "reserved word used as a variable");
    note_parsed_name(name);
    return name;
  }

  Pure comparison() {
    Term a = term();
    const Token op = ts_.peek();
    if (field_forms_ && ts_.accept(":=")) {
      if (a.kind() != Term::Kind::Field) ts_.fail_at(op, "left side of ':=' must be a field access");
      return Pure::field_assign(a.name(), a.field_name(), term());
    }
    if (!is_cmp(ts_)) ts_.fail("expected comparison operator");
    ts_.next();
    Term b = term();
    if (op.text == "=" || op.text == "==") return Pure::eq(std::move(a), std::move(b));
    if (op.text == "!=") return Pure::ne(std::move(a), std::move(b));
    if (op.text == "<") return Pure::lt(std::move(a), std::move(b));
    if (op.text == "<=") return Pure::le(std::move(a), std::move(b));
    if (op.text == ">") return Pure::lt(std::move(b), std::move(a));
    return Pure::le(std::move(b), std::move(a));
  }

  Pure pure_unary() {
    if (ts_.accept("!")) return Pure::negate(pure_unary());
    if ((ts_.is("true") || ts_.is("false")) && !is_cmp_after(1)) {
      bool t = ts_.next().text == "true";
      return t ? Pure::truth() : Pure::negate(Pure::truth());
    }
    if (ts_.is("(")) {
      auto m = ts_.mark();
      try {
        ts_.next();
        Pure p = pure();
        ts_.expect(")");
        if (!is_cmp(ts_) && !is_arith_op(ts_) && !ts_.is(":=")) return p;
      } catch (const ParseError&) {
      }
      ts_.reset(m);
    }
    return comparison();
  }

  bool is_cmp_after(std::size_t ahead) const {
    const Token& t = ts_.peek(ahead);
    if (t.kind != Token::Kind::Punct) return false;
    for (auto op : {"=", "==", "!=", "<", "<=", ">", ">=", "+", "-", "*"}) {
      if (t.text == op) return true;
    }
    return false;
  }

  Pure pure() {
    std::vector<Pure> parts{pure_unary()};
    while (ts_.accept("&")) parts.push_back(pure_unary());
    return Pure::conj(std::move(parts));
  }

  bool at_spatial() const {
    if (ts_.is("emp")) return true;
    if (ts_.peek().kind != Token::Kind::Ident) return false;
    return ts_.is("->", 1) || ts_.is("(", 1);
  }

  SpatialAtom atom() {
    const Token tok = ts_.peek();
    std::string name = ts_.expect_ident();
    std::vector<Term> args;
    if (ts_.accept("->")) {
      static const std::set<std::string> reserved{"emp", "exists", "null", "true", "false"};
      if (reserved.count(name)) ts_.fail_at(tok, "reserved word used as a variable");
      note_parsed_name(name);
      std::string type = ts_.expect_ident();
      args = arg_list();
      return SpatialAtom::points_to(std::move(name), std::move(type), std::move(args));
    }
    args = arg_list();
    return SpatialAtom::pred(std::move(name), std::move(args));
  }

  std::vector<Term> arg_list() {
    std::vector<Term> args;
    ts_.expect("(");
    bool saved = spatial_star_;
    spatial_star_ = false;
    if (!ts_.is(")")) {
      args.push_back(term());
      while (ts_.accept(",")) args.push_back(term());
    }
    spatial_star_ = saved;
    ts_.expect(")");
    return args;
  }

  SymbolicHeap heap() {
    SymbolicHeap d;
    if (ts_.accept("exists")) {
      d.exists.push_back(variable_name());
      while (ts_.accept(",")) d.exists.push_back(variable_name());
      ts_.expect(".");
    }
    std::vector<Pure> pure_parts;
    if (at_spatial()) {
      spatial_star_ = true;
      do {
        if (ts_.accept("emp")) continue;
        d.spatial.push_back(atom());
      } while (ts_.accept("*"));
      spatial_star_ = false;
      if (ts_.accept("&")) pure_parts = conjuncts(pure());
    } else {
      pure_parts = conjuncts(pure());
    }
    d.pure = std::move(pure_parts);
    return d;
  }

  Formula formula() {
    Formula f;
    f.disjuncts.push_back(heap());
    while (ts_.accept("\\/")) f.disjuncts.push_back(heap());
    return f;
  }

  SpecFile spec() {
    SpecFile s;
    while (!ts_.at_end()) {
      if (ts_.accept("data")) {
        DataDef d;
        d.name = ts_.expect_ident();
        ts_.expect("{");
        while (!ts_.accept("}")) {
          FieldDef f;
          f.type = ts_.expect_ident();
          f.name = ts_.expect_ident();
          ts_.expect(";");
          d.fields.push_back(std::move(f));
        }
        ts_.accept(";");
        s.data.push_back(std::move(d));
      } else if (ts_.accept("pred")) {
        PredDef p;
        p.name = ts_.expect_ident();
        ts_.expect("(");
        if (!ts_.is(")")) {
          p.params.push_back(variable_name());
          while (ts_.accept(",")) p.params.push_back(variable_name());
        }
        ts_.expect(")");
        ts_.expect("==");
        p.body = formula();
        ts_.expect(";");
        s.preds.push_back(std::move(p));
      } else if (ts_.accept("pre")) {
        Precondition p;
        p.proc = ts_.expect_ident();
        ts_.expect("==");
        p.formula = formula();
        ts_.expect(";");
        s.pres.push_back(std::move(p));
      } else {
        ts_.fail("expected 'data', 'pred' or 'pre'");
      }
    }
    return s;
  }

 private:
  TokenStream ts_;
  bool field_forms_;
  bool spatial_star_ = false;
};

void validate(const SpecFile& s) {
  std::set<std::string> names;
  for (const auto& d : s.data) {
    if (!names.insert(d.name).second) throw ValidationError("duplicate data type '" + d.name + "'");
    std::set<std::string> fields;
    for (const auto& f : d.fields) {
      if (!fields.insert(f.name).second) {
        throw ValidationError("duplicate field '" + f.name + "' in data type '" + d.name + "'");
      }
    }
  }
  for (const auto& d : s.data) {
    for (const auto& f : d.fields) {
      if (!is_scalar_type(f.type) && !s.find_data(f.type)) {
        throw ValidationError("unknown type '" + f.type + "' for field '" + d.name + "." + f.name + "'");
      }
    }
  }
  std::set<std::string> preds;
  for (const auto& p : s.preds) {
    if (!preds.insert(p.name).second) throw ValidationError("duplicate predicate '" + p.name + "'");
    std::set<std::string> params;
    for (const auto& v : p.params) {
      if (!params.insert(v).second) {
        throw ValidationError("duplicate parameter '" + v + "' of predicate '" + p.name + "'");
      }
    }
    bool has_base = false;
    for (const auto& d : p.body.disjuncts) {
      check_heap(d, s);
      for (const auto& v : free_vars(d)) {
        if (!params.count(v)) {
          throw ValidationError("free variable '" + v + "' in body of predicate '" + p.name + "'");
        }
      }
      has_base = has_base || d.is_base();
    }
    if (!has_base) throw ValidationError("predicate '" + p.name + "' has no base disjunct");
  }
  std::set<std::string> pres;
  for (const auto& p : s.pres) {
    if (!pres.insert(p.proc).second) throw ValidationError("duplicate precondition for '" + p.proc + "'");
    for (const auto& d : p.formula.disjuncts) check_heap(d, s);
  }
  auto ps = pred_param_sorts(s);
  for (const auto& p : s.pres) {
    for (const auto& d : p.formula.disjuncts) {
      try {
        infer_sorts(d, s, ps);
      } catch (const ValidationError& e) {
        throw ValidationError("precondition of " + p.proc + ": " + e.what());
      }
    }
  }
}

}  // namespace

void check_heap(const SymbolicHeap& d, const SpecFile& defs) {
  std::set<std::string> binders;
  for (const auto& e : d.exists) {
    if (!binders.insert(e).second) throw ValidationError("duplicate existential '" + e + "'");
  }
  std::set<std::string> used;
  for (const auto& a : d.spatial) {
    collect_vars(a, used);
    if (a.is_points_to()) {
      const DataDef* dd = defs.find_data(a.name);
      if (!dd) throw ValidationError("unknown data type '" + a.name + "'");
      if (dd->fields.size() != a.args.size()) {
        throw ValidationError("points-to of '" + a.name + "' expects " + std::to_string(dd->fields.size()) +
                              " fields, got " + std::to_string(a.args.size()));
      }
    } else {
      const PredDef* pd = defs.find_pred(a.name);
      if (!pd) throw ValidationError("unknown predicate '" + a.name + "'");
      if (pd->params.size() != a.args.size()) {
        throw ValidationError("predicate '" + a.name + "' expects " + std::to_string(pd->params.size()) +
                              " arguments, got " + std::to_string(a.args.size()));
      }
    }
  }
  for (const auto& p : d.pure) collect_vars(p, used);
  for (const auto& e : d.exists) {
    if (!used.count(e)) throw ValidationError("existential '" + e + "' is never used");
  }
}

SpecFile parse_spec(std::string_view text) {
  SpecParser p(text, false);
  SpecFile s = p.spec();
  validate(s);
  return s;
}

SymbolicHeap parse_heap(std::string_view text, bool allow_field_forms) {
  SpecParser p(text, allow_field_forms);
  SymbolicHeap d = p.heap();
  if (!p.stream().at_end()) p.stream().fail("unexpected trailing input");
  return d;
}

Formula parse_formula(std::string_view text, bool allow_field_forms) {
  SpecParser p(text, allow_field_forms);
  Formula f = p.formula();
  if (!p.stream().at_end()) p.stream().fail("unexpected trailing input");
  return f;
}

}  // namespace slc
