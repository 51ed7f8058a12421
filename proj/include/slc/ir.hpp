// Core intermediate language: numbered statements per procedure, side-effect
// free expressions with memory loads, plus `call`/`return` for procedures.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "slc/formulas.hpp"

namespace slc {

struct Type {
  enum class Kind : std::uint8_t { Int, Bool, Ref, Void };
  Kind kind = Kind::Void;
  std::string data;  // Ref target; empty for the type of `null`

  static Type integer() { return {Kind::Int, ""}; }
  static Type boolean() { return {Kind::Bool, ""}; }
  static Type ref(std::string c = "") { return {Kind::Ref, std::move(c)}; }
  static Type none() { return {}; }
  static Type of_name(std::string_view t);

  bool is_ref() const { return kind == Kind::Ref; }
  bool operator==(const Type&) const = default;
};

std::string to_string(const Type& t);
/// Assignment compatibility; `null` (Ref without data) fits any reference.
bool compatible(const Type& declared, const Type& actual);

enum class UnOp : std::uint8_t { Not, Neg };
enum class BinOp : std::uint8_t { Add, Sub, Mul, Eq, Ne, Lt, Le, Gt, Ge, And, Or };

std::string_view op_text(BinOp op);
bool is_comparison(BinOp op);

struct Expr {
  enum class Kind : std::uint8_t { Int, Bool, Null, Var, Field, Unary, Binary };
  Kind kind = Kind::Null;
  std::int32_t value = 0;
  std::string name;   // variable, or base variable of a field access
  std::string field;
  UnOp uop = UnOp::Not;
  BinOp bop = BinOp::Add;
  std::vector<Expr> kids;

  static Expr integer(std::int32_t k);
  static Expr boolean(bool b);
  static Expr null();
  static Expr var(std::string v);
  static Expr load(std::string v, std::string f);
  static Expr unary(UnOp op, Expr e);
  static Expr binary(BinOp op, Expr a, Expr b);

  /// Constant integer value, if the expression is a literal.
  std::optional<std::int32_t> as_constant() const;
  bool operator==(const Expr&) const = default;
};

struct Stmt {
  enum class Kind : std::uint8_t { Assign, New, Store, Goto, Assert, If, Free, Call, Return };
  Kind kind = Kind::Goto;
  std::string var;    // target of assign/new/call, base of store, operand of free
  std::string field;  // store
  std::string name;   // data type for new, callee for call
  Expr e;             // assigned/stored value, goto target, condition, returned value
  Expr then_target;
  Expr else_target;
  std::vector<Expr> args;
  bool has_value = false;  // return with a value
  int line = 0;

  bool operator==(const Stmt& o) const {
    return kind == o.kind && var == o.var && field == o.field && name == o.name && e == o.e &&
           then_target == o.then_target && else_target == o.else_target && args == o.args &&
           has_value == o.has_value;
  }
};

struct Param {
  std::string name;
  Type type;
  bool operator==(const Param&) const = default;
};

struct Procedure {
  std::string name;
  std::vector<Param> params;
  Type ret;
  std::vector<Stmt> body;              // dense indices 0..m-1; m is normal exit
  std::map<std::string, Type> locals;  // inferred during validation

  std::optional<Type> type_of(std::string_view v) const;
  bool operator==(const Procedure& o) const {
    return name == o.name && params == o.params && ret == o.ret && body == o.body;
  }
};

struct Program {
  std::vector<DataDef> data;
  std::vector<Procedure> procs;
  std::string entry;

  const Procedure* find_proc(std::string_view name) const;
  const DataDef* find_data(std::string_view name) const;
  bool operator==(const Program& o) const { return data == o.data && procs == o.procs; }
};

/// Parses and validates a program. Data types declared in `shared` (usually
/// the specification's) are visible; re-declarations must agree with them.
/// The entry defaults to the first procedure.
Program parse_program(std::string_view text, const std::vector<DataDef>& shared = {});
/// Re-runs validation (types, arities, constant goto ranges) and fills in
/// local variable types.
void validate(Program& p);
/// Selects the entry procedure; throws ValidationError if it does not exist.
void set_entry(Program& p, std::string_view name);

/// Advisory single-assignment check: one warning per variable defined more
/// than once in a procedure (parameters count as definitions).
std::vector<std::string> check_ssa(const Program& p);

std::string to_string(const Expr& e);
std::string to_string(const Stmt& s);
std::string to_string(const Program& p);

}  // namespace slc
