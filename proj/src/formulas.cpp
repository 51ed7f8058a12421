#include "slc/formulas.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <functional>
#include <sstream>

namespace slc {

ParseError::ParseError(const std::string& msg, int line, int column)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
      line_(line),
      column_(column) {}

// ---------------------------------------------------------------------------
// Term

Term Term::null() { return Term(); }

Term Term::constant(std::int32_t k) {
  Term t;
  t.kind_ = Kind::Int;
  t.value_ = k;
  return t;
}

Term Term::boolean(bool b) {
  Term t;
  t.kind_ = Kind::Bool;
  t.value_ = b ? 1 : 0;
  return t;
}

Term Term::var(std::string name) {
  Term t;
  t.kind_ = Kind::Var;
  t.name_ = std::move(name);
  return t;
}

Term Term::scale(std::int32_t k, Term a) {
  Term t;
  t.kind_ = Kind::Scale;
  t.value_ = k;
  t.kids_.push_back(std::move(a));
  return t;
}

Term Term::add(Term a, Term b) {
  Term t;
  t.kind_ = Kind::Add;
  t.kids_.push_back(std::move(a));
  t.kids_.push_back(std::move(b));
  return t;
}

Term Term::neg(Term a) {
  Term t;
  t.kind_ = Kind::Neg;
  t.kids_.push_back(std::move(a));
  return t;
}

Term Term::mul(Term a, Term b) {
  if (a.kind_ == Kind::Int) return scale(a.value_, std::move(b));
  if (b.kind_ == Kind::Int) return scale(b.value_, std::move(a));
  Term t;
  t.kind_ = Kind::Mul;
  t.kids_.push_back(std::move(a));
  t.kids_.push_back(std::move(b));
  return t;
}

Term Term::field(std::string base, std::string field) {
  Term t;
  t.kind_ = Kind::Field;
  t.name_ = std::move(base);
  t.field_ = std::move(field);
  return t;
}

bool Term::has_field_access() const {
  if (kind_ == Kind::Field) return true;
  return std::any_of(kids_.begin(), kids_.end(), [](const Term& k) { return k.has_field_access(); });
}

bool Term::is_linear() const {
  if (kind_ == Kind::Mul) return false;
  return std::all_of(kids_.begin(), kids_.end(), [](const Term& k) { return k.is_linear(); });
}

bool Term::operator==(const Term& o) const {
  return kind_ == o.kind_ && value_ == o.value_ && name_ == o.name_ && field_ == o.field_ &&
         kids_ == o.kids_;
}

std::strong_ordering Term::operator<=>(const Term& o) const {
  if (auto c = kind_ <=> o.kind_; c != 0) return c;
  if (auto c = value_ <=> o.value_; c != 0) return c;
  if (auto c = name_ <=> o.name_; c != 0) return c;
  if (auto c = field_ <=> o.field_; c != 0) return c;
  if (auto c = kids_.size() <=> o.kids_.size(); c != 0) return c;
  for (std::size_t i = 0; i < kids_.size(); ++i) {
    if (auto c = kids_[i] <=> o.kids_[i]; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

// ---------------------------------------------------------------------------
// Pure

Pure Pure::truth() { return Pure(); }

Pure Pure::eq(Term a, Term b) {
  Pure p;
  p.kind_ = Kind::Eq;
  p.terms_ = {std::move(a), std::move(b)};
  return p;
}

Pure Pure::le(Term a, Term b) {
  Pure p;
  p.kind_ = Kind::Le;
  p.terms_ = {std::move(a), std::move(b)};
  return p;
}

Pure Pure::lt(Term a, Term b) { return negate(le(std::move(b), std::move(a))); }
Pure Pure::ne(Term a, Term b) { return negate(eq(std::move(a), std::move(b))); }

Pure Pure::negate(Pure q) {
  Pure p;
  p.kind_ = Kind::Not;
  p.kids_.push_back(std::move(q));
  return p;
}

Pure Pure::conj(Pure a, Pure b) { return conj(std::vector<Pure>{std::move(a), std::move(b)}); }

Pure Pure::conj(std::vector<Pure> parts) {
  if (parts.empty()) return truth();
  if (parts.size() == 1) return std::move(parts.front());
  Pure p;
  p.kind_ = Kind::And;
  p.kids_ = std::move(parts);
  return p;
}

Pure Pure::disj(Pure a, Pure b) { return negate(conj(negate(std::move(a)), negate(std::move(b)))); }

Pure Pure::field_assign(std::string base, std::string field, Term value) {
  Pure p;
  p.kind_ = Kind::FieldAssign;
  p.terms_ = {Term::field(std::move(base), std::move(field)), std::move(value)};
  return p;
}

bool Pure::has_field_forms() const {
  if (kind_ == Kind::FieldAssign) return true;
  for (const auto& t : terms_) {
    if (t.has_field_access()) return true;
  }
  return std::any_of(kids_.begin(), kids_.end(), [](const Pure& k) { return k.has_field_forms(); });
}

bool Pure::operator==(const Pure& o) const {
  return kind_ == o.kind_ && terms_ == o.terms_ && kids_ == o.kids_;
}

std::strong_ordering Pure::operator<=>(const Pure& o) const {
  if (auto c = kind_ <=> o.kind_; c != 0) return c;
  if (auto c = terms_.size() <=> o.terms_.size(); c != 0) return c;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (auto c = terms_[i] <=> o.terms_[i]; c != 0) return c;
  }
  if (auto c = kids_.size() <=> o.kids_.size(); c != 0) return c;
  for (std::size_t i = 0; i < kids_.size(); ++i) {
    if (auto c = kids_[i] <=> o.kids_[i]; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

std::vector<Pure> conjuncts(const Pure& p) {
  std::vector<Pure> out;
  std::function<void(const Pure&)> walk = [&](const Pure& q) {
    if (q.kind() == Pure::Kind::True) return;
    if (q.kind() == Pure::Kind::And) {
      for (const auto& k : q.kids()) walk(k);
      return;
    }
    out.push_back(q);
  };
  walk(p);
  return out;
}

// ---------------------------------------------------------------------------
// Spatial atoms, heaps, definitions

SpatialAtom SpatialAtom::points_to(std::string head, std::string type, std::vector<Term> args) {
  return SpatialAtom{Kind::PointsTo, std::move(head), std::move(type), std::move(args)};
}

SpatialAtom SpatialAtom::pred(std::string name, std::vector<Term> args) {
  return SpatialAtom{Kind::Pred, "", std::move(name), std::move(args)};
}

bool SymbolicHeap::is_base() const {
  return std::none_of(spatial.begin(), spatial.end(), [](const SpatialAtom& a) { return a.is_pred(); });
}

std::vector<std::size_t> SymbolicHeap::pred_positions() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < spatial.size(); ++i) {
    if (spatial[i].is_pred()) out.push_back(i);
  }
  return out;
}

std::optional<std::size_t> DataDef::field_index(std::string_view f) const {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (fields[i].name == f) return i;
  }
  return std::nullopt;
}

const DataDef* SpecFile::find_data(std::string_view name) const {
  for (const auto& d : data) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

const PredDef* SpecFile::find_pred(std::string_view name) const {
  for (const auto& p : preds) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

const Formula* SpecFile::find_pre(std::string_view proc) const {
  for (const auto& p : pres) {
    if (p.proc == proc) return &p.formula;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// Fresh names

namespace {
std::atomic<unsigned long> g_fresh{0};

std::optional<unsigned long> fresh_suffix(std::string_view name) {
  auto q = name.rfind('\'');
  if (q == std::string_view::npos || q + 1 >= name.size()) return std::nullopt;
  unsigned long n = 0;
  auto digits = name.substr(q + 1);
  auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
  if (ec != std::errc() || p != digits.data() + digits.size()) return std::nullopt;
  return n;
}
}  // namespace

std::string base_name(std::string_view name) {
  if (fresh_suffix(name)) return std::string(name.substr(0, name.rfind('\'')));
  return std::string(name);
}

std::string fresh_var(std::string_view hint) {
  auto n = ++g_fresh;
  std::string base = hint.empty() ? std::string("v") : base_name(hint);
  return base + "'" + std::to_string(n);
}

void reset_fresh_counter() { g_fresh = 0; }

void note_parsed_name(std::string_view name) {
  if (auto n = fresh_suffix(name)) {
    unsigned long cur = g_fresh.load();
    while (cur < *n && !g_fresh.compare_exchange_weak(cur, *n)) {
    }
  }
}

// ---------------------------------------------------------------------------
// Variables

void collect_vars(const Term& t, std::set<std::string>& out) {
  if (t.kind() == Term::Kind::Var || t.kind() == Term::Kind::Field) out.insert(t.name());
  for (const auto& k : t.kids()) collect_vars(k, out);
}

void collect_vars(const Pure& p, std::set<std::string>& out) {
  if (p.kind() == Pure::Kind::Eq || p.kind() == Pure::Kind::Le || p.kind() == Pure::Kind::FieldAssign) {
    collect_vars(p.left(), out);
    collect_vars(p.right(), out);
  }
  for (const auto& k : p.kids()) collect_vars(k, out);
}

void collect_vars(const SpatialAtom& a, std::set<std::string>& out) {
  if (a.is_points_to()) out.insert(a.head);
  for (const auto& t : a.args) collect_vars(t, out);
}

std::set<std::string> all_vars(const SymbolicHeap& d) {
  std::set<std::string> out(d.exists.begin(), d.exists.end());
  for (const auto& a : d.spatial) collect_vars(a, out);
  for (const auto& p : d.pure) collect_vars(p, out);
  return out;
}

std::set<std::string> free_vars(const SymbolicHeap& d) {
  std::set<std::string> out;
  for (const auto& a : d.spatial) collect_vars(a, out);
  for (const auto& p : d.pure) collect_vars(p, out);
  for (const auto& e : d.exists) out.erase(e);
  return out;
}

std::set<std::string> free_vars(const Formula& f) {
  std::set<std::string> out;
  for (const auto& d : f.disjuncts) {
    auto v = free_vars(d);
    out.insert(v.begin(), v.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Substitution

namespace {

std::string subst_var_position(const std::string& v, const Binding& b, const char* where) {
  auto it = b.find(v);
  if (it == b.end()) return v;
  if (!it->second.is_var()) {
    throw StructuralError(std::string("cannot substitute '") + to_string(it->second) + "' for '" + v +
                          "' in " + where + " position");
  }
  return it->second.name();
}

}  // namespace

Term substitute(const Term& t, const Binding& b) {
  switch (t.kind()) {
    case Term::Kind::Null:
    case Term::Kind::Int:
    case Term::Kind::Bool:
      return t;
    case Term::Kind::Var: {
      auto it = b.find(t.name());
      return it == b.end() ? t : it->second;
    }
    case Term::Kind::Scale:
      return Term::scale(t.value(), substitute(t.operand(), b));
    case Term::Kind::Add:
      return Term::add(substitute(t.lhs(), b), substitute(t.rhs(), b));
    case Term::Kind::Neg:
      return Term::neg(substitute(t.operand(), b));
    case Term::Kind::Mul:
      return Term::mul(substitute(t.lhs(), b), substitute(t.rhs(), b));
    case Term::Kind::Field:
      return Term::field(subst_var_position(t.name(), b, "field-access base"), t.field_name());
  }
  return t;
}

Pure substitute(const Pure& p, const Binding& b) {
  switch (p.kind()) {
    case Pure::Kind::True:
      return p;
    case Pure::Kind::Eq:
      return Pure::eq(substitute(p.left(), b), substitute(p.right(), b));
    case Pure::Kind::Le:
      return Pure::le(substitute(p.left(), b), substitute(p.right(), b));
    case Pure::Kind::Not:
      return Pure::negate(substitute(p.operand(), b));
    case Pure::Kind::And: {
      std::vector<Pure> ks;
      for (const auto& k : p.kids()) ks.push_back(substitute(k, b));
      return Pure::conj(std::move(ks));
    }
    case Pure::Kind::FieldAssign: {
      Term lhs = substitute(p.left(), b);
      return Pure::field_assign(lhs.name(), lhs.field_name(), substitute(p.right(), b));
    }
  }
  return p;
}

SpatialAtom substitute(const SpatialAtom& a, const Binding& b) {
  SpatialAtom out = a;
  if (a.is_points_to()) out.head = subst_var_position(a.head, b, "points-to head");
  for (auto& t : out.args) t = substitute(t, b);
  return out;
}

SymbolicHeap substitute(const SymbolicHeap& d, const Binding& b) {
  Binding eff = b;
  for (const auto& e : d.exists) eff.erase(e);
  std::set<std::string> range_vars;
  for (const auto& [k, t] : eff) collect_vars(t, range_vars);

  SymbolicHeap src = d;
  Binding rename;
  for (auto& e : src.exists) {
    if (range_vars.count(e)) {
      std::string f = fresh_var(e);
      rename.emplace(e, Term::var(f));
      e = f;
    }
  }
  for (const auto& [k, t] : rename) eff.emplace(k, t);

  SymbolicHeap out;
  out.exists = src.exists;
  for (const auto& a : d.spatial) out.spatial.push_back(substitute(a, eff));
  for (const auto& p : d.pure) out.pure.push_back(substitute(p, eff));
  return out;
}

SymbolicHeap freshen(const SymbolicHeap& d) {
  if (d.exists.empty()) return d;
  Binding ren;
  std::vector<std::string> names;
  for (const auto& e : d.exists) {
    auto f = fresh_var(e);
    ren.emplace(e, Term::var(f));
    names.push_back(f);
  }
  SymbolicHeap body = d;
  body.exists.clear();
  SymbolicHeap out = substitute(body, ren);
  out.exists = std::move(names);
  return out;
}

// ---------------------------------------------------------------------------
// Normalization

RawFormula RawFormula::leaf(SymbolicHeap h) {
  RawFormula r;
  r.kind = Kind::Heap;
  r.heap = std::move(h);
  return r;
}

RawFormula RawFormula::star(std::vector<RawFormula> kids) {
  RawFormula r;
  r.kind = Kind::Star;
  r.kids = std::move(kids);
  return r;
}

RawFormula RawFormula::disj(std::vector<RawFormula> kids) {
  RawFormula r;
  r.kind = Kind::Or;
  r.kids = std::move(kids);
  return r;
}

RawFormula RawFormula::of(const Formula& f) {
  std::vector<RawFormula> ks;
  for (const auto& d : f.disjuncts) ks.push_back(leaf(d));
  return ks.size() == 1 ? ks.front() : disj(std::move(ks));
}

SymbolicHeap star(const SymbolicHeap& a, const SymbolicHeap& b) {
  SymbolicHeap left = a;
  SymbolicHeap right = b;

  // Left binders must not capture free variables of the right operand.
  auto right_free = free_vars(right);
  Binding lren;
  for (auto& e : left.exists) {
    if (right_free.count(e)) {
      auto f = fresh_var(e);
      lren.emplace(e, Term::var(f));
      e = f;
    }
  }
  if (!lren.empty()) {
    auto binders = left.exists;
    left.exists.clear();
    left = substitute(left, lren);
    left.exists = binders;
  }

  // Right binders clashing with anything on the left are renamed (v̄').
  auto left_all = all_vars(left);
  Binding rren;
  for (auto& e : right.exists) {
    if (left_all.count(e)) {
      auto f = fresh_var(e);
      rren.emplace(e, Term::var(f));
      e = f;
    }
  }
  if (!rren.empty()) {
    auto binders = right.exists;
    right.exists.clear();
    right = substitute(right, rren);
    right.exists = binders;
  }

  SymbolicHeap out;
  out.exists = left.exists;
  out.exists.insert(out.exists.end(), right.exists.begin(), right.exists.end());
  out.spatial = left.spatial;
  out.spatial.insert(out.spatial.end(), right.spatial.begin(), right.spatial.end());
  out.pure = left.pure;
  out.pure.insert(out.pure.end(), right.pure.begin(), right.pure.end());
  return out;
}

std::vector<SymbolicHeap> normalize(const RawFormula& f) {
  switch (f.kind) {
    case RawFormula::Kind::Heap:
      return {f.heap};
    case RawFormula::Kind::Or: {
      std::vector<SymbolicHeap> out;
      for (const auto& k : f.kids) {
        auto part = normalize(k);
        out.insert(out.end(), part.begin(), part.end());
      }
      return out;
    }
    case RawFormula::Kind::Star: {
      std::vector<SymbolicHeap> acc{SymbolicHeap{}};
      for (const auto& k : f.kids) {
        auto parts = normalize(k);
        std::vector<SymbolicHeap> next;
        for (const auto& a : acc) {
          for (const auto& p : parts) next.push_back(star(a, p));
        }
        acc = std::move(next);
      }
      return acc;
    }
  }
  return {};
}

bool conforms(const SymbolicHeap& d, bool allow_field_forms) {
  std::set<std::string> seen;
  for (const auto& e : d.exists) {
    if (!seen.insert(e).second) return false;
  }
  std::set<std::string> used;
  for (const auto& a : d.spatial) collect_vars(a, used);
  for (const auto& p : d.pure) collect_vars(p, used);
  for (const auto& e : d.exists) {
    if (!used.count(e)) return false;
  }
  if (!allow_field_forms) {
    for (const auto& p : d.pure) {
      if (p.has_field_forms()) return false;
    }
    for (const auto& a : d.spatial) {
      for (const auto& t : a.args) {
        if (t.has_field_access()) return false;
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Canonical forms

namespace {

SymbolicHeap rename_bound(const SymbolicHeap& d, const std::vector<std::string>& to) {
  Binding ren;
  for (std::size_t i = 0; i < d.exists.size(); ++i) ren.emplace(d.exists[i], Term::var(to[i]));
  SymbolicHeap body = d;
  body.exists.clear();
  // Plain structural rename; targets are fresh placeholders that never occur in d.
  SymbolicHeap out;
  for (const auto& a : body.spatial) out.spatial.push_back(substitute(a, ren));
  for (const auto& p : body.pure) out.pure.push_back(substitute(p, ren));
  out.exists = to;
  return out;
}

std::vector<std::string> sorted_strings(const SymbolicHeap& d, bool spatial) {
  std::vector<std::string> out;
  if (spatial) {
    for (const auto& a : d.spatial) out.push_back(to_string(a));
  } else {
    for (const auto& p : d.pure) out.push_back(to_string(p));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string masked(const SymbolicHeap& d, const SpatialAtom* a, const Pure* p) {
  Binding mask;
  for (const auto& e : d.exists) mask.emplace(e, Term::var("?"));
  if (a) return to_string(substitute(*a, mask));
  return to_string(substitute(*p, mask));
}

}  // namespace

std::string canonical_key(const SymbolicHeap& d) {
  std::vector<std::pair<std::string, std::size_t>> sp;
  for (std::size_t i = 0; i < d.spatial.size(); ++i) sp.emplace_back(masked(d, &d.spatial[i], nullptr), i);
  std::stable_sort(sp.begin(), sp.end(), [](auto& x, auto& y) { return x.first < y.first; });
  std::vector<std::pair<std::string, std::size_t>> pu;
  for (std::size_t i = 0; i < d.pure.size(); ++i) pu.emplace_back(masked(d, nullptr, &d.pure[i]), i);
  std::stable_sort(pu.begin(), pu.end(), [](auto& x, auto& y) { return x.first < y.first; });

  std::set<std::string> bound(d.exists.begin(), d.exists.end());
  std::vector<std::string> order;
  std::set<std::string> placed;
  auto visit = [&](const std::vector<std::string>& seq) {
    for (const auto& v : seq) {
      if (bound.count(v) && placed.insert(v).second) order.push_back(v);
    }
  };
  auto ordered_vars = [](const Term& t, std::vector<std::string>& out, auto&& self) -> void {
    if (t.kind() == Term::Kind::Var || t.kind() == Term::Kind::Field) out.push_back(t.name());
    for (const auto& k : t.kids()) self(k, out, self);
  };
  auto pure_vars = [&](const Pure& p, std::vector<std::string>& out, auto&& self) -> void {
    if (p.kind() == Pure::Kind::Eq || p.kind() == Pure::Kind::Le || p.kind() == Pure::Kind::FieldAssign) {
      ordered_vars(p.left(), out, ordered_vars);
      ordered_vars(p.right(), out, ordered_vars);
    }
    for (const auto& k : p.kids()) self(k, out, self);
  };
  for (const auto& [m, i] : sp) {
    std::vector<std::string> seq;
    const auto& a = d.spatial[i];
    if (a.is_points_to()) seq.push_back(a.head);
    for (const auto& t : a.args) ordered_vars(t, seq, ordered_vars);
    visit(seq);
  }
  for (const auto& [m, i] : pu) {
    std::vector<std::string> seq;
    pure_vars(d.pure[i], seq, pure_vars);
    visit(seq);
  }
  for (const auto& e : d.exists) {
    if (placed.insert(e).second) order.push_back(e);
  }

  SymbolicHeap ordered = d;
  ordered.exists = order;
  std::vector<std::string> targets;
  for (std::size_t i = 0; i < order.size(); ++i) targets.push_back("?" + std::to_string(i));
  auto canon = rename_bound(ordered, targets);

  std::string key = "E" + std::to_string(order.size()) + "|";
  for (const auto& s : sorted_strings(canon, true)) key += s + " * ";
  key += "|";
  for (const auto& s : sorted_strings(canon, false)) key += s + " & ";
  return key;
}

bool alpha_equivalent(const SymbolicHeap& a, const SymbolicHeap& b) {
  if (a.exists.size() != b.exists.size() || a.spatial.size() != b.spatial.size() ||
      a.pure.size() != b.pure.size()) {
    return false;
  }
  if (free_vars(a) != free_vars(b)) return false;
  if (canonical_key(a) == canonical_key(b)) return true;

  // Necessary condition: same multiset of atoms with binders masked.
  auto masks = [](const SymbolicHeap& d) {
    std::vector<std::string> out;
    for (const auto& x : d.spatial) out.push_back(masked(d, &x, nullptr));
    for (const auto& x : d.pure) out.push_back(masked(d, nullptr, &x));
    std::sort(out.begin(), out.end());
    return out;
  };
  if (masks(a) != masks(b)) return false;

  const auto target_spatial = sorted_strings(b, true);
  const auto target_pure = sorted_strings(b, false);
  std::vector<std::string> assign(a.exists.size());
  std::vector<bool> used(b.exists.size(), false);
  std::function<bool(std::size_t)> search = [&](std::size_t i) -> bool {
    if (i == a.exists.size()) {
      auto r = rename_bound(a, assign);
      return sorted_strings(r, true) == target_spatial && sorted_strings(r, false) == target_pure;
    }
    for (std::size_t j = 0; j < b.exists.size(); ++j) {
      if (used[j]) continue;
      used[j] = true;
      assign[i] = b.exists[j];
      if (search(i + 1)) return true;
      used[j] = false;
    }
    return false;
  };
  return search(0);
}

std::vector<SymbolicHeap> dedup(std::vector<SymbolicHeap> heaps) {
  std::vector<SymbolicHeap> out;
  std::set<std::string> seen;
  for (auto& h : heaps) {
    if (seen.insert(canonical_key(h)).second) out.push_back(std::move(h));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

int precedence(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Add:
      return 1;
    case Term::Kind::Scale:
    case Term::Kind::Mul:
      return 2;
    case Term::Kind::Neg:
      return 3;
    default:
      return 4;
  }
}

void print_term(const Term& t, int ctx, std::ostream& os) {
  bool paren = precedence(t) < ctx;
  if (paren) os << "(";
  switch (t.kind()) {
    case Term::Kind::Null:
      os << "null";
      break;
    case Term::Kind::Int:
      os << t.value();
      break;
    case Term::Kind::Bool:
      os << (t.value() ? "true" : "false");
      break;
    case Term::Kind::Var:
      os << t.name();
      break;
    case Term::Kind::Field:
      os << t.name() << "." << t.field_name();
      break;
    case Term::Kind::Scale:
      os << t.value() << " * ";
      print_term(t.operand(), 3, os);
      break;
    case Term::Kind::Mul:
      print_term(t.lhs(), 2, os);
      os << " * ";
      print_term(t.rhs(), 3, os);
      break;
    case Term::Kind::Add:
      print_term(t.lhs(), 1, os);
      if (t.rhs().kind() == Term::Kind::Neg) {
        os << " - ";
        print_term(t.rhs().operand(), 2, os);
      } else {
        os << " + ";
        print_term(t.rhs(), 2, os);
      }
      break;
    case Term::Kind::Neg:
      if (t.operand().kind() == Term::Kind::Int && t.operand().value() >= 0) {
        os << "-(" << t.operand().value() << ")";
      } else {
        os << "-";
        print_term(t.operand(), 3, os);
      }
      break;
  }
  if (paren) os << ")";
}

void print_pure(const Pure& p, bool nested, std::ostream& os) {
  switch (p.kind()) {
    case Pure::Kind::True:
      os << "true";
      break;
    case Pure::Kind::Eq:
      os << to_string(p.left()) << " = " << to_string(p.right());
      break;
    case Pure::Kind::Le:
      os << to_string(p.left()) << " <= " << to_string(p.right());
      break;
    case Pure::Kind::FieldAssign:
      os << to_string(p.left()) << " := " << to_string(p.right());
      break;
    case Pure::Kind::Not: {
      const Pure& q = p.operand();
      if (q.kind() == Pure::Kind::Le) {
        os << to_string(q.right()) << " < " << to_string(q.left());
      } else if (q.kind() == Pure::Kind::Eq) {
        os << to_string(q.left()) << " != " << to_string(q.right());
      } else if (q.kind() == Pure::Kind::True) {
        os << "false";
      } else {
        os << "!(";
        print_pure(q, false, os);
        os << ")";
      }
      break;
    }
    case Pure::Kind::And: {
      if (nested) os << "(";
      for (std::size_t i = 0; i < p.kids().size(); ++i) {
        if (i) os << " & ";
        print_pure(p.kids()[i], true, os);
      }
      if (nested) os << ")";
      break;
    }
  }
}

}  // namespace

std::string to_string(const Term& t) {
  std::ostringstream os;
  print_term(t, 0, os);
  return os.str();
}

std::string to_string(const Pure& p) {
  std::ostringstream os;
  print_pure(p, false, os);
  return os.str();
}

std::string to_string(const SpatialAtom& a) {
  std::ostringstream os;
  if (a.is_points_to()) os << a.head << " -> ";
  os << a.name << "(";
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i) os << ", ";
    os << to_string(a.args[i]);
  }
  os << ")";
  return os.str();
}

std::string to_string(const SymbolicHeap& d) {
  std::ostringstream os;
  if (!d.exists.empty()) {
    os << "exists ";
    for (std::size_t i = 0; i < d.exists.size(); ++i) os << (i ? ", " : "") << d.exists[i];
    os << " . ";
  }
  if (d.spatial.empty()) {
    os << "emp";
  } else {
    for (std::size_t i = 0; i < d.spatial.size(); ++i) os << (i ? " * " : "") << to_string(d.spatial[i]);
  }
  for (const auto& p : d.pure) {
    os << " & ";
    print_pure(p, true, os);
  }
  return os.str();
}

std::string to_string(const Formula& f) {
  std::string out;
  for (std::size_t i = 0; i < f.disjuncts.size(); ++i) {
    if (i) out += "\n    \\/ ";
    out += to_string(f.disjuncts[i]);
  }
  return out;
}

std::string to_string(const SpecFile& s) {
  std::ostringstream os;
  for (const auto& d : s.data) {
    os << "data " << d.name << " {";
    for (const auto& f : d.fields) os << " " << f.type << " " << f.name << ";";
    os << " }\n";
  }
  for (const auto& p : s.preds) {
    os << "pred " << p.name << "(";
    for (std::size_t i = 0; i < p.params.size(); ++i) os << (i ? ", " : "") << p.params[i];
    os << ") == " << to_string(p.body) << " ;\n";
  }
  for (const auto& p : s.pres) os << "pre " << p.proc << " == " << to_string(p.formula) << " ;\n";
  return os.str();
}

}  // namespace slc
