#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "slc/solver.hpp"

using namespace slc;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SpecFile bst_spec() { return parse_spec(read_file(std::string(SLC_CORPUS_DIR) + "/bst/bst.sl")); }

std::vector<Pure> pures(const std::string& text) { return parse_heap("emp & " + text).pure; }

SortMap ints(std::initializer_list<const char*> names) {
  SortMap m;
  for (const char* n : names) m[n] = Sort::integer();
  return m;
}

bool holds(const std::vector<Pure>& ps, const PureResult& r) {
  return std::all_of(ps.begin(), ps.end(), [&](const Pure& p) { return eval_pure(p, r.values); });
}

}  // namespace

TEST(PureSolve, OrderedWitness) {
  auto ps = pures("minE < elt & maxE > elt");
  auto r = pure_solve(ps, ints({"minE", "elt", "maxE"}), {}, {"elt"});
  ASSERT_EQ(r.status, Decision::Sat);
  EXPECT_TRUE(holds(ps, r));
  EXPECT_EQ(r.values.at("elt").value, 0);
  EXPECT_EQ(r.values.at("minE").value, -1);
  EXPECT_EQ(r.values.at("maxE").value, 1);
}

TEST(PureSolve, Constant) {
  auto r = pure_solve(pures("v = 5"), ints({"v"}), {});
  ASSERT_EQ(r.status, Decision::Sat);
  EXPECT_EQ(r.values.at("v").value, 5);
}

TEST(PureSolve, SmallestAbsoluteNegativeFirst) {
  auto r = pure_solve(pures("v != 0"), ints({"v"}), {});
  ASSERT_EQ(r.status, Decision::Sat);
  EXPECT_EQ(r.values.at("v").value, -1);
}

TEST(PureSolve, LocationContradiction) {
  SortMap s{{"x", Sort::ref("C")}, {"y", Sort::ref("C")}};
  auto ps = pures("x = y & x != y");
  EXPECT_EQ(pure_solve(ps, s, {}).status, Decision::Unsat);
  EXPECT_TRUE(proven_unsat(ps, s, {}));
}

TEST(PureSolve, LocationClasses) {
  SortMap s{{"x", Sort::ref("C")}, {"y", Sort::ref("C")}, {"z", Sort::ref("C")}, {"u", Sort::ref("C")}};
  auto ps = pures("x = y & x != null & z != x");
  auto r = pure_solve(ps, s, {});
  ASSERT_EQ(r.status, Decision::Sat);
  EXPECT_TRUE(holds(ps, r));
  EXPECT_EQ(r.values.at("x").kind, PureValue::Kind::Loc);
  EXPECT_EQ(r.values.at("y"), r.values.at("x"));
  EXPECT_EQ(r.values.at("z").kind, PureValue::Kind::Null);
}

TEST(PureSolve, BoundedVersusProven) {
  auto big = pures("v > 100");
  auto r = pure_solve(big, ints({"v"}), {});
  EXPECT_EQ(r.status, Decision::Unsat);
  EXPECT_TRUE(r.bounded);
  EXPECT_FALSE(proven_unsat(big, ints({"v"}), {}));
  SolverConfig wide;
  wide.int_hi = 1000;
  EXPECT_EQ(pure_solve(big, ints({"v"}), wide).status, Decision::Sat);

  auto cyc = pures("a < b & b < c & c < a");
  auto r2 = pure_solve(cyc, ints({"a", "b", "c"}), {});
  EXPECT_EQ(r2.status, Decision::Unsat);
  EXPECT_FALSE(r2.bounded);
  EXPECT_TRUE(proven_unsat(cyc, ints({"a", "b", "c"}), {}));
}

TEST(PureSolve, IntegerTightening) {
  auto ps = pures("2 * v = 1");
  EXPECT_TRUE(proven_unsat(ps, ints({"v"}), {}));
  auto ne = pures("v >= 3 & v <= 3 & v != 3");
  EXPECT_TRUE(proven_unsat(ne, ints({"v"}), {}));
}

TEST(PureSolve, Disjunction) {
  auto ps = pures("!(v = 0 & w = 0) & v = 0");
  auto r = pure_solve(ps, ints({"v", "w"}), {});
  ASSERT_EQ(r.status, Decision::Sat);
  EXPECT_TRUE(holds(ps, r));
  EXPECT_NE(r.values.at("w").value, 0);
}

TEST(PureSolve, Nonlinear) {
  std::vector<Pure> ps{Pure::eq(Term::mul(Term::var("v"), Term::var("v")), Term::constant(49)),
                       Pure::lt(Term::constant(0), Term::var("v"))};
  auto r = pure_solve(ps, ints({"v"}), {});
  ASSERT_EQ(r.status, Decision::Sat);
  EXPECT_EQ(r.values.at("v").value, 7);
}

TEST(PureSolve, NodeBudgetGivesUnknown) {
  SolverConfig cfg;
  cfg.max_pure_nodes = 5;
  std::vector<Pure> ps{Pure::eq(Term::mul(Term::var("a"), Term::var("b")), Term::constant(61 * 59))};
  EXPECT_EQ(pure_solve(ps, ints({"a", "b"}), cfg).status, Decision::Unknown);
}

TEST(PureSolve, RandomWitnessesEvaluate) {
  std::mt19937 rng(5);
  const char* vars[] = {"a", "b", "c"};
  const char* ops[] = {"<", "<=", "=", "!=", ">", ">="};
  for (int i = 0; i < 300; ++i) {
    std::string text;
    int n = 1 + static_cast<int>(rng() % 4);
    for (int k = 0; k < n; ++k) {
      if (k) text += " & ";
      text += std::string(vars[rng() % 3]) + " + " + std::to_string(static_cast<int>(rng() % 7) - 3) + " " +
              ops[rng() % 6] + " " + vars[rng() % 3];
    }
    auto ps = pures(text);
    auto r = pure_solve(ps, ints({"a", "b", "c"}), {});
    if (r.status == Decision::Sat) {
      EXPECT_TRUE(holds(ps, r)) << text;
    } else {
      // Brute force over a smaller box agrees: nothing satisfies it there.
      for (int a = -8; a <= 8; ++a)
        for (int b = -8; b <= 8; ++b)
          for (int c = -8; c <= 8; ++c) {
            std::map<std::string, PureValue> v;
            v["a"] = {PureValue::Kind::Int, a, ""};
            v["b"] = {PureValue::Kind::Int, b, ""};
            v["c"] = {PureValue::Kind::Int, c, ""};
            bool all = std::all_of(ps.begin(), ps.end(), [&](const Pure& p) { return eval_pure(p, v); });
            ASSERT_FALSE(all) << text;
          }
    }
  }
}

TEST(Saturate, Cases) {
  auto s = saturate(parse_heap("x -> C(a) * y -> C(b)"));
  EXPECT_FALSE(s.contradiction);
  EXPECT_EQ(s.additions.size(), 3u);
  EXPECT_TRUE(saturate(parse_heap("x -> C(a) & x = null")).contradiction);
  EXPECT_TRUE(saturate(parse_heap("x -> C(a) * y -> C(b) & x = y")).contradiction);
  EXPECT_TRUE(saturate(parse_heap("x -> C(a) * y -> C(b) & x = z & z = y")).contradiction);
}

TEST(EntailsEq, Cases) {
  auto d = parse_heap("bst(this_root, minE, maxE) & t = this_root & x = null");
  EXPECT_TRUE(entails_eq(d, "t", Term::var("this_root")));
  EXPECT_TRUE(entails_eq(d, "x", Term::null()));
  EXPECT_FALSE(entails_eq(d, "t", Term::null()));
  EXPECT_FALSE(entails_eq(d, "t", Term::var("minE")));
}

TEST(Sat, Trivial) {
  SpecFile none;
  auto r = sat(parse_heap("emp"), none);
  EXPECT_EQ(r.decision, Decision::Sat);
  ASSERT_TRUE(r.model);
  EXPECT_TRUE(r.model->cells.empty());
  EXPECT_EQ(sat(parse_heap("emp & x = null & !(x = null)"), none).decision, Decision::Unsat);
}

TEST(Sat, ItemTwoOneNode) {
  auto spec = bst_spec();
  auto d = parse_heap(
      "exists elt, l, r . this_root -> BinaryNode(elt, l, r) * bst(l, minE, elt) * bst(r, elt, maxE)"
      " & minE < elt & maxE > elt");
  auto r = sat(d, spec);
  ASSERT_EQ(r.decision, Decision::Sat);
  const auto& m = *r.model;
  ASSERT_EQ(m.cells.size(), 1u);
  EXPECT_EQ(m.cells[0].head, "this_root");
  const auto& args = m.cells[0].args;
  EXPECT_EQ(m.values.at(args[1].name()), Term::null());
  EXPECT_EQ(m.values.at(args[2].name()), Term::null());
  EXPECT_EQ(m.values.at(args[0].name()), Term::constant(0));
  EXPECT_EQ(m.values.at("minE"), Term::constant(-1));
  EXPECT_EQ(m.values.at("maxE"), Term::constant(1));
}

TEST(Sat, PreconditionSmallestFirst) {
  auto spec = bst_spec();
  auto r = sat(spec.find_pre("remove")->disjuncts[0], spec);
  ASSERT_EQ(r.decision, Decision::Sat);
  EXPECT_TRUE(r.model->cells.empty());
  EXPECT_EQ(r.model->values.at("this_root"), Term::null());
}

TEST(Sat, UnsatWithinDepth) {
  auto spec = parse_spec(
      "data N { int v; N next; }\n"
      "pred ls(x) == emp & x = null \\/ exists a, n . x -> N(a, n) * ls(n) & a > 0 ;\n");
  EXPECT_EQ(sat(parse_heap("ls(x) & x != null & x = null"), spec).decision, Decision::Unsat);
  auto empty = parse_spec(
      "data N { int v; N next; }\n"
      "pred no(x) == emp & x = null \\/ exists a, n . x -> N(a, n) * no(n) & a > 0 & a < 0 ;\n");
  EXPECT_EQ(sat(parse_heap("no(x) & x != null"), empty).decision, Decision::Unsat);
  auto lasso = parse_spec(
      "data N { int v; N next; }\n"
      "pred inf(x) == emp & x = null & x != null \\/ exists a, n . x -> N(a, n) * inf(n) ;\n");
  EXPECT_EQ(sat(parse_heap("inf(x)"), lasso).decision, Decision::Unknown);
}

TEST(Sat, SeparationDistinctHeads) {
  auto spec = parse_spec("data N { int v; N next; }\n");
  auto r = sat(parse_heap("x -> N(a, y) * y -> N(b, null) & a < b"), spec);
  ASSERT_EQ(r.decision, Decision::Sat);
  EXPECT_EQ(r.model->values.at("a"), Term::constant(0));
  EXPECT_EQ(r.model->values.at("b"), Term::constant(1));
  EXPECT_EQ(sat(parse_heap("x -> N(a, y) * y -> N(b, null) & x = y"), spec).decision, Decision::Unsat);
}

TEST(Sat, DanglingRepresentative) {
  auto spec = parse_spec("data N { int v; N next; }\n");
  auto r = sat(parse_heap("x -> N(a, y) & y != null & z = y"), spec);
  ASSERT_EQ(r.decision, Decision::Sat);
  EXPECT_EQ(r.model->dangling.size(), 1u);
}

TEST(Sat, Deterministic) {
  auto spec = bst_spec();
  auto d = parse_heap("bst(t, lo, hi) & t != null & lo > 3");
  reset_fresh_counter();
  auto a = sat(d, spec);
  reset_fresh_counter();
  auto b = sat(d, spec);
  ASSERT_EQ(a.decision, Decision::Sat);
  EXPECT_EQ(a.model, b.model);
}
