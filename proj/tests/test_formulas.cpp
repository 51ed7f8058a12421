#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "slc/formulas.hpp"
#include "slc/sorts.hpp"

using namespace slc;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SpecFile bst_spec() { return parse_spec(read_file(std::string(SLC_CORPUS_DIR) + "/bst/bst.sl")); }

// Random generators for round-trip and homomorphism properties.
struct Gen {
  std::mt19937 rng{12345};
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

  Term term(int depth) {
    static const char* vars[] = {"a", "b", "c", "x'3"};
    int k = depth <= 0 ? pick(3) : pick(7);
    switch (k) {
      case 0:
        return Term::var(vars[pick(4)]);
      case 1:
        return Term::constant(pick(11) - 5);
      case 2:
        return Term::constant(pick(2) ? 2147483647 : -2147483647 - 1);
      case 3:
        return Term::add(term(depth - 1), term(depth - 1));
      case 4:
        return Term::neg(term(depth - 1));
      case 5:
        return Term::scale(pick(7) - 3, term(depth - 1));
      default:
        return Term::sub(term(depth - 1), term(depth - 1));
    }
  }

  Pure pure(int depth) {
    int k = depth <= 0 ? pick(4) : pick(6);
    switch (k) {
      case 0:
        return Pure::eq(term(2), term(2));
      case 1:
        return Pure::le(term(2), term(2));
      case 2:
        return Pure::lt(term(1), term(1));
      case 3:
        return Pure::ne(Term::var("a"), Term::null());
      case 4:
        return Pure::negate(pure(depth - 1));
      default:
        return Pure::conj(pure(depth - 1), pure(depth - 1));
    }
  }
};

}  // namespace

TEST(Parse, BstDefinitionShape) {
  auto s = bst_spec();
  ASSERT_EQ(s.preds.size(), 1u);
  const PredDef& bst = s.preds[0];
  EXPECT_EQ(bst.params, (std::vector<std::string>{"root", "minE", "maxE"}));
  ASSERT_EQ(bst.body.disjuncts.size(), 2u);
  EXPECT_TRUE(bst.is_base_disjunct(0));
  EXPECT_FALSE(bst.is_base_disjunct(1));
  const auto& ind = bst.body.disjuncts[1];
  EXPECT_EQ(ind.exists, (std::vector<std::string>{"elt", "l", "r"}));
  ASSERT_EQ(ind.spatial.size(), 3u);
  EXPECT_EQ(ind.pred_positions(), (std::vector<std::size_t>{1, 2}));
  // minE < elt desugars to !(elt <= minE); maxE > elt to !(maxE <= elt).
  ASSERT_EQ(ind.pure.size(), 2u);
  EXPECT_EQ(ind.pure[0], Pure::negate(Pure::le(Term::var("elt"), Term::var("minE"))));
  EXPECT_EQ(ind.pure[1], Pure::negate(Pure::le(Term::var("maxE"), Term::var("elt"))));
  ASSERT_NE(s.find_pre("remove"), nullptr);
}

TEST(Parse, MinimalPredicate) {
  auto s = parse_spec("pred p(x) == emp & x = null ;");
  ASSERT_EQ(s.preds.size(), 1u);
  ASSERT_EQ(s.preds[0].body.disjuncts.size(), 1u);
  EXPECT_TRUE(s.preds[0].is_base_disjunct(0));
}

TEST(Parse, Errors) {
  EXPECT_THROW(parse_spec("pred p(x) == q(x) ;"), ValidationError);
  EXPECT_THROW(parse_spec("pred p(x) == p(x) ;"), ValidationError);  // no base disjunct
  EXPECT_THROW(parse_spec("pred p(x) == emp & y = null ;"), ValidationError);
  EXPECT_THROW(parse_spec("data N { int v; } pred p(x) == x -> N(1, 2) ;"), ValidationError);
  EXPECT_THROW(parse_spec("data N { int v; } data N { int w; }"), ValidationError);
  EXPECT_THROW(parse_spec("data N { int v; int v; }"), ValidationError);
  EXPECT_THROW(parse_spec("data N { Foo v; }"), ValidationError);
  EXPECT_THROW(parse_spec("pred p(x) == exists a . emp & x = null ;"), ValidationError);
  EXPECT_THROW(parse_spec("data N { int v; } pred p(x) == emp & x = null ; pre f == p(y, z) ;"),
               ValidationError);
  EXPECT_THROW(parse_spec("data N { int v; } pred p(x) == x -> N(x) ;"), ValidationError);  // sort clash
  EXPECT_THROW(parse_spec("pred p(x) == emp & x * x = 1 ;"), ParseError);
  EXPECT_THROW(parse_spec("pred p(x) == emp & x = 99999999999 ;"), ParseError);
  try {
    parse_spec("pred p(x) ==\n  emp & x = ;");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(e.column(), 13);
  }
}

TEST(Parse, SurfaceComparisonsDesugar) {
  auto d = parse_heap("emp & a < b & a > b & a >= b & a != b & a <= b & a == b");
  ASSERT_EQ(d.pure.size(), 6u);
  auto a = Term::var("a");
  auto b = Term::var("b");
  EXPECT_EQ(d.pure[0], Pure::negate(Pure::le(b, a)));
  EXPECT_EQ(d.pure[1], Pure::negate(Pure::le(a, b)));
  EXPECT_EQ(d.pure[2], Pure::le(b, a));
  EXPECT_EQ(d.pure[3], Pure::negate(Pure::eq(a, b)));
  EXPECT_EQ(d.pure[4], Pure::le(a, b));
  EXPECT_EQ(d.pure[5], Pure::eq(a, b));
}

TEST(Parse, FieldFormsOnlyWhenAllowed) {
  EXPECT_THROW(parse_heap("emp & x < t.element"), ParseError);
  auto d = parse_heap("emp & x < t.element & t.left := y", true);
  ASSERT_EQ(d.pure.size(), 2u);
  EXPECT_TRUE(d.pure[0].has_field_forms());
  EXPECT_EQ(d.pure[1].kind(), Pure::Kind::FieldAssign);
  EXPECT_FALSE(conforms(d));
  EXPECT_TRUE(conforms(d, true));
}

TEST(RoundTrip, SpecFile) {
  auto s = bst_spec();
  auto printed = to_string(s);
  EXPECT_EQ(parse_spec(printed), s);
  EXPECT_EQ(to_string(parse_spec(printed)), printed);
}

TEST(RoundTrip, RandomPureFormulas) {
  Gen g;
  for (int i = 0; i < 2000; ++i) {
    SymbolicHeap d;
    d.pure = conjuncts(g.pure(3));
    auto text = to_string(d);
    auto back = parse_heap(text);
    ASSERT_EQ(back, d) << text;
  }
}

TEST(FreeVars, Examples) {
  auto d = parse_heap("exists elt . root -> BinaryNode(elt, l, r)");
  EXPECT_EQ(free_vars(d), (std::set<std::string>{"root", "l", "r"}));
  EXPECT_TRUE(free_vars(parse_heap("emp & true")).empty());
  auto a = fresh_var("v");
  auto b = fresh_var("v");
  EXPECT_NE(a, b);
}

TEST(FreshVar, AvoidsParsedNames) {
  reset_fresh_counter();
  auto d = parse_heap("emp & v'40 = 1");
  (void)d;
  auto f = fresh_var("v");
  EXPECT_EQ(f, "v'41");
  EXPECT_EQ(base_name("elt'7"), "elt");
  EXPECT_EQ(base_name("elt"), "elt");
}

TEST(Substitute, Rename) {
  auto d = parse_heap("bst(l, minE, elt)");
  auto out = substitute(d, {{"l", Term::var("r")}});
  EXPECT_EQ(out, parse_heap("bst(r, minE, elt)"));
  EXPECT_EQ(substitute(d, {}), d);
}

TEST(Substitute, BodyIntoPrecondition) {
  auto s = bst_spec();
  auto body = s.preds[0].body.disjuncts[1];
  auto out = substitute(body, {{"root", Term::var("this_root")}});
  auto expected = parse_heap(
      "exists elt, l, r . this_root -> BinaryNode(elt, l, r) * bst(l, minE, elt) * bst(r, elt, maxE)"
      " & minE < elt & maxE > elt");
  EXPECT_EQ(out, expected);
}

TEST(Substitute, CaptureAvoidance) {
  auto d = parse_heap("exists e . x -> N(e) & y = 1");
  auto out = substitute(d, {{"y", Term::var("e")}});
  ASSERT_EQ(out.exists.size(), 1u);
  EXPECT_NE(out.exists[0], "e");
  EXPECT_EQ(out.pure[0], Pure::eq(Term::var("e"), Term::constant(1)));
  EXPECT_TRUE(alpha_equivalent(out, parse_heap("exists q . x -> N(q) & e = 1")));
}

TEST(Substitute, NonVariableHeadIsStructuralError) {
  auto d = parse_heap("x -> N(a)");
  EXPECT_THROW(substitute(d, {{"x", Term::constant(3)}}), StructuralError);
  EXPECT_THROW(substitute(parse_heap("emp & t.f = 1", true), {{"t", Term::null()}}), StructuralError);
}

TEST(Substitute, Homomorphism) {
  Gen g;
  for (int i = 0; i < 500; ++i) {
    SymbolicHeap d;
    d.pure = conjuncts(g.pure(2));
    d.spatial.push_back(SpatialAtom::pred("p", {g.term(1), Term::var("a")}));
    Term t = g.term(2);
    auto fv = free_vars(d);
    auto out = substitute(d, {{"a", t}});
    std::set<std::string> expected = fv;
    expected.erase("a");
    collect_vars(t, expected);
    EXPECT_EQ(free_vars(out), expected);
  }
}

TEST(Normalize, PureFloatsOut) {
  auto a = parse_heap("emp & x = null");
  auto b = parse_heap("emp & y = null");
  auto out = normalize(RawFormula::star({RawFormula::leaf(a), RawFormula::leaf(b)}));
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0], parse_heap("emp & x = null & y = null"));
}

TEST(Normalize, ExistentialClashRenamed) {
  auto a = parse_heap("exists a . x -> N(a) & a = 1");
  auto b = parse_heap("exists a . y -> N(a) & a = 2");
  auto out = normalize(RawFormula::star({RawFormula::leaf(a), RawFormula::leaf(b)}));
  ASSERT_EQ(out.size(), 1u);
  ASSERT_EQ(out[0].exists.size(), 2u);
  EXPECT_EQ(out[0].exists[0], "a");
  EXPECT_NE(out[0].exists[1], "a");
  EXPECT_TRUE(conforms(out[0]));
  EXPECT_TRUE(alpha_equivalent(out[0], parse_heap("exists a, b . x -> N(a) * y -> N(b) & a = 1 & b = 2")));
}

TEST(Normalize, DistributesOverDisjunction) {
  auto s = bst_spec();
  Formula body = s.preds[0].body;
  Formula inst;
  for (auto d : body.disjuncts) inst.disjuncts.push_back(substitute(d, {{"root", Term::var("this_root")}}));
  auto out = normalize(RawFormula::star({RawFormula::leaf(parse_heap("emp")), RawFormula::of(inst)}));
  ASSERT_EQ(out.size(), 2u);
  EXPECT_TRUE(alpha_equivalent(out[0], parse_heap("emp & this_root = null")));
  EXPECT_TRUE(alpha_equivalent(
      out[1], parse_heap("exists elt, l, r . this_root -> BinaryNode(elt, l, r) * bst(l, minE, elt) *"
                         " bst(r, elt, maxE) & minE < elt & maxE > elt")));
  for (const auto& d : out) EXPECT_TRUE(conforms(d));
}

TEST(Normalize, RandomCompositionsConform) {
  std::mt19937 rng(7);
  auto heap = [&](int i) {
    std::string v = "e" + std::to_string(i % 2);
    return parse_heap("exists " + v + " . x" + std::to_string(i) + " -> N(" + v + ") & " + v + " = " +
                      std::to_string(i));
  };
  for (int round = 0; round < 50; ++round) {
    std::vector<RawFormula> kids;
    int n = 2 + static_cast<int>(rng() % 3);
    for (int i = 0; i < n; ++i) {
      if (rng() % 2) {
        kids.push_back(RawFormula::disj({RawFormula::leaf(heap(i)), RawFormula::leaf(heap(i + 5))}));
      } else {
        kids.push_back(RawFormula::leaf(heap(i)));
      }
    }
    for (const auto& d : normalize(RawFormula::star(kids))) {
      EXPECT_TRUE(conforms(d)) << to_string(d);
      EXPECT_EQ(d.spatial.size(), static_cast<std::size_t>(n));
    }
  }
}

TEST(Alpha, EquivalenceAndKeys) {
  auto a = parse_heap("exists p, q . x -> N(p) * y -> N(q) & p < q");
  auto b = parse_heap("exists u, v . y -> N(v) * x -> N(u) & u < v");
  auto c = parse_heap("exists u, v . y -> N(u) * x -> N(v) & u < v");
  EXPECT_TRUE(alpha_equivalent(a, b));
  EXPECT_FALSE(alpha_equivalent(a, c));
  EXPECT_EQ(canonical_key(a), canonical_key(b));
  EXPECT_NE(canonical_key(a), canonical_key(c));
  EXPECT_EQ(dedup({a, b, c}).size(), 2u);
}

TEST(Sorts, InferredFromPositions) {
  auto s = bst_spec();
  auto ps = pred_param_sorts(s);
  ASSERT_EQ(ps["bst"].size(), 3u);
  EXPECT_EQ(ps["bst"][0], Sort::ref("BinaryNode"));
  EXPECT_EQ(ps["bst"][1], Sort::integer());
  EXPECT_EQ(ps["bst"][2], Sort::integer());
  auto m = infer_sorts(parse_heap("bst(t, a, b) & q = t"), s);
  EXPECT_EQ(m["q"], Sort::ref("BinaryNode"));
  EXPECT_EQ(m["a"], Sort::integer());
}
