#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "slc/testgen.hpp"
#include "slc/unfold.hpp"

using namespace slc;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SpecFile bst_spec() { return parse_spec(read_file(std::string(SLC_CORPUS_DIR) + "/bst/bst.sl")); }

const char* kSll =
    "data Node { int val; Node next; }\n"
    "pred sll(root) == emp & root = null \\/ exists v, n . root -> Node(v, n) * sll(n) ;\n";

std::vector<Param> remove_params() { return {{"this_root", Type::ref("BinaryNode")}, {"x", Type::integer()}}; }

HeapObject node(int e, Value l, Value r) { return {"BinaryNode", {Value::integer(e), l, r}}; }

TestInput tree(Store s, Value root) {
  TestInput t;
  t.store = std::move(s);
  t.bindings = {{"this_root", root}, {"x", Value::integer(0)}};
  return t;
}

}  // namespace

TEST(Canonicalize, BreadthFirstNumbering) {
  Store s;
  s[7] = node(2, Value::null(), Value::address(3));
  s[3] = node(5, Value::null(), Value::null());
  auto t = canonicalize(tree(s, Value::address(7)));
  EXPECT_EQ(t.binding("this_root"), Value::address(1));
  EXPECT_EQ(t.store.at(1).slots[2], Value::address(2));
  EXPECT_EQ(t.store.at(2).slots[0], Value::integer(5));
}

TEST(EvalPred, Bst) {
  auto spec = bst_spec();
  TestInput empty = tree({}, Value::null());
  EXPECT_TRUE(eval_pred(empty, "bst", {Value::null(), Value::integer(0), Value::integer(0)}, spec));

  Store bad;
  bad[1] = node(1, Value::address(2), Value::null());
  bad[2] = node(1, Value::null(), Value::null());
  auto ghosts = satisfies(tree(bad, Value::address(1)), *spec.find_pre("remove"), spec);
  EXPECT_FALSE(ghosts);

  Store good = bad;
  good[2].slots[0] = Value::integer(0);
  EXPECT_TRUE(satisfies(tree(good, Value::address(1)), *spec.find_pre("remove"), spec));
  EXPECT_TRUE(eval_pred(tree(good, Value::address(1)), "bst", {Value::address(1), Value::integer(-5), Value::integer(5)},
                        spec));
  EXPECT_FALSE(eval_pred(tree(good, Value::address(1)), "bst", {Value::address(1), Value::integer(0), Value::integer(5)},
                         spec));

  Store cyclic;
  cyclic[1] = node(1, Value::address(1), Value::null());
  EXPECT_FALSE(satisfies(tree(cyclic, Value::address(1)), *spec.find_pre("remove"), spec));

  Store extra = good;
  extra[3] = node(9, Value::null(), Value::null());
  EXPECT_FALSE(satisfies(tree(extra, Value::address(1)), *spec.find_pre("remove"), spec));
}

TEST(ToUnitTest, EmptyTree) {
  auto spec = bst_spec();
  SymbolicModel m;
  m.values["this_root"] = Term::null();
  auto t = to_unit_test(m, remove_params(), spec);
  EXPECT_TRUE(t.store.empty());
  EXPECT_EQ(t.binding("this_root"), Value::null());
  EXPECT_EQ(t.binding("x"), Value::integer(0));
}

TEST(ToUnitTest, OneNode) {
  auto spec = bst_spec();
  SymbolicModel m;
  m.cells.push_back(SpatialAtom::points_to("this_root", "BinaryNode", {Term::var("elt"), Term::var("l"), Term::var("r")}));
  m.values["l"] = Term::null();
  m.values["r"] = Term::null();
  m.values["elt"] = Term::constant(1);
  m.values["minE"] = Term::constant(0);
  m.values["maxE"] = Term::constant(2);
  auto t = to_unit_test(m, remove_params(), spec);
  ASSERT_EQ(t.store.size(), 1u);
  EXPECT_EQ(t.store.at(1), node(1, Value::null(), Value::null()));
  EXPECT_EQ(t.binding("this_root"), Value::address(1));
  EXPECT_EQ(t.bindings.size(), 2u);
  EXPECT_TRUE(model_check(m, m.to_heap(), spec));
}

TEST(ToUnitTest, ScalarsAndAliases) {
  SpecFile none;
  SymbolicModel m;
  m.values["v"] = Term::constant(5);
  auto t = to_unit_test(m, {{"v", Type::integer()}}, none);
  EXPECT_EQ(t.binding("v"), Value::integer(5));

  auto spec = parse_spec(kSll);
  SymbolicModel a;
  a.cells.push_back(SpatialAtom::points_to("x", "Node", {Term::constant(3), Term::var("y")}));
  a.values["y"] = Term::var("z");
  a.values["w"] = Term::var("x");
  a.dangling.insert("z");
  auto u = to_unit_test(a, {{"x", Type::ref("Node")}, {"w", Type::ref("Node")}, {"y", Type::ref("Node")}}, spec);
  EXPECT_EQ(u.store.size(), 2u);
  EXPECT_EQ(u.binding("w"), u.binding("x"));
  EXPECT_EQ(u.store.at(1).slots[1], u.binding("y"));
}

TEST(ToUnitTest, TypeClashIsLoud) {
  auto spec = parse_spec(kSll);
  SymbolicModel m;
  m.cells.push_back(SpatialAtom::points_to("x", "Node", {Term::null(), Term::null()}));
  EXPECT_THROW(to_unit_test(m, {{"x", Type::ref("Node")}}, spec), ConstructionError);
}

TEST(ModelCheck, Examples) {
  SpecFile none;
  EXPECT_TRUE(model_check(SymbolicModel{}, parse_heap("emp"), none));
  auto spec = bst_spec();
  auto pre = spec.find_pre("remove")->disjuncts[0];
  auto item2 = unfold_at(pre, 0, spec)[1];
  auto r = sat(item2, spec);
  ASSERT_EQ(r.decision, Decision::Sat);
  EXPECT_TRUE(model_check(*r.model, pre, spec));
  EXPECT_TRUE(model_check(*r.model, item2, spec));
  EXPECT_FALSE(model_check(*r.model, parse_heap("emp"), spec));
}

TEST(GenFromSpec, BstDepthTwo) {
  auto spec = bst_spec();
  reset_fresh_counter();
  auto res = gen_from_spec(spec.find_pre("remove")->disjuncts, 2, spec, remove_params());
  ASSERT_GE(res.tests.size(), 2u);
  EXPECT_TRUE(res.tests[0].store.empty());
  EXPECT_EQ(res.tests[0].binding("this_root"), Value::null());
  ASSERT_EQ(res.tests[1].store.size(), 1u);
  EXPECT_EQ(res.tests[1].store.at(1), node(0, Value::null(), Value::null()));
  EXPECT_EQ(res.stats.dropped, 0u);
  for (const auto& t : res.tests) EXPECT_TRUE(satisfies(t, *spec.find_pre("remove"), spec));
}

TEST(GenFromSpec, Trivial) {
  SpecFile none;
  auto one = gen_from_spec({parse_heap("emp")}, 0, none, {{"k", Type::integer()}});
  ASSERT_EQ(one.tests.size(), 1u);
  EXPECT_EQ(one.tests[0].binding("k"), Value::integer(0));
  auto zero = gen_from_spec({parse_heap("emp & x = null & !(x = null)")}, 3, none, {});
  EXPECT_TRUE(zero.tests.empty());
  EXPECT_EQ(zero.stats.unsat, 1u);
}

TEST(Oracle, BstOneObject) {
  auto spec = bst_spec();
  auto pre = spec.find_pre("remove")->disjuncts[0];
  auto all = oracle_enumerate(pre, {{"this_root", Type::ref("BinaryNode")}}, spec, {1, -1, 1});
  ASSERT_EQ(all.size(), 4u);
  EXPECT_TRUE(all[0].store.empty());
  for (int i = 1; i < 4; ++i) EXPECT_EQ(all[i].store.at(1), node(i - 2, Value::null(), Value::null()));
}

TEST(Oracle, SllLengths) {
  auto spec = parse_spec(kSll);
  auto all = oracle_enumerate(parse_heap("sll(root)"), {{"root", Type::ref("Node")}}, spec, {2, 0, 0});
  EXPECT_EQ(all.size(), 3u);
  auto unsat = parse_spec("data C { int v; }\npred p(x) == emp & x = null & x != null ;\n");
  EXPECT_TRUE(oracle_enumerate(parse_heap("p(y)"), {{"y", Type::ref("C")}}, unsat, {2, 0, 0}).empty());
  EXPECT_THROW(oracle_enumerate(parse_heap("sll(root)"), {}, spec, {5, 0, 0}), std::invalid_argument);
}

TEST(Oracle, GeneratedTestsAreContained) {
  auto spec = bst_spec();
  auto pre = spec.find_pre("remove")->disjuncts;
  auto res = gen_from_spec(pre, 2, spec, remove_params());
  OracleBounds b{2, -4, 4};
  auto all = oracle_enumerate(pre[0], remove_params(), spec, b);
  for (const auto& t : res.tests) {
    if (t.store.size() > 2u) continue;
    bool found = std::any_of(all.begin(), all.end(), [&](const TestInput& o) { return o.same_input(t); });
    EXPECT_TRUE(found) << t.provenance;
  }
}

TEST(Oracle, UnfoldingUnderApproximates) {
  auto spec = bst_spec();
  auto pre = spec.find_pre("remove")->disjuncts;
  std::vector<Param> in{{"this_root", Type::ref("BinaryNode")}, {"minE", Type::integer()}, {"maxE", Type::integer()}};
  for (const auto& h : unfold_closure(pre, 2, spec)) {
    for (const auto& t : oracle_enumerate(h, in, spec, {2, -2, 2})) {
      std::map<std::string, Value> env(t.bindings.begin(), t.bindings.end());
      EXPECT_TRUE(eval_heap(pre[0], t.store, env, spec)) << to_string(h);
    }
  }
}

// Random small heaps over a one-pointer type: SAT answers come with models
// that check, and UNSAT answers agree with the bounded oracle.
TEST(SolverProperty, SoundAgainstOracle) {
  auto spec = parse_spec(std::string(kSll) +
                         "pred pos(root, lo) == emp & root = null \\/ exists v, n . root -> Node(v, n) * pos(n, v) & lo < v ;\n");
  std::mt19937 rng(11);
  const char* refs[] = {"x", "y", "null"};
  const char* ints[] = {"a", "b", "0", "2"};
  const char* ops[] = {"<", "=", "!=", "<="};
  int sat_count = 0, unsat_count = 0;
  for (int i = 0; i < 150; ++i) {
    std::vector<std::string> atoms;
    int na = static_cast<int>(rng() % 3);
    bool used_x = false, used_y = false;
    for (int k = 0; k < na; ++k) {
      int kind = static_cast<int>(rng() % 3);
      std::string h = rng() % 2 ? "x" : "y";
      (h == "x" ? used_x : used_y) = true;
      if (kind == 0) atoms.push_back(h + " -> Node(" + ints[rng() % 2] + ", " + refs[rng() % 3] + ")");
      if (kind == 1) atoms.push_back("sll(" + h + ")");
      if (kind == 2) atoms.push_back(std::string("pos(") + h + ", " + ints[rng() % 4] + ")");
    }
    std::string text = atoms.empty() ? "emp" : atoms[0];
    for (std::size_t k = 1; k < atoms.size(); ++k) text += " * " + atoms[k];
    int np = static_cast<int>(rng() % 3);
    for (int k = 0; k < np; ++k) {
      if (rng() % 2) {
        text += std::string(" & ") + (used_x ? "x" : "y") + (rng() % 2 ? " = " : " != ") + refs[rng() % 3];
      } else {
        text += std::string(" & ") + ints[rng() % 4] + " " + ops[rng() % 4] + " " + ints[rng() % 4];
      }
    }
    SymbolicHeap d;
    try {
      d = parse_heap(text);
      check_heap(d, spec);
      infer_sorts(d, spec);
    } catch (const std::exception&) {
      continue;
    }
    SolverConfig cfg;
    cfg.unfold_depth = 4;
    auto r = sat(d, spec, cfg);
    OracleBounds b{3, -4, 4};
    if (r.decision == Decision::Sat) {
      ++sat_count;
      EXPECT_TRUE(model_check(*r.model, d, spec)) << text;
      if (fits_bounds(*r.model, b)) EXPECT_TRUE(oracle_exists(d, spec, b)) << text;
    } else if (r.decision == Decision::Unsat) {
      ++unsat_count;
      EXPECT_FALSE(oracle_exists(d, spec, b)) << text;
    }
  }
  EXPECT_GT(sat_count, 20);
  EXPECT_GT(unsat_count, 5);
}
