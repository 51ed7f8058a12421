#include <gtest/gtest.h>

#include <algorithm>
#include <climits>
#include <fstream>
#include <sstream>

#include "slc/concolic.hpp"

using namespace slc;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Bst {
  SpecFile spec = parse_spec(read_file(std::string(SLC_CORPUS_DIR) + "/bst/bst.sl"));
  Program prog = parse_program(read_file(std::string(SLC_CORPUS_DIR) + "/bst/remove.ir"), spec.data);
  const Formula& pre() const { return *spec.find_pre("remove"); }
};

HeapObject node(int e, Value l, Value r) { return {"BinaryNode", {Value::integer(e), l, r}}; }

TestInput input(Store s, Value root, int x) {
  TestInput t;
  t.store = std::move(s);
  t.bindings = {{"this_root", root}, {"x", Value::integer(x)}};
  return t;
}

TestInput empty_tree() { return input({}, Value::null(), 0); }
TestInput one_node(int element, int x) {
  return input({{1, node(element, Value::null(), Value::null())}}, Value::address(1), x);
}

// The conditional node of `proc` at `pc` nearest the root, if visited.
std::optional<int> find_cond(const ConstraintTree& t, const std::string& proc, int pc) {
  for (const auto& n : t.nodes()) {
    if (n.proc == proc && n.pc == pc && n.frame.empty() && !n.children.empty() &&
        t.node(n.children[0]).branch != TreeNode::Branch::None) {
      return n.id;
    }
  }
  return std::nullopt;
}

const TreeNode& branch_child(const ConstraintTree& t, int cond, const std::string& label) {
  return t.node(*t.child(cond, label));
}

// Every (proc, pc, branch) taken by some explored conditional child.
std::set<std::string> covered(const ConstraintTree& t) {
  std::set<std::string> out;
  for (const auto& n : t.nodes()) {
    if (n.branch == TreeNode::Branch::None || !n.explored) continue;
    const TreeNode& parent = t.node(n.parent);
    out.insert(parent.proc + ":" + std::to_string(parent.pc) + (n.branch == TreeNode::Branch::Then ? ":T" : ":F"));
  }
  return out;
}

}  // namespace

TEST(EvalExpr, Basics) {
  Program p = parse_program("data Node { int element; Node next; }\nproc f() { 0: return }\n");
  Stack s;
  s.vars["v"] = Value::integer(3);
  EXPECT_EQ(eval_expr(s, Expr::binary(BinOp::Add, Expr::var("v"), Expr::integer(1)), p), Value::integer(4));

  s.heap[1] = HeapObject{"Node", {Value::integer(0), Value::null()}};
  s.vars["t"] = Value::address(1);
  EXPECT_EQ(eval_expr(s, Expr::load("t", "element"), p), Value::integer(0));

  s.vars["u"] = Value::null();
  try {
    eval_expr(s, Expr::load("u", "element"), p);
    FAIL() << "expected a fault";
  } catch (const RuntimeFault& f) {
    EXPECT_EQ(f.error, RunOutcome::Error::NullDeref);
  }
  s.vars["d"] = Value::address(7);
  try {
    eval_expr(s, Expr::load("d", "element"), p);
    FAIL() << "expected a fault";
  } catch (const RuntimeFault& f) {
    EXPECT_EQ(f.error, RunOutcome::Error::Dangling);
  }

  s.vars["m"] = Value::integer(INT32_MAX);
  EXPECT_EQ(eval_expr(s, Expr::binary(BinOp::Add, Expr::var("m"), Expr::integer(1)), p), Value::integer(INT32_MIN));
  EXPECT_EQ(eval_expr(s, Expr::binary(BinOp::Mul, Expr::var("m"), Expr::integer(2)), p), Value::integer(-2));
  // && short-circuits past a null dereference.
  auto guarded = Expr::binary(BinOp::And, Expr::binary(BinOp::Ne, Expr::var("u"), Expr::null()),
                              Expr::binary(BinOp::Eq, Expr::load("u", "element"), Expr::integer(0)));
  EXPECT_EQ(eval_expr(s, guarded, p), Value::boolean(false));
}

TEST(RunTest, AssertFalse) {
  Program p = parse_program("proc f() { 0: assert false }\n");
  ConstraintTree tree(Formula{{SymbolicHeap{}}}, {}, "f");
  auto r = run_test(TestInput{}, p, SpecFile{}, tree);
  EXPECT_EQ(r.outcome.kind, RunOutcome::Kind::AssertionViolation);
  EXPECT_EQ(r.outcome.pc, 0);
  EXPECT_EQ(r.outcome.proc, "f");
}

TEST(RunTest, RuntimeErrors) {
  SpecFile defs = parse_spec("data Node { int val; Node next; }\n");
  auto run = [&](const std::string& body, const TestInput& t) {
    Program p = parse_program("proc f(n: Node, k: int) {\n" + body + "}\n", defs.data);
    ConstraintTree tree(Formula{{SymbolicHeap{}}}, p.procs[0].params, "f");
    return run_test(t, p, defs, tree).outcome;
  };
  TestInput nul;
  nul.bindings = {{"n", Value::null()}, {"k", Value::integer(0)}};
  EXPECT_EQ(run("0: k := n.val\n", nul).error, RunOutcome::Error::NullDeref);
  EXPECT_EQ(run("0: free n\n", nul).error, RunOutcome::Error::FreeOfNull);
  EXPECT_EQ(run("0: goto k + 5\n", nul).error, RunOutcome::Error::GotoOutOfRange);

  TestInput one;
  one.store[1] = HeapObject{"Node", {Value::integer(4), Value::null()}};
  one.bindings = {{"n", Value::address(1)}, {"k", Value::integer(0)}};
  auto o = run("0: free n\n1: k := n.val\n", one);
  EXPECT_EQ(o.kind, RunOutcome::Kind::RuntimeError);
  EXPECT_EQ(o.error, RunOutcome::Error::Dangling);
  EXPECT_EQ(o.pc, 1);

  auto loop = [&] {
    Program p = parse_program("proc f(n: Node, k: int) {\n0: goto 0\n}\n", defs.data);
    ConstraintTree tree(Formula{{SymbolicHeap{}}}, p.procs[0].params, "f");
    RunConfig cfg;
    cfg.max_steps = 1000;
    return run_test(one, p, defs, tree, cfg);
  }();
  EXPECT_EQ(loop.outcome.kind, RunOutcome::Kind::BudgetExceeded);
  EXPECT_EQ(loop.steps, 1000U);
}

TEST(RunTest, AssignRule) {
  Program p = parse_program("proc f(v: int) {\n0: v := v + 1\n1: return\n}\n");
  SymbolicHeap pre = parse_heap("emp & v > 0");
  ConstraintTree tree(Formula{{pre}}, p.procs[0].params, "f");
  TestInput t;
  t.bindings = {{"v", Value::integer(4)}};
  auto r = run_test(t, p, SpecFile{}, tree);
  ASSERT_EQ(r.path.size(), 2U);
  const TreeNode& child = tree.node(r.path[1]);
  EXPECT_EQ(child.label, "C-ASSIGN");
  // ∃v'. v' > 0 ∧ v = v' + 1, with v' holding the input.
  ASSERT_EQ(child.delta.exists.size(), 1U);
  const std::string& old = child.delta.exists[0];
  EXPECT_EQ(child.inputs.at("v"), old);
  SymbolicHeap expected = parse_heap("exists w . emp & w > 0 & v = w + 1");
  EXPECT_TRUE(alpha_equivalent(child.delta, expected)) << to_string(child.delta);
  // In the solver query v names the initial value again.
  SymbolicHeap q = solver_query(child);
  EXPECT_TRUE(q.exists.empty());
  EXPECT_TRUE(free_vars(q).count("v"));
  auto res = sat(q, SpecFile{});
  ASSERT_EQ(res.decision, Decision::Sat);
  EXPECT_EQ(res.model->values.at("v"), Term::constant(1));
}

TEST(RunTest, NewAndStoreRules) {
  SpecFile defs = parse_spec("data Node { int val; Node next; }\n");
  Program p = parse_program(
      "proc f(k: int) {\n0: n := new Node(k, null)\n1: n.val := k + 1\n2: m := n.val\n3: return\n}\n", defs.data);
  ConstraintTree tree(Formula{{SymbolicHeap{}}}, p.procs[0].params, "f");
  TestInput t;
  t.bindings = {{"k", Value::integer(2)}};
  auto r = run_test(t, p, defs, tree);
  EXPECT_EQ(r.outcome.kind, RunOutcome::Kind::Ok);
  const TreeNode& last = tree.node(r.path.back());
  EXPECT_EQ(last.allocated, std::set<std::string>{"n"});
  EXPECT_TRUE(alpha_equivalent(last.delta, parse_heap("n -> Node(k, null) & n.val := k + 1 & m = n.val", true)))
      << to_string(last.delta);
  // Preprocessing reads the assigned slot, not the allocated one.
  auto pp = preprocess(last.delta, defs);
  ASSERT_EQ(pp.heaps.size(), 1U);
  EXPECT_TRUE(alpha_equivalent(pp.heaps[0], parse_heap("exists w . n -> Node(k, null) & w = k + 1 & m = w")))
      << to_string(pp.heaps[0]);
}

// The empty tree takes the then-branch of the first conditional.
TEST(ConstraintTreeReplay, EmptyTreeSeed) {
  Bst b;
  ConstraintTree tree(b.pre(), b.prog.procs[0].params, "remove");
  auto r = run_test(empty_tree(), b.prog, b.spec, tree);
  EXPECT_EQ(r.outcome.kind, RunOutcome::Kind::Ok);
  auto c = find_cond(tree, "remove", 1);
  ASSERT_TRUE(c);
  EXPECT_TRUE(branch_child(tree, *c, "then").explored);
  EXPECT_FALSE(branch_child(tree, *c, "else").explored);
  EXPECT_EQ(tree.count_unexplored(), 1U);
  // Both branch conditions extend the parent's.
  const TreeNode& parent = tree.node(*c);
  for (int k : parent.children) {
    const auto& d = tree.node(k).delta;
    ASSERT_EQ(d.pure.size(), parent.delta.pure.size() + 1);
    EXPECT_TRUE(std::equal(parent.delta.pure.begin(), parent.delta.pure.end(), d.pure.begin()));
  }
}

// The one-node tree with x equal to its element falls through to
// the removal code; the x < t.element branch stays unexplored.
TEST(ConstraintTreeReplay, OneNodeSeed) {
  Bst b;
  ConstraintTree tree(b.pre(), b.prog.procs[0].params, "remove");
  run_test(empty_tree(), b.prog, b.spec, tree);
  auto r = run_test(one_node(0, 0), b.prog, b.spec, tree);
  EXPECT_EQ(r.outcome.kind, RunOutcome::Kind::Ok);
  auto c1 = find_cond(tree, "remove", 1);
  EXPECT_TRUE(branch_child(tree, *c1, "then").explored);
  EXPECT_TRUE(branch_child(tree, *c1, "else").explored);
  auto c3 = find_cond(tree, "remove", 3);
  ASSERT_TRUE(c3);
  const TreeNode& open = branch_child(tree, *c3, "then");
  EXPECT_FALSE(open.explored);
  EXPECT_TRUE(branch_child(tree, *c3, "else").explored);
  EXPECT_TRUE(alpha_equivalent(
      open.delta, parse_heap("bst(this_root, minE, maxE) & t = this_root & t != null & x < t.element", true)))
      << to_string(open.delta);
  // The unexplored else-branches of 7 and 11 are also open; the shallowest is 3.
  EXPECT_EQ(tree.next_unexplored(), open.id);
}

TEST(Preprocess, WorkedExample) {
  Bst b;
  auto d = parse_heap("bst(this_root, minE, maxE) & t = this_root & t != null & x < t.element", true);
  auto r = preprocess(d, b.spec);
  ASSERT_EQ(r.heaps.size(), 1U);
  auto expected = parse_heap(
      "exists elt, l, r . this_root -> BinaryNode(elt, l, r) * bst(l, minE, elt) * bst(r, elt, maxE) "
      "& minE < elt & maxE > elt & t = this_root & t != null & x < elt");
  EXPECT_TRUE(alpha_equivalent(r.heaps[0], expected)) << to_string(r.heaps[0]);
  EXPECT_FALSE(r.truncated);
}

TEST(Preprocess, NullAliasAndMissingHeap) {
  Bst b;
  EXPECT_TRUE(preprocess(parse_heap("emp & t = null & x < t.element", true), b.spec).heaps.empty());
  EXPECT_TRUE(preprocess(parse_heap("emp & t != null & x < t.element", true), b.spec).heaps.empty());
  auto plain = parse_heap("bst(this_root, minE, maxE) & x < 3");
  auto r = preprocess(plain, b.spec);
  ASSERT_EQ(r.heaps.size(), 1U);
  EXPECT_EQ(r.heaps[0], plain);
}

TEST(Preprocess, NestedReadsThroughAliases) {
  Bst b;
  auto d = parse_heap(
      "bst(this_root, minE, maxE) & t = this_root & t != null & u = t.left & u != null & x < u.element", true);
  auto r = preprocess(d, b.spec);
  ASSERT_EQ(r.heaps.size(), 1U);
  auto expected = parse_heap(
      "exists elt, l, r, e1, l1, r1 . this_root -> BinaryNode(elt, l, r) * l -> BinaryNode(e1, l1, r1) "
      "* bst(l1, minE, e1) * bst(r1, e1, elt) * bst(r, elt, maxE) & minE < elt & maxE > elt "
      "& t = this_root & t != null & u = l & minE < e1 & elt > e1 & u != null & x < e1");
  EXPECT_TRUE(alpha_equivalent(r.heaps[0], expected)) << to_string(r.heaps[0]);
}

TEST(Preprocess, UnfoldBound) {
  SpecFile defs = parse_spec(
      "data Node { int val; Node next; }\n"
      "pred ls(a, b) == emp & a = b \\/ exists n . a -> Node(0, n) * ls(n, b) ;\n");
  auto d = parse_heap("ls(x, y) & y != null & k = y.val", true);
  auto r = preprocess(d, defs, 3);
  EXPECT_TRUE(r.truncated);
}

// The first concolic iteration solves x < t.element.
TEST(Explore, FirstIterationTakesLessThanBranch) {
  Bst b;
  reset_fresh_counter();
  ExploreConfig cfg;
  cfg.max_iterations = 1;
  auto r = explore(b.prog, b.spec, b.pre(), {empty_tree(), one_node(0, 0)}, cfg);
  ASSERT_EQ(r.tests.size(), 3U);
  const TestInput& t = r.tests[2].input;
  auto root = t.binding("this_root");
  ASSERT_TRUE(root && root->kind == Value::Kind::Addr);
  EXPECT_LT(t.binding("x")->num, t.store.at(root->addr).slots[0].num);
  auto c3 = find_cond(r.tree, "remove", 3);
  EXPECT_TRUE(branch_child(r.tree, *c3, "then").explored);
  EXPECT_EQ(r.tests[2].outcome.kind, RunOutcome::Kind::Ok);
}

TEST(Explore, StraightLineProgram) {
  Program p = parse_program("proc f() { 0: assert true }\n");
  auto r = explore(p, SpecFile{}, Formula{{SymbolicHeap{}}}, {TestInput{}});
  EXPECT_EQ(r.stats.iterations, 0U);
  EXPECT_EQ(r.tree.count_unexplored(), 0U);
  EXPECT_EQ(r.tree.size(), 2U);  // root, exit
}

TEST(Explore, GoalStopsTheLoop) {
  Bst b;
  reset_fresh_counter();
  ExploreConfig cfg;
  cfg.goal = [](const ConstraintTree& t) { return t.size() > 40; };
  auto r = explore(b.prog, b.spec, b.pre(), {empty_tree(), one_node(0, 0)}, cfg);
  EXPECT_TRUE(r.stats.goal_reached);
  EXPECT_FALSE(r.stats.budget_exhausted);
  EXPECT_GT(r.tree.size(), 40U);
  EXPECT_LT(r.stats.iterations, 20U);
}

TEST(Explore, NodeBudget) {
  Bst b;
  reset_fresh_counter();
  ExploreConfig cfg;
  cfg.run.max_nodes = 60;
  auto r = explore(b.prog, b.spec, b.pre(), {empty_tree(), one_node(0, 0)}, cfg);
  EXPECT_TRUE(r.stats.budget_exhausted);
  EXPECT_LE(r.tree.size(), 60U);
}

TEST(Explore, BstReachesFeasibleBranches) {
  Bst b;
  std::set<std::string> expected;
  for (const auto& proc : b.prog.procs) {
    for (std::size_t i = 0; i < proc.body.size(); ++i) {
      if (proc.body[i].kind != Stmt::Kind::If) continue;
      expected.insert(proc.name + ":" + std::to_string(i) + ":T");
      expected.insert(proc.name + ":" + std::to_string(i) + ":F");
    }
  }
  expected.erase("findMin:0:T");
  reset_fresh_counter();
  ExploreConfig cfg;
  cfg.max_iterations = 200;
  cfg.goal = [&](const ConstraintTree& t) {
    auto c = covered(t);
    return std::includes(c.begin(), c.end(), expected.begin(), expected.end());
  };
  auto r = explore(b.prog, b.spec, b.pre(), {empty_tree(), one_node(0, 0)}, cfg);
  EXPECT_TRUE(r.stats.goal_reached);
  auto cov = covered(r.tree);
  for (const auto& e : expected) EXPECT_TRUE(cov.count(e)) << "uncovered " << e;
  for (const auto& t : r.tests) {
    EXPECT_TRUE(satisfies(t.input, b.pre(), b.spec)) << t.input.provenance;
  }
}

TEST(Explore, Deterministic) {
  Bst b;
  auto once = [&] {
    reset_fresh_counter();
    ExploreConfig cfg;
    cfg.max_iterations = 12;
    auto r = explore(b.prog, b.spec, b.pre(), {empty_tree(), one_node(0, 0)}, cfg);
    std::string s = to_dot(r.tree);
    for (const auto& t : r.tests) {
      for (const auto& [n, v] : t.input.bindings) s += n + "=" + to_string(v) + ";";
      s += std::to_string(t.input.store.size()) + "\n";
    }
    return s;
  };
  EXPECT_EQ(once(), once());
}

// Every visited conditional has both children, and each explored node's
// path condition holds on some input that reached it.
TEST(ExploreProperty, BranchCompletenessAndConsistency) {
  Bst b;
  reset_fresh_counter();
  ExploreConfig cfg;
  cfg.max_iterations = 20;
  auto r = explore(b.prog, b.spec, b.pre(), {empty_tree(), one_node(0, 0)}, cfg);
  for (const auto& n : r.tree.nodes()) {
    if (n.explored && n.stmt.rfind("if ", 0) == 0 && !n.outcome) {
      EXPECT_EQ(n.children.size(), 2U) << n.id;
    }
  }
  // Re-run every test on a fresh tree and check the inputs against the
  // preprocessed conditions of the nodes they visit.
  std::size_t checked = 0;
  for (const auto& t : r.tests) {
    ConstraintTree fresh(b.pre(), b.prog.procs[0].params, "remove");
    auto run = run_test(t.input, b.prog, b.spec, fresh);
    for (int id : run.path) {
      const TreeNode& n = fresh.node(id);
      if (n.depth > 12) break;
      auto pp = preprocess(solver_query(n), b.spec);
      if (pp.heaps.empty()) continue;
      std::map<std::string, Value> env(t.input.bindings.begin(), t.input.bindings.end());
      bool some = std::any_of(pp.heaps.begin(), pp.heaps.end(), [&](const SymbolicHeap& h) {
        return eval_heap(h, t.input.store, env, b.spec);
      });
      EXPECT_TRUE(some) << "node " << id << " " << to_string(n.delta);
      ++checked;
    }
  }
  EXPECT_GT(checked, 0U);
}
