#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "slc/ir.hpp"

using namespace slc;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Program bst_program() { return parse_program(read_file(std::string(SLC_CORPUS_DIR) + "/bst/remove.ir")); }

const char* kList = "data Node { int val; Node next; }\n";

}  // namespace

TEST(ParseProgram, PortedRemove) {
  auto p = bst_program();
  ASSERT_EQ(p.procs.size(), 2u);
  EXPECT_EQ(p.entry, "remove");
  EXPECT_EQ(p.find_proc("remove")->body.size(), 22u);
  EXPECT_EQ(p.find_proc("findMin")->body.size(), 6u);
  EXPECT_EQ(*p.find_proc("remove")->type_of("t"), Type::ref("BinaryNode"));
  EXPECT_EQ(*p.find_proc("remove")->type_of("e"), Type::integer());
  EXPECT_TRUE(check_ssa(p).empty());
}

TEST(ParseProgram, TrivialGoto) {
  auto p = parse_program("proc f() { 0: goto 1 }");
  ASSERT_EQ(p.procs.size(), 1u);
  EXPECT_EQ(p.procs[0].body.size(), 1u);
  EXPECT_EQ(p.procs[0].body[0].kind, Stmt::Kind::Goto);
}

TEST(ParseProgram, Errors) {
  EXPECT_THROW(parse_program(std::string(kList) + "proc f(w: Node) { 0: v := w.g }"), ValidationError);
  EXPECT_THROW(parse_program("proc f() { 0: goto 2 }"), ValidationError);
  EXPECT_THROW(parse_program("proc f() { 0: goto -1 }"), ValidationError);
  EXPECT_THROW(parse_program("proc f() { 0: call g() }"), ValidationError);
  EXPECT_THROW(parse_program("proc g(a: int) { 0: goto 1 } proc f() { 0: call g() }"), ValidationError);
  EXPECT_THROW(parse_program(std::string(kList) + "proc f() { 0: v := new Node(1) }"), ValidationError);
  EXPECT_THROW(parse_program("proc f(a: int, b: bool) { 0: assert a = b }"), ValidationError);
  EXPECT_THROW(parse_program("proc f(a: int) { 0: if a then goto 1 else goto 1 }"), ValidationError);
  EXPECT_THROW(parse_program("proc f() { 0: v := 1 1: v := true }"), ValidationError);
  EXPECT_THROW(parse_program("proc f() { 0: v := u }"), ValidationError);
  EXPECT_THROW(parse_program("proc f() { 1: goto 1 }"), ParseError);
  EXPECT_THROW(parse_program("proc f() { 0: v#1 := 1 }"), ParseError);
  EXPECT_THROW(parse_program("proc f() { 0: v := 1 +  }"), ParseError);
  EXPECT_THROW(parse_program("proc f() -> int { 0: return }"), ValidationError);
  EXPECT_THROW(parse_program("data N { int v; }", {DataDef{"N", {{"bool", "v"}}}}), ValidationError);
}

TEST(ParseProgram, DynamicGotoAccepted) {
  auto p = parse_program("proc f(k: int) { 0: goto k + 5 }");
  EXPECT_EQ(p.procs[0].body[0].e.kind, Expr::Kind::Binary);
}

TEST(ParseProgram, SharedDataTypes) {
  DataDef node{"Node", {{"int", "val"}, {"Node", "next"}}};
  auto p = parse_program("proc f(x: Node) { 0: y := x.next }", {node});
  EXPECT_EQ(*p.procs[0].type_of("y"), Type::ref("Node"));
}

TEST(CheckSsa, Warnings) {
  auto p = parse_program("proc f() { 0: v := 1 1: v := 2 }");
  auto w = check_ssa(p);
  ASSERT_EQ(w.size(), 1u);
  EXPECT_NE(w[0].find("'v'"), std::string::npos);
  EXPECT_TRUE(check_ssa(parse_program("proc f() { 0: v := 1 1: w := v + 1 }")).empty());
  EXPECT_EQ(check_ssa(parse_program("proc f(a: int) { 0: a := 2 }")).size(), 1u);
}

TEST(RoundTrip, PortedProgram) {
  auto p = bst_program();
  auto text = to_string(p);
  auto q = parse_program(text);
  EXPECT_EQ(p, q);
  EXPECT_EQ(to_string(q), text);
}

TEST(RoundTrip, RandomExpressions) {
  std::mt19937 rng(99);
  auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); };
  std::function<Expr(int)> ie = [&](int d) -> Expr {
    int k = d <= 0 ? pick(3) : pick(6);
    switch (k) {
      case 0:
        return Expr::var("a");
      case 1:
        return Expr::integer(pick(9) - 4);
      case 2:
        return Expr::load("n", "val");
      case 3:
        return Expr::unary(UnOp::Neg, ie(d - 1));
      default: {
        BinOp ops[] = {BinOp::Add, BinOp::Sub, BinOp::Mul};
        return Expr::binary(ops[pick(3)], ie(d - 1), ie(d - 1));
      }
    }
  };
  std::function<Expr(int)> be = [&](int d) -> Expr {
    int k = d <= 0 ? pick(2) : pick(5);
    switch (k) {
      case 0: {
        BinOp ops[] = {BinOp::Eq, BinOp::Ne, BinOp::Lt, BinOp::Le, BinOp::Gt, BinOp::Ge};
        return Expr::binary(ops[pick(6)], ie(2), ie(2));
      }
      case 1:
        return Expr::boolean(pick(2));
      case 2:
        return Expr::unary(UnOp::Not, be(d - 1));
      default:
        return Expr::binary(pick(2) ? BinOp::And : BinOp::Or, be(d - 1), be(d - 1));
    }
  };
  for (int i = 0; i < 1000; ++i) {
    Expr cond = be(3);
    std::string text = std::string(kList) + "proc f(a: int, n: Node) { 0: assert " + to_string(cond) + " }";
    auto p = parse_program(text);
    ASSERT_EQ(p.procs[0].body[0].e, cond) << to_string(cond);
  }
}
