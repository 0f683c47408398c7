#include <gtest/gtest.h>

#include "support.hpp"

using namespace peuf;
using namespace testing_support;

TEST(ExprStore, HashConsingSharesIdenticalNodes) {
  ExprStore s;
  ExprId a = s.mk_app("g", {s.mk_var("x")});
  ExprId b = s.mk_app("g", {s.mk_var("x")});
  EXPECT_EQ(a, b);
  EXPECT_NE(a, s.mk_app("g", {s.mk_var("y")}));
  EXPECT_EQ(s.mk_eq(a, b), s.mk_eq(a, b));
}

TEST(ExprStore, ChildrenHaveSmallerIds) {
  ExprStore s;
  ExprId f = parse(s, kExample);
  for (ExprId e : postorder(s, f))
    for (ExprId c : s.node(e).args) EXPECT_LT(idx(c), idx(e));
}

TEST(ExprStore, ConstructorsDoNotSimplify) {
  ExprStore s;
  ExprId x = s.mk_var("x");
  ExprId e = s.mk_eq(x, x);
  EXPECT_EQ(s.node(e).kind, Kind::Eq);
  ExprId n = s.mk_not(s.mk_not(e));
  EXPECT_EQ(s.node(n).kind, Kind::Not);
  EXPECT_EQ(s.node(s.mk_and(s.mk_true(), e)).kind, Kind::And);
}

TEST(ExprStore, KindMismatchesThrow) {
  ExprStore s;
  ExprId x = s.mk_var("x");
  EXPECT_THROW(s.mk_not(x), KindError);
  EXPECT_THROW(s.mk_eq(s.mk_true(), x), KindError);
  EXPECT_THROW(s.mk_ite(x, x, x), KindError);
  s.mk_app("f", {x});
  EXPECT_THROW(s.mk_app("f", {x, x}), KindError);
  EXPECT_THROW(s.mk_pred("f", {x}), KindError);
}

TEST(ExprStore, ApplicationTermsOfExample) {
  ExprStore s;
  ExprId f = parse(s, kExample);
  std::vector<std::string> got;
  for (ExprId t : function_application_terms(s, f)) got.push_back(to_sexpr(s, t));
  std::vector<std::string> want{"x", "y", "(g x)", "(g (g x))", "(h (g x) (g (g x)))", "(g y)",
                                "(h (g y) (g (g x)))"};
  EXPECT_EQ(got, want);
}

TEST(Parse, RoundTripPreservesNodes) {
  const char* inputs[] = {
      kExample,
      "(and (p x) (or (not (= (f x y) y)) (q)))",
      "(= (ite (= x y) (f x) y) (f (ite (p x) x y)))",
      "(or (not (= x y)) (or (not (= y z)) (= x z)))",
  };
  for (const char* text : inputs) {
    ExprStore s;
    ExprId f = parse(s, text);
    ExprStore t;
    ExprId g = parse(t, to_document(s, f));
    EXPECT_EQ(to_sexpr(s, f), to_sexpr(t, g)) << text;
    EXPECT_EQ(postorder(s, f).size(), postorder(t, g).size());
  }
}

TEST(Parse, SugarIsDesugared) {
  ExprStore s;
  EXPECT_EQ(to_sexpr(s, parse(s, "(=> (p) (q))")), "(or (not p) q)");
  ExprStore t;
  EXPECT_EQ(to_sexpr(t, parse(t, "(ite (p) (q) (r))")), "(or (and p q) (and (not p) r))");
  ExprStore u;
  EXPECT_EQ(to_sexpr(u, parse(u, "(and (p) (q) (r))")), "(and (and p q) r)");
}

TEST(Parse, DeclaredFormulaArguments) {
  ExprStore s;
  ExprId f = parse(s, "(declare f function order 2 bool-args 1)\n(= (f (= x y) z) z)");
  const Symbol& sym = s.symbols[*s.symbols.find("f")];
  ASSERT_EQ(sym.order(), 2u);
  EXPECT_EQ(sym.argKinds[0], ArgKind::Formula);
  EXPECT_EQ(sym.argKinds[1], ArgKind::Term);
  ExprStore t;
  EXPECT_EQ(to_sexpr(t, parse(t, to_document(s, f))), to_sexpr(s, f));
}

TEST(Parse, DefinitionsShareNodes) {
  ExprStore s;
  ExprId f = parse(s, "(define @a term (g x))\n(define @b formula (= @a y))\n(and @b (= (g @a) @a))");
  EXPECT_EQ(to_sexpr(s, f), "(and (= (g x) y) (= (g (g x)) (g x)))");
}

TEST(Parse, LargeSharedDocumentsUseDefinitions) {
  ExprStore s;
  ExprId t = s.mk_var("x");
  for (int i = 0; i < 20; ++i) t = s.mk_app("f", {t, t});
  ExprId f = s.mk_eq(t, s.mk_var("y"));
  std::string doc = to_document(s, f);
  EXPECT_NE(doc.find("(define @d1 term"), std::string::npos);
  EXPECT_LT(doc.size(), 2000u);
  ExprStore r;
  ExprId g = parse(r, doc);
  EXPECT_EQ(postorder(r, g).size(), postorder(s, f).size());
}

TEST(Parse, ErrorsCarryPositions) {
  struct Case {
    const char* text;
    int line, col;
  };
  Case cases[] = {
      {"(= x", 1, 5},
      {"(and (p x)\n   (= x))", 2, 4},
      {"(and (= (p x) y) (p x))", 1, 19},
      {"(not x y)", 1, 1},
      {"(= x)", 1, 1},
      {"(declare f order 1)\n(= (f x y) x)", 2, 5},
      {"(and (f x) (= (f x x) y))", 1, 16},
      {")", 1, 1},
  };
  for (const Case& c : cases) {
    ExprStore s;
    try {
      parse(s, c.text);
      ADD_FAILURE() << "no error for " << c.text;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.line(), c.line) << c.text << ": " << e.what();
      EXPECT_EQ(e.col(), c.col) << c.text << ": " << e.what();
    }
  }
}

TEST(Parse, CommentsAndWhitespace) {
  ExprStore s;
  ExprId f = parse(s, "; header\n(= x ; inline\n   y)\n");
  EXPECT_EQ(to_sexpr(s, f), "(= x y)");
}

TEST(Parse, DotMarksFormulaEdgesDashed) {
  ExprStore s;
  ExprId f = parse(s, "(= (ite (p) x y) x)");
  std::string dot = to_dot(s, f);
  EXPECT_NE(dot.find("digraph"), std::string::npos);
  EXPECT_NE(dot.find("style=dashed"), std::string::npos);
  EXPECT_NE(dot.find("style=solid"), std::string::npos);
}

TEST(Evaluate, TablesAndDefaults) {
  ExprStore s;
  ExprId f = parse(s, kExample);
  Interpretation in;
  in.set("x", 0);
  in.set("y", 0);
  in.set("g", {0}, 1);
  in.set("g", {1}, 2);
  in.tables["h"].otherwise = 7;
  EXPECT_TRUE(evaluate(s, f, in));
  in.set("y", 5);
  in.tables["g"].otherwise = 3;
  EXPECT_TRUE(evaluate(s, f, in));  // antecedent false
  ExprStore t;
  ExprId eq = parse(t, "(= (f x) (f y))");
  Interpretation j;
  j.set("x", 0);
  j.set("y", 1);
  j.set("f", {0}, 4);
  j.tables["f"].otherwise = 9;
  EXPECT_FALSE(evaluate(t, eq, j));
  EXPECT_THROW(evaluate(t, eq, Interpretation{}), std::out_of_range);
}

TEST(Evaluate, IteAndPredicates) {
  ExprStore s;
  ExprId f = parse(s, "(= (ite (p x) x y) y)");
  Interpretation in;
  in.set("x", 1);
  in.set("y", 2);
  in.set("p", {1}, 1);
  EXPECT_FALSE(evaluate(s, f, in));
  in.set("p", {1}, 0);
  EXPECT_TRUE(evaluate(s, f, in));
}
