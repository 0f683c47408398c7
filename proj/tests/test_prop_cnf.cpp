#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "support.hpp"

using namespace peuf;
using namespace testing_support;

namespace {

PropId random_prop(PropStore& p, std::mt19937_64& rng, int vars, int depth) {
  std::uniform_int_distribution<int> pick(0, 5);
  int k = depth == 0 ? 0 : pick(rng);
  auto leaf = [&] { return p.var("v" + std::to_string(std::uniform_int_distribution<int>(0, vars - 1)(rng))); };
  switch (k) {
    case 0:
    case 1: return leaf();
    case 2: return p.mk_not(random_prop(p, rng, vars, depth - 1));
    case 3: return p.mk_and(random_prop(p, rng, vars, depth - 1), random_prop(p, rng, vars, depth - 1));
    case 4: return p.mk_or(random_prop(p, rng, vars, depth - 1), random_prop(p, rng, vars, depth - 1));
    default: return p.mk_iff(random_prop(p, rng, vars, depth - 1), random_prop(p, rng, vars, depth - 1));
  }
}

// Assignment to the store's variables read back from a CNF model via names.
std::vector<char> project(const PropStore& p, const CnfInstance& c, const std::vector<char>& model) {
  std::vector<char> a(p.num_vars(), 0);
  for (int v = 1; v <= c.numVars; ++v) {
    const std::string& name = c.names[v - 1];
    if (name.empty() || !p.has_var(name)) continue;
    a[p.node(*p.find_var(name)).var] = model[v];
  }
  return a;
}

CnfInstance pigeonhole(int holes) {
  CnfInstance c;
  int pigeons = holes + 1;
  auto var = [&](int i, int j) { return i * holes + j + 1; };
  for (int i = 0; i < pigeons * holes; ++i) c.new_var();
  for (int i = 0; i < pigeons; ++i) {
    Clause cl;
    for (int j = 0; j < holes; ++j) cl.push_back(var(i, j));
    c.add(cl, ClauseOrigin::Other);
  }
  for (int j = 0; j < holes; ++j)
    for (int i = 0; i < pigeons; ++i)
      for (int k = i + 1; k < pigeons; ++k) c.add({-var(i, j), -var(k, j)}, ClauseOrigin::Other);
  return c;
}

}  // namespace

TEST(PropStore, ConstantFolding) {
  PropStore p;
  PropId x = p.var("x"), y = p.var("y");
  EXPECT_EQ(p.mk_and(x, p.mk_not(x)), p.mk_false());
  EXPECT_EQ(p.mk_or(x, p.mk_not(x)), p.mk_true());
  EXPECT_EQ(p.mk_or(x, p.mk_true()), p.mk_true());
  EXPECT_EQ(p.mk_and(x, p.mk_true()), x);
  EXPECT_EQ(p.mk_not(p.mk_not(x)), x);
  EXPECT_EQ(p.mk_iff(x, x), p.mk_true());
  EXPECT_EQ(p.mk_iff(x, p.mk_false()), p.mk_not(x));
  EXPECT_EQ(p.mk_and(x, y), p.mk_and(y, x));
  EXPECT_EQ(p.mk_ite(x, y, y), y);
  EXPECT_EQ(p.var("x"), x);
  EXPECT_EQ(to_prefix(p, p.mk_and(x, p.mk_not(y))), "(and x (not y))");
}

TEST(PropStore, FreshVariablesAvoidNames) {
  PropStore p;
  p.var("e_1_2");
  PropId f = p.fresh_var("e_1_2");
  EXPECT_NE(p.var_name(p.node(f).var), "e_1_2");
  EXPECT_EQ(p.num_vars(), 2u);
}

TEST(Tseitin, EquisatisfiableWithTruthTable) {
  std::mt19937_64 rng(3);
  int sat = 0, unsat = 0;
  for (int i = 0; i < 400; ++i) {
    PropStore p;
    PropId f = i % 2 ? p.mk_and(random_prop(p, rng, 3, 4), random_prop(p, rng, 3, 4)) : random_prop(p, rng, 5, 5);
    CnfInstance c = to_cnf(p, f);
    bool want = prop_satisfiable(p, f);
    ASSERT_EQ(cnf_brute_force(c), want) << to_prefix(p, f);
    SolveOutcome o = solve(c);
    ASSERT_EQ(o.result == SatResult::Sat, want) << to_prefix(p, f);
    if (want) {
      EXPECT_TRUE(cnf_satisfied(c, o.model));
      EXPECT_TRUE(prop_eval(p, f, project(p, c, o.model))) << to_prefix(p, f);
      ++sat;
    } else {
      ++unsat;
    }
  }
  EXPECT_GT(sat, 50);
  EXPECT_GT(unsat, 20);
}

TEST(Tseitin, ConstantsAndNamedVariables) {
  PropStore p;
  EXPECT_TRUE(to_cnf(p, p.mk_true()).clauses.empty());
  CnfInstance f = to_cnf(p, p.mk_false());
  ASSERT_EQ(f.clauses.size(), 1u);
  EXPECT_TRUE(f.clauses[0].empty());
  PropId x = p.var("x"), y = p.var("y");
  CnfInstance c = to_cnf(p, p.mk_or(x, y));
  EXPECT_EQ(std::count(c.names.begin(), c.names.end(), "x"), 1);
  EXPECT_EQ(std::count(c.names.begin(), c.names.end(), "y"), 1);
  EXPECT_EQ(c.count(ClauseOrigin::Formula), c.clauses.size() - c.count(ClauseOrigin::Definition));
}

TEST(Dimacs, RoundTripKeepsNamesAndProvenance) {
  PropStore p;
  PropId x = p.var("x"), y = p.var("y"), z = p.var("z");
  TseitinBuilder b(p);
  b.assert_formula(p.mk_or(x, p.mk_and(y, z)));
  b.assert_formula(p.mk_or(p.mk_not(x), z), ClauseOrigin::Transitivity);
  CnfInstance c = b.take();
  std::string text = to_dimacs(c);
  std::istringstream in(text);
  CnfInstance r = read_dimacs(in);
  EXPECT_EQ(r.numVars, c.numVars);
  EXPECT_EQ(r.clauses, c.clauses);
  EXPECT_EQ(r.names, c.names);
  EXPECT_EQ(r.count(ClauseOrigin::Transitivity), c.count(ClauseOrigin::Transitivity));
  EXPECT_EQ(to_dimacs(r), text);
}

TEST(Dimacs, MalformedInputIsRejected) {
  for (const char* text : {"1 2 0\n", "p dnf 2 1\n1 0\n", "p cnf 2 1\n3 0\n"}) {
    std::istringstream in(text);
    EXPECT_THROW(read_dimacs(in), DimacsError) << text;
  }
}

TEST(Solver, PigeonholeIsUnsat) {
  for (int holes = 2; holes <= 6; ++holes) {
    SolveOutcome o = solve(pigeonhole(holes));
    EXPECT_EQ(o.result, SatResult::Unsat) << holes;
    if (holes >= 3) EXPECT_GT(o.stats.conflicts, 0u);
  }
}

TEST(Solver, AgreesWithBruteForceOnRandom3Cnf) {
  std::mt19937_64 rng(17);
  int sat = 0, unsat = 0;
  for (int i = 0; i < 600; ++i) {
    CnfInstance c;
    int n = 4 + i % 9;
    for (int v = 0; v < n; ++v) c.new_var("v" + std::to_string(v));
    int m = static_cast<int>(4.3 * n);
    std::uniform_int_distribution<int> var(1, n), sign(0, 1);
    for (int k = 0; k < m; ++k) {
      Clause cl;
      for (int j = 0; j < 3; ++j) cl.push_back(sign(rng) ? var(rng) : -var(rng));
      c.add(cl, ClauseOrigin::Other);
    }
    SolveOutcome o = solve(c);
    bool want = cnf_brute_force(c);
    ASSERT_EQ(o.result == SatResult::Sat, want) << to_dimacs(c);
    if (want) {
      EXPECT_TRUE(cnf_satisfied(c, o.model));
      ++sat;
    } else {
      ++unsat;
    }
  }
  EXPECT_GT(sat, 100);
  EXPECT_GT(unsat, 100);
}

TEST(Solver, EmptyAndUnitInstances) {
  CnfInstance c;
  EXPECT_EQ(solve(c).result, SatResult::Sat);
  c.new_var("a");
  c.add({1}, ClauseOrigin::Other);
  SolveOutcome o = solve(c);
  ASSERT_EQ(o.result, SatResult::Sat);
  EXPECT_EQ(o.model[1], 1);
  c.add({-1}, ClauseOrigin::Other);
  EXPECT_EQ(solve(c).result, SatResult::Unsat);
  c.add({}, ClauseOrigin::Other);
  EXPECT_EQ(solve(c).result, SatResult::Unsat);
}
