#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace peuf;
using namespace testing_support;

namespace {

constexpr const char* kChain = "(or (not (and (= x y) (= y z))) (= x z))";

std::string bits_of(const ExprStore& s, const Reduction& r, const std::string& name) {
  return pattern_string(r.props, r.bitvec->bits.at(*s.symbols.find(name)));
}

bool unsat(const Reduction& r) { return solve(r.cnf).result == SatResult::Unsat; }

std::vector<char> assignment_from(std::uint64_t bits, std::size_t n) {
  std::vector<char> a(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = (bits >> i) & 1;
  return a;
}

}  // namespace

TEST(BitVec, ExamplePatterns) {
  ExprStore s;
  ExprId f = parse(s, kExample);
  Reduction r = reduce(s, f, Method::Bitvec);
  ASSERT_TRUE(r.bitvec);
  EXPECT_EQ(r.bitvec->width, 3u);
  EXPECT_EQ(bits_of(s, r, "x"), "0,0,0");
  EXPECT_EQ(bits_of(s, r, "y"), "0,0,a_1_0");
  EXPECT_EQ(bits_of(s, r, "vg_1"), "0,1,0");
  EXPECT_EQ(bits_of(s, r, "vg_2"), "0,1,1");
  EXPECT_EQ(bits_of(s, r, "vg_3"), "1,0,0");
  EXPECT_EQ(bits_of(s, r, "vh_1"), "1,0,1");
  EXPECT_EQ(bits_of(s, r, "vh_2"), "1,1,0");
  EXPECT_EQ(r.props.num_vars(), 1u);
  EXPECT_EQ(r.range, r.props.mk_true());
  EXPECT_TRUE(unsat(r));
}

TEST(BitVec, RangeConstraintsAdmitExactlyTheIndexedValues) {
  // g-variable i ranges over {0..i-1}, so the admitted assignments number N!.
  for (std::size_t n = 1; n <= 7; ++n) {
    PropStore props;
    ExprStore s;
    std::vector<SymbolId> g, p;
    for (std::size_t i = 0; i < n; ++i) g.push_back(s.node(s.mk_var("u" + std::to_string(i))).sym);
    p.push_back(s.node(s.mk_var("w0")).sym);
    p.push_back(s.node(s.mk_var("w1")).sym);
    BitVecEncoding enc = assign_encodings(props, g, p);
    EXPECT_EQ(enc.width, std::max<std::size_t>(1, ceil_log2(n + 2)));
    std::uint64_t admitted = 0, factorial = 1;
    for (std::size_t i = 2; i <= n; ++i) factorial *= i;
    ASSERT_LE(props.num_vars(), 20u);
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << props.num_vars()); ++m) {
      std::vector<char> a = assignment_from(m, props.num_vars());
      if (!prop_eval(props, enc.range, a)) continue;
      ++admitted;
      for (std::size_t i = 0; i < n; ++i) EXPECT_LE(decode_bits(props, enc.bits.at(g[i]), a), static_cast<long>(i));
      EXPECT_EQ(decode_bits(props, enc.bits.at(p[0]), a), static_cast<long>(n));
      EXPECT_EQ(decode_bits(props, enc.bits.at(p[1]), a), static_cast<long>(n + 1));
    }
    EXPECT_EQ(admitted, factorial) << n;
  }
}

TEST(BitVec, RejectsFormulasWithApplications) {
  ExprStore s;
  ExprId f = parse(s, "(= (f x) x)");
  PropStore props;
  BitVecEncoding enc = assign_encodings(props, {*s.symbols.find("x")}, {});
  EXPECT_THROW(encode_bitvec(s, f, enc, props), EncodingError);
}

TEST(Pairwise, ExampleUsesOneComparison) {
  ExprStore s;
  ExprId f = parse(s, kExample);
  Reduction r = reduce(s, f, Method::Pairwise);
  ASSERT_TRUE(r.pairwise);
  ASSERT_EQ(r.pairwise->eVars.size(), 1u);
  EXPECT_EQ(r.pairwise->eVars.begin()->first, (std::pair<std::size_t, std::size_t>{1, 2}));
  EXPECT_EQ(r.props.var_name(r.props.node(r.pairwise->e(1, 2)).var), "e_1_2");
  EXPECT_TRUE(r.transitivity.empty());
  EXPECT_TRUE(unsat(r));
}

TEST(Pairwise, SelectorsAreUnique) {
  FormulaGenerator gen(41);
  std::mt19937_64 rng(8);
  int checked = 0;
  for (int n = 0; n < 150; ++n) {
    ExprStore s;
    ExprId f = gen.next(s);
    Reduction r = reduce(s, f, Method::Pairwise);
    for (int k = 0; k < 8; ++k) {
      std::vector<char> a(r.props.num_vars());
      for (char& c : a) c = rng() & 1;
      for (auto& [node, sel] : r.pairwise->selectors) {
        std::size_t i = selector_of(*r.pairwise, r.props, ExprId{node}, a);
        EXPECT_GE(i, 1u);
        EXPECT_LE(i, r.pairwise->N + r.pairwise->M);
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 1000);
}

TEST(Pairwise, ChainNeedsTransitivity) {
  ExprStore s;
  ExprId f = parse(s, kChain);
  Reduction with = reduce(s, f, Method::Pairwise, true);
  EXPECT_EQ(with.transitivity.size(), 3u);
  EXPECT_EQ(with.cnf.count(ClauseOrigin::Transitivity), 3u);
  EXPECT_TRUE(unsat(with));
  ExprStore t;
  Reduction without = reduce(t, parse(t, kChain), Method::Pairwise, false);
  EXPECT_FALSE(unsat(without));
}

TEST(Pairwise, TransitivityCompletesComponents) {
  // The chain x-y-z-u uses three pairs; completing {x,y,z,u} adds three more.
  ExprStore s;
  ExprId f = parse(s, "(or (not (and (and (= x y) (= y z)) (= z u))) (p))");
  Reduction r = reduce(s, f, Method::Pairwise);
  EXPECT_EQ(r.pairwise->usedEVars, 3u);
  EXPECT_EQ(r.pairwise->eVars.size(), 6u);
  EXPECT_EQ(r.transitivity.size(), 12u);
  EXPECT_FALSE(unsat(r));
}

TEST(Encodings, AgreeWithOracleOnRandomCorpus) {
  FormulaGenerator gen(57);
  int valid = 0, invalid = 0;
  for (int n = 0; n < 200; ++n) {
    ExprStore s;
    ExprId f = gen.next(s);
    bool want = oracle_validity(s, f, Restriction::All).valid;
    bool bv = unsat(reduce(s, f, Method::Bitvec));
    bool pw = unsat(reduce(s, f, Method::Pairwise, true));
    bool pwNoTrans = unsat(reduce(s, f, Method::Pairwise, false));
    EXPECT_EQ(bv, want) << to_sexpr(s, f);
    EXPECT_EQ(pw, want) << to_sexpr(s, f);
    if (pwNoTrans) EXPECT_TRUE(want) << to_sexpr(s, f);
    (want ? valid : invalid)++;
  }
  EXPECT_GT(valid, 20);
  EXPECT_GT(invalid, 20);
}
