#include <gtest/gtest.h>

#include "support.hpp"

using namespace peuf;
using namespace testing_support;

namespace {

const std::vector<InstrClass> kFull{InstrClass::Alu, InstrClass::Load, InstrClass::Store, InstrClass::Branch,
                                    InstrClass::Jump};

PipelineSpec spec_of(int stages, std::vector<InstrClass> classes, Bug bug = Bug::None,
                     MemoryModel memory = MemoryModel::Abstract) {
  PipelineSpec p;
  p.stages = stages;
  p.classes = std::move(classes);
  p.bug = bug;
  p.memory = memory;
  return p;
}

std::set<std::string> names(const ExprStore& s, const std::vector<SymbolId>& ids) {
  std::set<std::string> out;
  for (SymbolId f : ids) out.insert(s.symbols[f].name);
  return out;
}

}  // namespace

TEST(Pipeline, RegisterFileReads) {
  ExprStore s;
  ExprId a = s.mk_var("a"), a1 = s.mk_var("a1"), a2 = s.mk_var("a2");
  ExprId d1 = s.mk_var("d1"), d2 = s.mk_var("d2");
  EXPECT_EQ(to_sexpr(s, reg_read(s, {}, a)), "(rf_init a)");
  EXPECT_EQ(to_sexpr(s, reg_read(s, {{a1, d1}, {a2, d2}}, a)), "(ite (= a a2) d2 (ite (= a a1) d1 (rf_init a)))");
  EXPECT_EQ(reg_read(s, {{a1, d1}, {a2, d2}}, a2), d2);
}

TEST(Pipeline, RegisterReadSemantics) {
  ExprStore s;
  ExprId a = s.mk_var("a"), a1 = s.mk_var("a1"), a2 = s.mk_var("a2");
  ExprId read = reg_read(s, {{a1, s.mk_var("d1")}, {a2, s.mk_var("d2")}}, a);
  Interpretation in;
  in.set("d1", 10);
  in.set("d2", 20);
  in.tables["rf_init"].otherwise = 99;
  for (auto [va, v1, v2, want] : std::vector<std::array<Value, 4>>{
           {1, 1, 2, 10}, {2, 1, 2, 20}, {1, 1, 1, 20}, {3, 1, 2, 99}}) {
    in.set("a", va);
    in.set("a1", v1);
    in.set("a2", v2);
    EXPECT_EQ(evaluate(s, read, in), want);
  }
}

TEST(Pipeline, AbstractMemoryIsUninterpreted) {
  ExprStore s;
  ExprId m = s.mk_var("m"), a = s.mk_var("a"), d = s.mk_var("d");
  EXPECT_EQ(mem_read(s, m, a), mem_read(s, m, a));
  ExprId r = mem_read(s, mem_write(s, m, a, d), a);
  EXPECT_EQ(to_sexpr(s, r), "(mem_read (mem_write m a d) a)");
  // Read-after-write is not simplified, so the abstract model cannot prove it.
  EXPECT_FALSE(decide_validity(s, s.mk_eq(r, d), Method::Pairwise).valid);
  TermBuilder b(s);
  EXPECT_EQ(guarded_read(b, {{s.mk_true(), a, d}}, a, "mem_init"), d);
}

TEST(Pipeline, SymbolClassification) {
  ExprStore s;
  ExprId f = correctness_formula(s, spec_of(3, {InstrClass::Alu}), 1);
  PolarityReport r = classify(s, to_nnf(s, f));
  std::set<std::string> g = names(s, r.gFuncs), p = names(s, r.pFuncs);
  for (const char* reg : {"src1", "src2", "dst", "E_dst", "W_dst", "r"}) EXPECT_TRUE(g.count(reg)) << reg;
  for (const char* data : {"pc", "alu", "op", "rf_init", "W_res", "E_a", "E_b"}) EXPECT_TRUE(p.count(data)) << data;

  ExprStore t;
  ExprId h = correctness_formula(t, spec_of(3, kFull, Bug::None, MemoryModel::Abstract), 1);
  PolarityReport rh = classify(t, to_nnf(t, h));
  std::set<std::string> ph = names(t, rh.pFuncs);
  for (const char* data : {"mem_read", "mem_write", "agen", "target", "inc"}) EXPECT_TRUE(ph.count(data)) << data;
}

TEST(Pipeline, CorrectDesignsAreValid) {
  struct Case {
    int stages;
    std::vector<InstrClass> classes;
    int n;
  };
  Case cases[] = {
      {3, {InstrClass::Alu}, 0}, {3, {InstrClass::Alu}, 1}, {3, {InstrClass::Alu}, 2}, {3, kFull, 1},
      {3, kFull, 2},            {5, {InstrClass::Alu}, 1}, {5, {InstrClass::Alu}, 2}, {5, kFull, 1},
  };
  for (const Case& c : cases) {
    ExprStore s;
    ExprId f = correctness_formula(s, spec_of(c.stages, c.classes), c.n);
    Verdict v = decide_validity(s, f, Method::Pairwise);
    EXPECT_TRUE(v.valid) << c.stages << "-stage, " << c.classes.size() << " classes, n=" << c.n;
  }
}

TEST(Pipeline, InjectedBugsAreCaught) {
  for (int stages : {3, 5}) {
    for (Bug bug : {Bug::NoBypass, Bug::WrongMuxPolarity, Bug::StalePcOnBranch}) {
      std::vector<InstrClass> classes =
          bug == Bug::StalePcOnBranch ? std::vector<InstrClass>{InstrClass::Alu, InstrClass::Branch}
                                      : std::vector<InstrClass>{InstrClass::Alu};
      ExprStore s;
      ExprId f = correctness_formula(s, spec_of(stages, classes, bug), 2);
      for (Method m : {Method::Bitvec, Method::Pairwise}) {
        Verdict v = decide_validity(s, f, m);
        EXPECT_FALSE(v.valid) << stages << " " << bug_name(bug) << " " << method_name(m);
        ASSERT_TRUE(v.countermodel);
        EXPECT_TRUE(v.countermodel->replayed) << stages << " " << bug_name(bug);
      }
    }
  }
}

TEST(Pipeline, EmptyRunIsTriviallyConsistent) {
  for (Bug bug : {Bug::None, Bug::NoBypass, Bug::WrongMuxPolarity}) {
    ExprStore s;
    ExprId f = correctness_formula(s, spec_of(3, {InstrClass::Alu}, bug), 0);
    EXPECT_TRUE(decide_validity(s, f, Method::Pairwise).valid) << bug_name(bug);
  }
}

TEST(Pipeline, MemoryModelsAgreeOnLoadStore) {
  // The abstract model is conservative: whatever it proves holds with the
  // write-history model too. Here both prove the design.
  std::vector<InstrClass> ls{InstrClass::Alu, InstrClass::Load, InstrClass::Store};
  for (MemoryModel mm : {MemoryModel::Abstract, MemoryModel::WriteHistory}) {
    ExprStore s;
    ExprId f = correctness_formula(s, spec_of(3, ls, Bug::None, mm), 1);
    EXPECT_TRUE(decide_validity(s, f, Method::Pairwise).valid);
  }
  ExprStore s;
  ExprId f = correctness_formula(s, spec_of(3, ls, Bug::None, MemoryModel::WriteHistory), 1);
  PolarityReport r = classify(s, to_nnf(s, f));
  std::set<std::string> g = names(s, r.gFuncs);
  EXPECT_TRUE(g.count("agen"));
  EXPECT_TRUE(g.count("ma"));
}

TEST(Pipeline, MethodsAgreeOnSmallInstance) {
  ExprStore s;
  ExprId f = correctness_formula(s, spec_of(3, {InstrClass::Alu}), 1);
  EXPECT_EQ(function_application_terms(s, f).size(), 18u);
  for (Method m : {Method::Bitvec, Method::Pairwise, Method::Oracle}) {
    ExprStore t;
    ExprId g = correctness_formula(t, spec_of(3, {InstrClass::Alu}), 1);
    EXPECT_TRUE(decide_validity(t, g, m).valid) << method_name(m);
  }
}

TEST(Pipeline, DocumentsRoundTrip) {
  ExprStore s;
  ExprId f = correctness_formula(s, spec_of(5, kFull), 1);
  ExprStore t;
  ExprId g = parse(t, to_document(s, f));
  EXPECT_EQ(postorder(t, g).size(), postorder(s, f).size());
}

TEST(Pipeline, RejectsBadParameters) {
  ExprStore s;
  EXPECT_THROW(correctness_formula(s, spec_of(3, {InstrClass::Alu}), 4), PipelineError);
  EXPECT_THROW(correctness_formula(s, spec_of(3, {InstrClass::Alu}), -1), PipelineError);
  EXPECT_EQ(parse_bug("stale-pc-on-branch"), Bug::StalePcOnBranch);
  EXPECT_EQ(parse_class("jump"), InstrClass::Jump);
  EXPECT_FALSE(parse_class("mul"));
}
