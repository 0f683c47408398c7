#pragma once

#include <chrono>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "peuf/bitvec.hpp"
#include "peuf/cnf.hpp"
#include "peuf/dpll.hpp"
#include "peuf/elim.hpp"
#include "peuf/eval.hpp"
#include "peuf/oracle.hpp"
#include "peuf/pairwise.hpp"
#include "peuf/polarity.hpp"

namespace peuf {

enum class Method { Bitvec, Pairwise, Oracle };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::Bitvec: return "bitvec";
    case Method::Pairwise: return "pairwise";
    case Method::Oracle: return "oracle";
  }
  return "?";
}

inline std::optional<Method> parse_method(const std::string& s) {
  if (s == "bitvec") return Method::Bitvec;
  if (s == "pairwise") return Method::Pairwise;
  if (s == "oracle") return Method::Oracle;
  return std::nullopt;
}

struct DecideOptions {
  Method method = Method::Pairwise;
  bool transitivity = true;
  OracleOptions oracle{};
};

struct Countermodel {
  Interpretation interpretation;
  std::vector<std::vector<ExprId>> blocks;  // T(F) grouped by value
  bool replayed = false;                    // evaluate() confirms the formula is false
};

struct Verdict {
  bool valid = false;
  Method method = Method::Pairwise;
  std::size_t gVars = 0, pVars = 0;
  std::size_t propositionalVars = 0;
  std::size_t eVars = 0, eVarsUsed = 0;
  std::size_t constraintCount = 0;
  std::size_t cnfVars = 0, cnfClauses = 0;
  std::optional<Restriction> restriction;
  std::optional<OracleCounts> counts;
  std::optional<Countermodel> countermodel;
  SolverStats stats;
  double seconds = 0;
};

inline std::vector<std::vector<ExprId>> value_blocks(const ExprStore& s, ExprId root, const Interpretation& i) {
  Evaluator ev(s, i);
  std::map<Value, std::vector<ExprId>> groups;
  for (ExprId t : function_application_terms(s, root)) groups[ev(t)].push_back(t);
  std::vector<std::vector<ExprId>> out;
  for (auto& [v, ts] : groups) out.push_back(std::move(ts));
  return out;
}

// Extends an interpretation of F*'s variables to the eliminated symbols: each
// table maps the transformed argument values of the least matching application
// to its fresh variable, processed from the last eliminated symbol back.
inline Interpretation lift_interpretation(const ExprStore& s, ExprId original, const EliminationResult& elim,
                                          Interpretation j) {
  std::vector<ExprId> roots{original, elim.fStar};
  for (const SymbolTrace& t : elim.trace) {
    roots.insert(roots.end(), t.freshNodes.begin(), t.freshNodes.end());
    for (const auto& hat : t.hatArgs) roots.insert(roots.end(), hat.begin(), hat.end());
  }
  Value next = 0;
  for (auto& [name, table] : j.tables)
    for (auto& [args, v] : table.entries) next = std::max(next, v + 1);
  for (ExprId e : postorder(s, roots)) {
    const Node& n = s.node(e);
    if ((n.kind != Kind::FuncApp && n.kind != Kind::PredApp) || !n.args.empty()) continue;
    const std::string& name = s.symbols[n.sym].name;
    if (!j.has(name)) j.set(name, n.kind == Kind::FuncApp ? next++ : 0);
  }
  for (auto it = elim.trace.rbegin(); it != elim.trace.rend(); ++it) {
    const SymbolTrace& t = *it;
    if (t.terms.empty()) continue;
    Evaluator ev(s, j);
    Table table;
    for (std::size_t i = 0; i < t.terms.size(); ++i) {
      Tuple key;
      for (ExprId a : t.hatArgs[i]) key.push_back(ev(a));
      if (!table.entries.count(key)) table.entries[key] = ev(t.freshNodes[i]);
    }
    j.tables[s.symbols[t.symbol].name] = std::move(table);
  }
  return j;
}

// Propositional form of a validity question: F is valid iff `cnf` (the
// negated encoding plus side constraints) is unsatisfiable.
struct Reduction {
  Method method = Method::Pairwise;
  EliminationResult elim;
  PropStore props;
  PropId formula{};  // encoding of F*
  PropId range{};    // bit-vector range constraints, true for pairwise
  std::optional<BitVecEncoding> bitvec;
  std::optional<PairwiseEncoding> pairwise;
  std::vector<TransitivityConstraint> transitivity;
  CnfInstance cnf;
  std::vector<int> cnfVar;  // DIMACS variable per propositional variable
};

inline Reduction reduce(ExprStore& s, ExprId root, Method method, bool transitivity = true) {
  if (method == Method::Oracle) throw std::invalid_argument("the oracle has no propositional reduction");
  Reduction r;
  r.method = method;
  ExprId nnf = to_nnf(s, root);
  PolarityReport report = classify(s, nnf);
  r.elim = eliminate_all(s, nnf, report);
  for (SymbolId f : symbols_in(s, r.elim.fStar))
    if (s.symbols[f].is_predicate()) r.props.var(s.symbols[f].name);

  if (method == Method::Bitvec) {
    r.bitvec = assign_encodings(r.props, r.elim.sigmaGStar, r.elim.sigmaPStar);
    r.formula = encode_bitvec(s, r.elim.fStar, *r.bitvec, r.props);
    r.range = r.bitvec->range;
  } else {
    r.pairwise = encode_pairwise(s, r.elim.fStar, r.elim.sigmaGStar, r.elim.sigmaPStar, r.props);
    r.formula = r.pairwise->formula;
    r.range = r.props.mk_true();
    if (transitivity) r.transitivity = transitivity_constraints(*r.pairwise, r.props);
  }
  TseitinBuilder builder(r.props);
  for (std::uint32_t x = 0; x < r.props.num_vars(); ++x) r.cnfVar.push_back(builder.var_of(x));
  builder.assert_formula(r.range);
  builder.assert_formula(r.props.mk_not(r.formula));
  for (const TransitivityConstraint& t : r.transitivity)
    builder.add_clause({{t.a, false}, {t.b, false}, {t.c, true}}, ClauseOrigin::Transitivity);
  r.cnf = builder.take();
  return r;
}

namespace detail {

inline Countermodel make_countermodel(const ExprStore& s, ExprId root, Interpretation i) {
  Countermodel cm;
  cm.replayed = !Evaluator(s, i).truth(root);
  cm.blocks = value_blocks(s, root, i);
  cm.interpretation = std::move(i);
  return cm;
}

inline void set_props(const ExprStore& s, ExprId fStar, const PropStore& props, const std::vector<char>& a,
                      Interpretation& out) {
  for (SymbolId f : symbols_in(s, fStar)) {
    const Symbol& sym = s.symbols[f];
    if (!sym.is_predicate()) continue;
    if (auto p = props.find_var(sym.name)) out.set(sym.name, prop_eval(props, *p, a) ? 1 : 0);
  }
}

// Interpretation of F*'s variables read off a satisfying assignment.
inline Interpretation fstar_model(const ExprStore& s, const Reduction& r, const std::vector<char>& model) {
  std::vector<char> a(r.props.num_vars(), 0);
  for (std::size_t x = 0; x < r.cnfVar.size(); ++x) a[x] = model[r.cnfVar[x]];
  Interpretation out;
  if (r.bitvec) {
    for (auto& [sym, bits] : r.bitvec->bits) out.set(s.symbols[sym].name, decode_bits(r.props, bits, a));
  } else {
    const PairwiseEncoding& enc = *r.pairwise;
    std::vector<std::size_t> parent(enc.N + 1);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (auto& [key, p] : enc.eVars)
      if (prop_eval(r.props, p, a)) {
        std::size_t x = find(key.first), y = find(key.second);
        parent[std::max(x, y)] = std::min(x, y);
      }
    for (std::size_t i = 1; i <= enc.N; ++i)
      out.set(s.symbols[enc.vars[i - 1]].name, static_cast<Value>(find(i) - 1));
    for (std::size_t j = 1; j <= enc.M; ++j)
      out.set(s.symbols[enc.vars[enc.N + j - 1]].name, static_cast<Value>(enc.N + j - 1));
  }
  set_props(s, r.elim.fStar, r.props, a, out);
  return out;
}

}  // namespace detail

// NNF, classification, elimination, encoding and a satisfiability check of the
// negation; or the enumeration oracle.
inline Verdict decide_validity(ExprStore& s, ExprId root, const DecideOptions& opt = {}) {
  auto start = std::chrono::steady_clock::now();
  Verdict v;
  v.method = opt.method;
  auto finish = [&] {
    v.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return v;
  };

  if (opt.method == Method::Oracle) {
    std::size_t nTerms = function_application_terms(s, root).size();
    std::optional<PartitionAssignment> witness;
    if (nTerms <= opt.oracle.guard) {
      OracleReport rep = oracle_report(s, root, opt.oracle);
      v.valid = rep.validAll;
      v.restriction = Restriction::All;
      v.counts = rep.counts;
      witness = rep.witness;
    } else {
      OracleResult r = oracle_validity(s, root, Restriction::MaximallyDiverse, opt.oracle);
      v.valid = r.valid;
      v.restriction = Restriction::MaximallyDiverse;
      v.counts = r.counts;
      witness = r.witness;
    }
    if (witness) v.countermodel = detail::make_countermodel(s, root, witness->interpretation);
    return finish();
  }

  Reduction r = reduce(s, root, opt.method, opt.transitivity);
  v.gVars = r.elim.sigmaGStar.size();
  v.pVars = r.elim.sigmaPStar.size();
  if (r.pairwise) {
    v.eVars = r.pairwise->eVars.size();
    v.eVarsUsed = r.pairwise->usedEVars;
    v.constraintCount = r.transitivity.size();
  }
  v.propositionalVars = r.props.num_vars();
  v.cnfVars = static_cast<std::size_t>(r.cnf.numVars);
  v.cnfClauses = r.cnf.clauses.size();
  SolveOutcome out = solve(r.cnf);
  v.stats = out.stats;
  v.valid = out.result == SatResult::Unsat;
  if (!v.valid)
    v.countermodel =
        detail::make_countermodel(s, root, lift_interpretation(s, root, r.elim, detail::fstar_model(s, r, out.model)));
  return finish();
}

inline Verdict decide_validity(ExprStore& s, ExprId root, Method m) {
  DecideOptions o;
  o.method = m;
  return decide_validity(s, root, o);
}

}  // namespace peuf
