#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "peuf/expr.hpp"

namespace peuf {

struct RandomOptions {
  std::size_t maxSymbols = 3;  // function and predicate symbols besides the constants
  std::size_t maxArity = 2;
  std::size_t maxDepth = 5;
  std::size_t maxTerms = 10;   // distinct application terms, constants included
  double predicateRate = 0.2;
  double implicationRate = 0.6;
};

// Seeded generator of small EUF formulas. About `implicationRate` of the
// outputs have the shape (a1 = b1 ∧ ...) ⇒ conclusion, where the conclusion
// often applies one symbol to the equated sides, so valid and invalid
// formulas both occur.
class FormulaGenerator {
 public:
  explicit FormulaGenerator(std::uint64_t seed, RandomOptions opt = {}) : rng_(seed), opt_(opt) {}

  // Symbols are redrawn per call, so each formula needs its own store.
  ExprId next(ExprStore& s) {
    pick_signature();
    for (;;) {
      ExprId f = coin(opt_.implicationRate) ? implication(s) : formula(s, opt_.maxDepth);
      if (function_application_terms(s, f).size() <= opt_.maxTerms) return f;
    }
  }

 private:
  struct Sym {
    std::string name;
    std::size_t arity;
    bool predicate;
  };

  bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }
  std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

  void pick_signature() {
    static const char* kConsts[] = {"x", "y", "z"};
    static const char* kFuncs[] = {"f", "g", "h"};
    static const char* kPreds[] = {"p", "q", "r"};
    consts_.clear();
    funcs_.clear();
    preds_.clear();
    std::size_t nConst = 1 + below(3);
    for (std::size_t i = 0; i < nConst; ++i) consts_.push_back({kConsts[i], 0, false});
    std::size_t nSym = below(opt_.maxSymbols + 1);
    for (std::size_t i = 0; i < nSym; ++i) {
      std::size_t arity = opt_.maxArity == 0 ? 0 : 1 + below(opt_.maxArity);
      if (coin(opt_.predicateRate)) preds_.push_back({kPreds[preds_.size()], below(opt_.maxArity + 1), true});
      else funcs_.push_back({kFuncs[funcs_.size()], arity, false});
    }
  }

  ExprId term(ExprStore& s, std::size_t depth) {
    if (depth == 0 || funcs_.empty() || coin(0.35)) {
      const Sym& c = consts_[below(consts_.size())];
      return s.mk_var(c.name);
    }
    if (coin(0.1)) return s.mk_ite(formula(s, depth - 1), term(s, depth - 1), term(s, depth - 1));
    const Sym& f = funcs_[below(funcs_.size())];
    std::vector<ExprId> args;
    for (std::size_t i = 0; i < f.arity; ++i) args.push_back(term(s, depth - 1));
    return s.mk_app(f.name, args);
  }

  ExprId atom(ExprStore& s, std::size_t depth) {
    if (!preds_.empty() && coin(0.25)) {
      const Sym& p = preds_[below(preds_.size())];
      std::vector<ExprId> args;
      for (std::size_t i = 0; i < p.arity; ++i) args.push_back(term(s, depth));
      return s.mk_pred(p.name, args);
    }
    return s.mk_eq(term(s, depth), term(s, depth));
  }

  ExprId formula(ExprStore& s, std::size_t depth) {
    if (depth <= 1) return atom(s, 1);
    switch (below(5)) {
      case 0: return s.mk_not(formula(s, depth - 1));
      case 1: return s.mk_and(formula(s, depth - 1), formula(s, depth - 1));
      case 2: return s.mk_or(formula(s, depth - 1), formula(s, depth - 1));
      default: return atom(s, depth - 2);
    }
  }

  ExprId implication(ExprStore& s) {
    std::size_t depth = opt_.maxDepth >= 3 ? opt_.maxDepth - 3 : 0;
    std::vector<std::pair<ExprId, ExprId>> eqs;
    ExprId ante = s.mk_true();
    std::size_t n = 1 + below(2);
    for (std::size_t i = 0; i < n; ++i) {
      ExprId a = term(s, depth), b = term(s, depth);
      eqs.push_back({a, b});
      ExprId e = s.mk_eq(a, b);
      ante = i == 0 ? e : s.mk_and(ante, e);
    }
    ExprId concl;
    if (!coin(0.7) || (funcs_.empty() && preds_.empty())) {
      concl = atom(s, depth + 1);
    } else {
      // Apply one symbol to matching sides of the antecedent equations.
      bool usePred = !preds_.empty() && (funcs_.empty() || coin(0.3));
      const Sym& f = usePred ? preds_[below(preds_.size())] : funcs_[below(funcs_.size())];
      std::vector<ExprId> l, r;
      for (std::size_t i = 0; i < f.arity; ++i) {
        auto [a, b] = eqs[below(eqs.size())];
        if (coin(0.5)) std::swap(a, b);
        if (coin(0.15)) b = term(s, depth);
        l.push_back(a);
        r.push_back(b);
      }
      if (usePred) concl = s.mk_implies(s.mk_pred(f.name, l), s.mk_pred(f.name, r));
      else concl = s.mk_eq(s.mk_app(f.name, l), s.mk_app(f.name, r));
    }
    if (coin(0.2)) concl = s.mk_or(concl, atom(s, depth));
    return s.mk_implies(ante, concl);
  }

  std::mt19937_64 rng_;
  RandomOptions opt_;
  std::vector<Sym> consts_, funcs_, preds_;
};

}  // namespace peuf
