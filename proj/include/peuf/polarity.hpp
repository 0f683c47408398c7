#pragma once

#include <algorithm>
#include <map>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "peuf/expr.hpp"

namespace peuf {

// Negation normal form: negations only directly above equations and predicate
// applications. Applies inside ITE controls and formula-valued arguments too.
class NnfConverter {
 public:
  explicit NnfConverter(ExprStore& s) : s_(s) {}

  ExprId formula(ExprId e, bool neg = false) {
    auto key = std::make_pair(idx(e), neg);
    if (auto it = fmemo_.find(key); it != fmemo_.end()) return it->second;
    const Node n = s_.node(e);
    ExprId r{};
    switch (n.kind) {
      case Kind::True: r = s_.mk_bool(!neg); break;
      case Kind::False: r = s_.mk_bool(neg); break;
      case Kind::Not: r = formula(n.args[0], !neg); break;
      case Kind::And:
      case Kind::Or: {
        ExprId a = formula(n.args[0], neg);
        ExprId b = formula(n.args[1], neg);
        r = (n.kind == Kind::And) != neg ? s_.mk_and(a, b) : s_.mk_or(a, b);
        break;
      }
      case Kind::Eq:
      case Kind::PredApp: {
        ExprId atom = s_.rebuild(e, children(n));
        r = neg ? s_.mk_not(atom) : atom;
        break;
      }
      default: throw KindError("NNF expects a formula");
    }
    fmemo_.emplace(key, r);
    return r;
  }

  ExprId term(ExprId e) {
    if (auto it = tmemo_.find(idx(e)); it != tmemo_.end()) return it->second;
    const Node n = s_.node(e);
    ExprId r = s_.rebuild(e, children(n));
    tmemo_.emplace(idx(e), r);
    return r;
  }

 private:
  std::vector<ExprId> children(const Node& n) {
    std::vector<ExprId> out;
    for (ExprId c : n.args) out.push_back(s_.is_formula(c) ? formula(c) : term(c));
    return out;
  }

  ExprStore& s_;
  std::map<std::pair<std::uint32_t, bool>, ExprId> fmemo_;
  std::unordered_map<std::uint32_t, ExprId> tmemo_;
};

inline ExprId to_nnf(ExprStore& s, ExprId f) { return NnfConverter(s).formula(f); }

inline bool is_nnf(const ExprStore& s, ExprId f) {
  for (ExprId e : postorder(s, f)) {
    const Node& n = s.node(e);
    if (n.kind == Kind::Not) {
      Kind c = s.node(n.args[0]).kind;
      if (c != Kind::Eq && c != Kind::PredApp) return false;
    }
  }
  return true;
}

struct PolarityReport {
  std::vector<ExprId> negFormulas;  // sorted by id
  std::vector<ExprId> negTerms;     // sorted by id
  std::vector<SymbolId> gFuncs;     // first-occurrence order
  std::vector<SymbolId> pFuncs;

  bool is_g(SymbolId f) const { return std::find(gFuncs.begin(), gFuncs.end(), f) != gFuncs.end(); }
  bool is_p(SymbolId f) const { return std::find(pFuncs.begin(), pFuncs.end(), f) != pFuncs.end(); }
};

// Least sets closed under the negative-formula and negative-term rules.
// Formula-valued application arguments are seeded like ITE controls.
inline PolarityReport negative_sets(const ExprStore& s, ExprId f) {
  std::vector<ExprId> nodes = postorder(s, f);
  std::unordered_set<std::uint32_t> phi, theta;
  std::vector<ExprId> fwork, twork;
  auto addF = [&](ExprId e) {
    if (phi.insert(idx(e)).second) fwork.push_back(e);
  };
  auto addT = [&](ExprId e) {
    if (theta.insert(idx(e)).second) twork.push_back(e);
  };
  for (ExprId e : nodes) {
    const Node& n = s.node(e);
    if (n.kind == Kind::Not) addF(n.args[0]);
    if (n.kind == Kind::Ite) addF(n.args[0]);
    if (n.kind == Kind::FuncApp || n.kind == Kind::PredApp)
      for (ExprId a : n.args)
        if (s.is_formula(a)) addF(a);
  }
  while (!fwork.empty() || !twork.empty()) {
    if (!fwork.empty()) {
      ExprId e = fwork.back();
      fwork.pop_back();
      const Node& n = s.node(e);
      if (n.kind == Kind::And || n.kind == Kind::Or) {
        addF(n.args[0]);
        addF(n.args[1]);
      } else if (n.kind == Kind::Eq) {
        addT(n.args[0]);
        addT(n.args[1]);
      }
    } else {
      ExprId e = twork.back();
      twork.pop_back();
      const Node& n = s.node(e);
      if (n.kind == Kind::Ite) {
        addT(n.args[1]);
        addT(n.args[2]);
      }
    }
  }
  PolarityReport r;
  for (ExprId e : nodes) {
    if (phi.count(idx(e))) r.negFormulas.push_back(e);
    if (theta.count(idx(e))) r.negTerms.push_back(e);
  }
  std::sort(r.negFormulas.begin(), r.negFormulas.end());
  std::sort(r.negTerms.begin(), r.negTerms.end());
  std::unordered_set<std::uint32_t> g;
  for (ExprId e : r.negTerms)
    if (s.node(e).kind == Kind::FuncApp) g.insert(idx(s.node(e).sym));
  for (SymbolId sym : symbols_in(s, f)) {
    if (!s.symbols[sym].is_function()) continue;
    (g.count(idx(sym)) ? r.gFuncs : r.pFuncs).push_back(sym);
  }
  return r;
}

// Recursive-descent acceptance of `f` as a p-formula under the given split of
// function symbols. Formula-valued application arguments must be g-formulas.
inline bool peuf_accepts(const ExprStore& s, ExprId f, const PolarityReport& r) {
  std::unordered_set<std::uint32_t> g;
  for (SymbolId x : r.gFuncs) g.insert(idx(x));
  struct Cls {
    bool g = false, p = false;
  };
  std::vector<Cls> c(s.size());
  for (ExprId e : postorder(s, f)) {
    const Node& n = s.node(e);
    auto at = [&](std::size_t k) { return c[idx(n.args[k])]; };
    Cls& out = c[idx(e)];
    switch (n.kind) {
      case Kind::True:
      case Kind::False: out.g = true; break;
      case Kind::Not: out.g = at(0).g; break;
      case Kind::And:
      case Kind::Or:
        out.g = at(0).g && at(1).g;
        out.p = at(0).p && at(1).p;
        break;
      case Kind::Eq:
        out.g = at(0).g && at(1).g;
        out.p = at(0).p && at(1).p;
        break;
      case Kind::Ite:
        out.g = at(0).g && at(1).g && at(2).g;
        out.p = at(0).g && at(1).p && at(2).p;
        break;
      case Kind::FuncApp:
      case Kind::PredApp: {
        bool ok = true;
        for (std::size_t k = 0; k < n.args.size(); ++k)
          ok = ok && (s.is_formula(n.args[k]) ? at(k).g : at(k).p);
        if (n.kind == Kind::PredApp) out.g = ok;
        else if (g.count(idx(n.sym))) out.g = ok;
        else out.p = ok;
        break;
      }
    }
    out.p = out.p || out.g;
  }
  return c[idx(f)].p;
}

class PolarityError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Classifies function symbols of an NNF formula and records the result in the
// symbol table.
inline PolarityReport classify(ExprStore& s, ExprId f) {
  if (!is_nnf(s, f)) throw std::invalid_argument("classify expects a formula in negation normal form");
  PolarityReport r = negative_sets(s, f);
  for (SymbolId x : r.gFuncs) s.symbols.at(x).polarity = Polarity::G;
  for (SymbolId x : r.pFuncs) s.symbols.at(x).polarity = Polarity::P;
  if (!peuf_accepts(s, f, r)) throw PolarityError("PEUF grammar check rejected the classified formula");
  return r;
}

}  // namespace peuf
