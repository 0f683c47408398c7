#pragma once

#include <algorithm>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "peuf/expr.hpp"
#include "peuf/polarity.hpp"

namespace peuf {

// One eliminated symbol: T_1..T_n in index order, their transformed arguments,
// the fresh variables and the replacement terms (or formulas for predicates).
struct SymbolTrace {
  SymbolId symbol = kNoSymbol;
  bool predicate = false;
  Polarity polarity = Polarity::Unclassified;
  std::vector<ExprId> terms;
  std::vector<std::vector<ExprId>> hatArgs;
  std::vector<SymbolId> fresh;
  std::vector<ExprId> freshNodes;
  std::vector<ExprId> replacements;
};

struct EliminationResult {
  ExprId fStar{};
  std::vector<SymbolId> sigmaPStar;
  std::vector<SymbolId> sigmaGStar;
  std::vector<SymbolTrace> trace;
};

// Index order of the applications of `f` below `root`: by nesting depth of f,
// then by first occurrence. An application nested in another gets a smaller index.
inline std::vector<ExprId> application_order(const ExprStore& s, ExprId root, SymbolId f) {
  std::vector<ExprId> nodes = postorder(s, root);
  std::unordered_map<std::uint32_t, std::size_t> depth, pos;
  std::vector<ExprId> apps;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Node& n = s.node(nodes[i]);
    std::size_t d = 0;
    for (ExprId c : n.args) d = std::max(d, depth[idx(c)]);
    bool isF = (n.kind == Kind::FuncApp || n.kind == Kind::PredApp) && n.sym == f;
    if (isF) {
      ++d;
      apps.push_back(nodes[i]);
    }
    depth[idx(nodes[i])] = d;
    pos[idx(nodes[i])] = i;
  }
  std::stable_sort(apps.begin(), apps.end(), [&](ExprId a, ExprId b) {
    if (depth[idx(a)] != depth[idx(b)]) return depth[idx(a)] < depth[idx(b)];
    return pos[idx(a)] < pos[idx(b)];
  });
  return apps;
}

// Highest index of an f-application occurring in `e`; 0 if none.
inline std::size_t f_order(const ExprStore& s, ExprId e, const std::vector<ExprId>& ordering) {
  std::unordered_map<std::uint32_t, std::size_t> index;
  for (std::size_t i = 0; i < ordering.size(); ++i) index[idx(ordering[i])] = i + 1;
  std::size_t best = 0;
  for (ExprId x : postorder(s, e))
    if (auto it = index.find(idx(x)); it != index.end()) best = std::max(best, it->second);
  return best;
}

namespace detail {

inline ExprId arg_equal(ExprStore& s, ExprId a, ExprId b) {
  return s.is_formula(a) ? s.mk_iff(a, b) : s.mk_eq(a, b);
}

inline ExprId args_match(ExprStore& s, const std::vector<ExprId>& a, const std::vector<ExprId>& b) {
  std::vector<ExprId> eqs;
  for (std::size_t l = 0; l < a.size(); ++l) eqs.push_back(arg_equal(s, a[l], b[l]));
  return s.mk_and(eqs);
}

// Bottom-up rewriting with a memo shared across calls; applications of the
// eliminated symbol must already be in the memo when reached.
class Rewriter {
 public:
  explicit Rewriter(ExprStore& s) : s_(s) {}

  void set(ExprId from, ExprId to) { memo_[idx(from)] = to; }

  ExprId operator()(ExprId root) {
    if (auto it = memo_.find(idx(root)); it != memo_.end()) return it->second;
    std::vector<std::pair<ExprId, std::size_t>> stack{{root, 0}};
    while (!stack.empty()) {
      auto [e, i] = stack.back();
      const std::vector<ExprId> args = s_.node(e).args;
      if (i < args.size()) {
        ++stack.back().second;
        if (!memo_.count(idx(args[i]))) stack.emplace_back(args[i], 0);
        continue;
      }
      stack.pop_back();
      if (memo_.count(idx(e))) continue;
      std::vector<ExprId> mapped;
      for (ExprId c : args) mapped.push_back(memo_.at(idx(c)));
      memo_[idx(e)] = s_.rebuild(e, std::move(mapped));
    }
    return memo_.at(idx(root));
  }

 private:
  ExprStore& s_;
  std::unordered_map<std::uint32_t, ExprId> memo_;
};

}  // namespace detail

// Replaces every application of `f` below `root` by its nested-ITE term.
inline std::pair<ExprId, SymbolTrace> eliminate_symbol(ExprStore& s, ExprId root, SymbolId f) {
  SymbolTrace t;
  t.symbol = f;
  t.predicate = s.symbols[f].is_predicate();
  t.polarity = s.symbols[f].polarity;
  if (s.symbols[f].order() == 0) return {root, t};
  t.terms = application_order(s, root, f);
  const std::string base = "v" + s.symbols[f].name + "_";
  for (std::size_t i = 0; i < t.terms.size(); ++i) {
    std::string name = s.symbols.fresh_name(base + std::to_string(i + 1));
    ExprId v = t.predicate ? s.mk_prop(name) : s.mk_var(name);
    t.fresh.push_back(s.node(v).sym);
    t.freshNodes.push_back(v);
  }
  detail::Rewriter rw(s);
  for (std::size_t i = 0; i < t.terms.size(); ++i) {
    std::vector<ExprId> hat;
    for (ExprId a : std::vector<ExprId>(s.node(t.terms[i]).args)) hat.push_back(rw(a));
    t.hatArgs.push_back(hat);
    ExprId u = t.freshNodes[i];
    for (std::size_t j = i; j-- > 0;) {
      ExprId c = detail::args_match(s, t.hatArgs[i], t.hatArgs[j]);
      if (t.predicate)
        u = s.mk_or(s.mk_and(c, t.freshNodes[j]), s.mk_and(s.mk_not(c), u));
      else
        u = s.mk_ite(c, t.freshNodes[j], u);
    }
    t.replacements.push_back(u);
    rw.set(t.terms[i], u);
  }
  return {rw(root), t};
}

// Eliminates all nonzero-order symbols: functions first, then predicates.
inline EliminationResult eliminate_all(ExprStore& s, ExprId f, const PolarityReport& report) {
  EliminationResult r;
  std::vector<SymbolId> order, vars;
  for (SymbolId sym : symbols_in(s, f)) {
    const Symbol& x = s.symbols[sym];
    if (x.is_function() && x.order() == 0) vars.push_back(sym);
    if (x.is_function() && x.order() > 0) order.push_back(sym);
  }
  for (SymbolId sym : symbols_in(s, f))
    if (s.symbols[sym].is_predicate() && s.symbols[sym].order() > 0) order.push_back(sym);

  std::vector<SymbolId> p, g;
  for (SymbolId v : vars) (report.is_g(v) ? g : p).push_back(v);
  ExprId cur = f;
  for (SymbolId sym : order) {
    auto [next, t] = eliminate_symbol(s, cur, sym);
    t.polarity = report.is_g(sym) ? Polarity::G : report.is_p(sym) ? Polarity::P : Polarity::Unclassified;
    if (!t.predicate)
      for (SymbolId v : t.fresh) (report.is_g(sym) ? g : p).push_back(v);
    for (SymbolId v : t.fresh)
      s.symbols.at(v).polarity = t.predicate ? Polarity::Unclassified : t.polarity;
    r.trace.push_back(std::move(t));
    cur = next;
  }
  r.fStar = cur;
  std::unordered_set<std::uint32_t> present;
  for (SymbolId sym : symbols_in(s, cur)) present.insert(idx(sym));
  for (SymbolId v : g)
    if (present.count(idx(v))) r.sigmaGStar.push_back(v);
  for (SymbolId v : p)
    if (present.count(idx(v))) r.sigmaPStar.push_back(v);
  return r;
}

struct AckermannResult {
  ExprId formula{};      // constraints => body
  ExprId body{};         // applications replaced by fresh variables
  ExprId constraints{};  // conjunction of consistency implications
  std::vector<SymbolTrace> trace;
};

// Fresh variable per application; pairwise consistency constraints are
// conjoined as an antecedent.
inline AckermannResult ackermann_eliminate(ExprStore& s, ExprId f) {
  AckermannResult r;
  std::vector<SymbolId> order;
  for (SymbolId sym : symbols_in(s, f))
    if (s.symbols[sym].is_function() && s.symbols[sym].order() > 0) order.push_back(sym);
  for (SymbolId sym : symbols_in(s, f))
    if (s.symbols[sym].is_predicate() && s.symbols[sym].order() > 0) order.push_back(sym);

  std::vector<ExprId> constraints;
  ExprId cur = f;
  for (SymbolId sym : order) {
    SymbolTrace t;
    t.symbol = sym;
    t.predicate = s.symbols[sym].is_predicate();
    std::vector<ExprId> scope{cur};
    scope.insert(scope.end(), constraints.begin(), constraints.end());
    t.terms = application_order(s, scope.size() == 1 ? cur : s.mk_and(scope), sym);
    const std::string base = "v" + s.symbols[sym].name + "_";
    detail::Rewriter rw(s);
    for (std::size_t i = 0; i < t.terms.size(); ++i) {
      std::string name = s.symbols.fresh_name(base + std::to_string(i + 1));
      ExprId v = t.predicate ? s.mk_prop(name) : s.mk_var(name);
      t.fresh.push_back(s.node(v).sym);
      t.freshNodes.push_back(v);
    }
    for (std::size_t i = 0; i < t.terms.size(); ++i) {
      std::vector<ExprId> hat;
      for (ExprId a : std::vector<ExprId>(s.node(t.terms[i]).args)) hat.push_back(rw(a));
      t.hatArgs.push_back(hat);
      t.replacements.push_back(t.freshNodes[i]);
      rw.set(t.terms[i], t.freshNodes[i]);
    }
    // Constraints from earlier symbols may still contain applications of this one.
    for (ExprId& c : constraints) c = rw(c);
    for (std::size_t i = 0; i < t.terms.size(); ++i)
      for (std::size_t j = i + 1; j < t.terms.size(); ++j)
        constraints.push_back(s.mk_implies(detail::args_match(s, t.hatArgs[i], t.hatArgs[j]),
                                           detail::arg_equal(s, t.freshNodes[i], t.freshNodes[j])));
    cur = rw(cur);
    r.trace.push_back(std::move(t));
  }
  r.body = cur;
  r.constraints = s.mk_and(constraints);
  r.formula = constraints.empty() ? cur : s.mk_implies(r.constraints, cur);
  return r;
}

}  // namespace peuf
