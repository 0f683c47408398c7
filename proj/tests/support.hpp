#pragma once

// Reference implementations used only by the tests. They share no code with
// the library beyond the expression store and the evaluator.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "peuf/peuf.hpp"

namespace testing_support {

using namespace peuf;

inline constexpr const char* kExample = "(or (not (= x y)) (= (h (g x) (g (g x))) (h (g y) (g (g x)))))";

// Every set partition of {0..n-1} as a block-label vector, by plain recursion.
inline void partitions(std::size_t n, const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> label(n, 0);
  std::function<void(std::size_t, int)> go = [&](std::size_t i, int blocks) {
    if (i == n) {
      visit(label);
      return;
    }
    for (int b = 0; b <= blocks; ++b) {
      label[i] = b;
      go(i + 1, std::max(blocks, b + 1));
    }
  };
  if (n == 0) visit(label);
  else go(0, 0);
}

// Application terms (function applications, order 0 included) in id order.
inline std::vector<ExprId> app_terms(const ExprStore& s, ExprId root) {
  std::vector<ExprId> out;
  for (ExprId e : postorder(s, root))
    if (s.node(e).kind == Kind::FuncApp) out.push_back(e);
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<ExprId> pred_terms(const ExprStore& s, ExprId root) {
  std::vector<ExprId> out;
  for (ExprId e : postorder(s, root))
    if (s.node(e).kind == Kind::PredApp) out.push_back(e);
  std::sort(out.begin(), out.end());
  return out;
}

// Congruence check of a partition of the application terms: applications of
// one symbol whose term arguments share blocks must share a block. Formula
// arguments are not considered, so this is only used on formulas without them.
inline bool congruent(const ExprStore& s, const std::vector<ExprId>& terms, const std::vector<int>& label) {
  std::map<std::uint32_t, int> block;
  for (std::size_t k = 0; k < terms.size(); ++k) block[idx(terms[k])] = label[k];
  auto argsEqual = [&](const Node& a, const Node& b) {
    for (std::size_t i = 0; i < a.args.size(); ++i)
      if (block.at(idx(a.args[i])) != block.at(idx(b.args[i]))) return false;
    return true;
  };
  for (std::size_t i = 0; i < terms.size(); ++i)
    for (std::size_t j = i + 1; j < terms.size(); ++j) {
      const Node& a = s.node(terms[i]);
      const Node& b = s.node(terms[j]);
      if (a.sym == b.sym && argsEqual(a, b) && label[i] != label[j]) return false;
    }
  return true;
}

// Counts for a predicate-free formula: raw partitions, congruent ones, and
// congruent ones in which every block holding an application of a symbol in
// `pSyms` contains only applications of that symbol with congruent arguments.
struct PartitionCounts {
  std::uint64_t raw = 0, consistent = 0, diverse = 0;
  bool validAll = true, validDiverse = true;
};

inline PartitionCounts count_partitions(const ExprStore& s, ExprId root, const std::set<std::string>& pSyms) {
  std::vector<ExprId> terms = app_terms(s, root);
  PartitionCounts c;
  partitions(terms.size(), [&](const std::vector<int>& label) {
    ++c.raw;
    if (!congruent(s, terms, label)) return;
    ++c.consistent;
    bool diverse = true;
    for (std::size_t i = 0; i < terms.size() && diverse; ++i) {
      const Node& a = s.node(terms[i]);
      if (!pSyms.count(s.symbols[a.sym].name)) continue;
      for (std::size_t j = 0; j < terms.size(); ++j) {
        if (i == j || label[i] != label[j]) continue;
        const Node& b = s.node(terms[j]);
        if (a.sym != b.sym) {
          diverse = false;
          break;
        }
        for (std::size_t k = 0; k < a.args.size(); ++k) {
          auto pos = [&](ExprId t) { return std::find(terms.begin(), terms.end(), t) - terms.begin(); };
          if (label[pos(a.args[k])] != label[pos(b.args[k])]) diverse = false;
        }
      }
    }
    c.diverse += diverse;
    Interpretation in;
    // Realize the partition: order-0 symbols get their block, other symbols
    // map argument blocks to the block of the application.
    for (std::size_t k = 0; k < terms.size(); ++k) {
      const Node& n = s.node(terms[k]);
      Tuple args;
      for (ExprId a : n.args)
        args.push_back(label[std::find(terms.begin(), terms.end(), a) - terms.begin()]);
      in.set(s.symbols[n.sym].name, args, label[k]);
    }
    bool value = Evaluator(s, in).truth(root);
    if (!value) {
      c.validAll = false;
      if (diverse) c.validDiverse = false;
    }
  });
  return c;
}

// Validity over all interpretations on the domain {0..d-1}, enumerating
// function tables lazily: an application whose argument tuple has not been
// seen branches over every value. Predicates branch over 0/1 the same way.
inline bool naive_valid_on_domain(const ExprStore& s, ExprId root, int d) {
  std::vector<ExprId> nodes = postorder(s, root);
  std::vector<ExprId> apps;
  for (ExprId e : nodes)
    if (s.node(e).kind == Kind::FuncApp || s.node(e).kind == Kind::PredApp) apps.push_back(e);
  Interpretation in;
  bool valid = true;
  std::function<void(std::size_t)> go = [&](std::size_t k) {
    if (!valid) return;
    if (k == apps.size()) {
      if (!Evaluator(s, in).truth(root)) valid = false;
      return;
    }
    const Node& n = s.node(apps[k]);
    const std::string& name = s.symbols[n.sym].name;
    Evaluator ev(s, in);
    Tuple args;
    for (ExprId a : n.args) args.push_back(ev(a));
    if (in.has(name) && in.tables.at(name).entries.count(args)) {
      go(k + 1);
      return;
    }
    int range = n.kind == Kind::PredApp ? 2 : d;
    for (int v = 0; v < range && valid; ++v) {
      in.set(name, args, v);
      go(k + 1);
      in.tables[name].entries.erase(args);
    }
  };
  go(0);
  return valid;
}

// Brute-force truth table over the variables of a propositional formula.
inline bool prop_satisfiable(const PropStore& p, PropId root, std::vector<char>* witness = nullptr) {
  std::size_t n = p.num_vars();
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
    std::vector<char> a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = (m >> i) & 1;
    if (prop_eval(p, root, a)) {
      if (witness) *witness = a;
      return true;
    }
  }
  return false;
}

inline bool cnf_satisfied(const CnfInstance& c, const std::vector<char>& model) {
  for (const Clause& cl : c.clauses) {
    bool sat = false;
    for (int l : cl) sat |= (l > 0) == static_cast<bool>(model[std::abs(l)]);
    if (!sat) return false;
  }
  return true;
}

inline bool cnf_brute_force(const CnfInstance& c) {
  std::vector<char> m(c.numVars + 1);
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << c.numVars); ++bits) {
    for (int v = 1; v <= c.numVars; ++v) m[v] = (bits >> (v - 1)) & 1;
    if (cnf_satisfied(c, m)) return true;
  }
  return false;
}

inline std::set<std::string> p_names(ExprStore& s, ExprId root) {
  PolarityReport r = classify(s, to_nnf(s, root));
  std::set<std::string> out;
  for (SymbolId f : r.pFuncs) out.insert(s.symbols[f].name);
  return out;
}

}  // namespace testing_support
