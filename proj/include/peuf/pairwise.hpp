#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "peuf/bitvec.hpp"
#include "peuf/expr.hpp"
#include "peuf/prop.hpp"

namespace peuf {

// Variables v_1..v_N are the g-variables and v_{N+1}..v_{N+M} the p-variables.
// e_{i,j} exists only for 1 <= i < j <= N.
struct PairwiseEncoding {
  std::size_t N = 0, M = 0;
  std::vector<SymbolId> vars;
  std::map<std::pair<std::size_t, std::size_t>, PropId> eVars;
  std::size_t usedEVars = 0;
  PropId formula{};
  // Per term node: (1-based index, condition) for every index whose condition is not false.
  std::unordered_map<std::uint32_t, std::vector<std::pair<std::size_t, PropId>>> selectors;

  PropId e(std::size_t i, std::size_t j) const {
    if (i == j) throw std::logic_error("e_{i,i} is the constant true");
    return eVars.at({std::min(i, j), std::max(i, j)});
  }
};

namespace detail {

inline PropId e_var(PairwiseEncoding& enc, PropStore& props, std::size_t i, std::size_t j) {
  if (i == j) return props.mk_true();
  auto key = std::make_pair(std::min(i, j), std::max(i, j));
  if (auto it = enc.eVars.find(key); it != enc.eVars.end()) return it->second;
  PropId v = props.fresh_var("e_" + std::to_string(key.first) + "_" + std::to_string(key.second));
  enc.eVars.emplace(key, v);
  return v;
}

}  // namespace detail

inline PairwiseEncoding encode_pairwise(const ExprStore& s, ExprId fStar, const std::vector<SymbolId>& sigmaG,
                                        const std::vector<SymbolId>& sigmaP, PropStore& props) {
  PairwiseEncoding enc;
  enc.N = sigmaG.size();
  enc.M = sigmaP.size();
  enc.vars = sigmaG;
  enc.vars.insert(enc.vars.end(), sigmaP.begin(), sigmaP.end());
  std::unordered_map<SymbolId, std::size_t> index;
  for (std::size_t i = 0; i < enc.vars.size(); ++i) index[enc.vars[i]] = i + 1;

  std::unordered_map<std::uint32_t, PropId> fv;
  auto& tv = enc.selectors;
  for (ExprId e : postorder(s, fStar)) {
    const Node& n = s.node(e);
    auto F = [&](std::size_t k) { return fv.at(idx(n.args[k])); };
    auto T = [&](std::size_t k) -> const std::vector<std::pair<std::size_t, PropId>>& {
      return tv.at(idx(n.args[k]));
    };
    switch (n.kind) {
      case Kind::True: fv[idx(e)] = props.mk_true(); break;
      case Kind::False: fv[idx(e)] = props.mk_false(); break;
      case Kind::Not: fv[idx(e)] = props.mk_not(F(0)); break;
      case Kind::And: fv[idx(e)] = props.mk_and(F(0), F(1)); break;
      case Kind::Or: fv[idx(e)] = props.mk_or(F(0), F(1)); break;
      case Kind::PredApp:
        if (!n.args.empty()) throw EncodingError("formula still contains predicate applications");
        fv[idx(e)] = props.var(s.symbols[n.sym].name);
        break;
      case Kind::FuncApp: {
        if (!n.args.empty()) throw EncodingError("formula still contains function applications");
        auto it = index.find(n.sym);
        if (it == index.end()) throw EncodingError("domain variable '" + s.symbols[n.sym].name + "' has no index");
        tv[idx(e)] = {{it->second, props.mk_true()}};
        break;
      }
      case Kind::Ite: {
        PropId g = F(0);
        PropId ng = props.mk_not(g);
        std::map<std::size_t, PropId> acc;
        for (auto [i, c] : T(1)) acc[i] = props.mk_and(g, c);
        for (auto [i, c] : T(2)) {
          PropId part = props.mk_and(ng, c);
          auto it = acc.find(i);
          acc[i] = it == acc.end() ? part : props.mk_or(it->second, part);
        }
        std::vector<std::pair<std::size_t, PropId>> out;
        for (auto [i, c] : acc)
          if (c != props.mk_false()) out.emplace_back(i, c);
        tv[idx(e)] = std::move(out);
        break;
      }
      case Kind::Eq: {
        PropId acc = props.mk_false();
        for (auto [i, a] : T(0)) {
          for (auto [j, b] : T(1)) {
            PropId both = props.mk_and(a, b);
            if (both == props.mk_false()) continue;
            if (i <= enc.N && j <= enc.N) acc = props.mk_or(acc, props.mk_and(both, detail::e_var(enc, props, i, j)));
            else if (i == j) acc = props.mk_or(acc, both);
          }
        }
        fv[idx(e)] = acc;
        break;
      }
    }
  }
  enc.formula = fv.at(idx(fStar));
  enc.usedEVars = enc.eVars.size();
  return enc;
}

// a ∧ b ⇒ c over e-variables.
struct TransitivityConstraint {
  PropId a, b, c;
};

// Completes every connected component of the used-pair graph and emits the
// three implications for each triple inside a component. May add e-variables.
inline std::vector<TransitivityConstraint> transitivity_constraints(PairwiseEncoding& enc, PropStore& props) {
  std::vector<std::size_t> parent(enc.N + 1);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (auto& [key, v] : enc.eVars) parent[find(key.first)] = find(key.second);
  std::map<std::size_t, std::vector<std::size_t>> comps;
  for (std::size_t i = 1; i <= enc.N; ++i) comps[find(i)].push_back(i);

  std::vector<TransitivityConstraint> out;
  for (auto& [root, members] : comps) {
    if (members.size() < 3) continue;
    for (std::size_t x = 0; x < members.size(); ++x)
      for (std::size_t y = x + 1; y < members.size(); ++y) detail::e_var(enc, props, members[x], members[y]);
    for (std::size_t x = 0; x < members.size(); ++x)
      for (std::size_t y = x + 1; y < members.size(); ++y)
        for (std::size_t z = y + 1; z < members.size(); ++z) {
          PropId ij = enc.e(members[x], members[y]);
          PropId jk = enc.e(members[y], members[z]);
          PropId ik = enc.e(members[x], members[z]);
          out.push_back({ij, jk, ik});
          out.push_back({ij, ik, jk});
          out.push_back({ik, jk, ij});
        }
  }
  return out;
}

inline PropId constraint_formula(PropStore& props, const TransitivityConstraint& t) {
  return props.mk_implies(props.mk_and(t.a, t.b), t.c);
}

// The unique index i with enct_i(term) true; 0 if none (which would be a bug).
inline std::size_t selector_of(const PairwiseEncoding& enc, const PropStore& props, ExprId term,
                               const std::vector<char>& assignment) {
  std::size_t found = 0;
  for (auto [i, c] : enc.selectors.at(idx(term)))
    if (prop_eval(props, c, assignment)) {
      if (found) throw std::logic_error("selector is not unique");
      found = i;
    }
  return found;
}

}  // namespace peuf
