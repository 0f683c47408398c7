#pragma once

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "peuf/eval.hpp"
#include "peuf/expr.hpp"
#include "peuf/polarity.hpp"

namespace peuf {

enum class Restriction { All, MaximallyDiverse };

inline const char* restriction_name(Restriction r) {
  return r == Restriction::All ? "all" : "maximally-diverse";
}

class GuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// PEUF_ORACLE_GUARD overrides the default of 12 application terms.
inline std::size_t default_guard() {
  if (const char* env = std::getenv("PEUF_ORACLE_GUARD")) {
    char* end = nullptr;
    unsigned long v = std::strtoul(env, &end, 10);
    if (end && *end == '\0' && v > 0) return v;
  }
  return 12;
}

// Bell number, or nullopt when it does not fit in 64 bits.
inline std::optional<std::uint64_t> bell_number(std::size_t n) {
  std::vector<unsigned __int128> row{1};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<unsigned __int128> next{row.back()};
    for (auto x : row) next.push_back(next.back() + x);
    row = std::move(next);
  }
  if (row.front() > UINT64_MAX) return std::nullopt;
  return static_cast<std::uint64_t>(row.front());
}

// Calls `visit(rgs)` for every restricted-growth string of length n; a false
// return stops the enumeration.
inline void for_each_set_partition(std::size_t n, const std::function<bool(const std::vector<int>&)>& visit) {
  std::vector<int> a(n, 0), maxPrefix(n, 0);
  if (n == 0) {
    visit(a);
    return;
  }
  for (;;) {
    if (!visit(a)) return;
    std::size_t i = n;
    while (i-- > 1) {
      if (a[i] <= maxPrefix[i]) break;
    }
    if (i == 0) return;
    ++a[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      a[j] = 0;
      maxPrefix[j] = std::max(maxPrefix[j - 1], a[j - 1]);
    }
  }
}

struct OracleCounts {
  std::optional<std::uint64_t> rawPartitions;
  std::uint64_t consistent = 0;
  std::uint64_t maximallyDiverse = 0;
};

// One consistent combination of a partition of T(F) and a predicate assignment.
struct PartitionAssignment {
  std::vector<ExprId> terms;  // T(F)
  std::vector<int> block;     // block[k] for terms[k]
  bool maximallyDiverse = false;
  bool value = false;  // truth of the formula
  Interpretation interpretation;

  std::vector<std::vector<ExprId>> blocks() const {
    std::vector<std::vector<ExprId>> out;
    for (std::size_t k = 0; k < terms.size(); ++k) {
      if (static_cast<std::size_t>(block[k]) >= out.size()) out.resize(block[k] + 1);
      out[block[k]].push_back(terms[k]);
    }
    return out;
  }
};

struct OracleResult {
  bool valid = true;
  Restriction restriction = Restriction::All;
  OracleCounts counts;
  std::optional<PartitionAssignment> witness;
};

namespace detail {

// Depth-first walk over the nodes in id order. Terms either take a fixed
// block (exhaustive mode) or branch over the blocks that keep the partition
// functionally consistent; predicate classes branch on their truth value.
class PartitionSearch {
 public:
  using Leaf = std::function<bool(const PartitionSearch&, bool value, bool diverse)>;

  PartitionSearch(const ExprStore& s, ExprId root, std::vector<char> pSymbol)
      : s_(s), root_(root), pSymbol_(std::move(pSymbol)) {
    nodes_ = postorder(s, root);
    std::sort(nodes_.begin(), nodes_.end());
    pos_.assign(s.size(), -1);
    for (std::size_t i = 0; i < nodes_.size(); ++i) pos_[idx(nodes_[i])] = static_cast<int>(i);
    terms_ = function_application_terms(s, root);
    termIndex_.assign(s.size(), -1);
    for (std::size_t k = 0; k < terms_.size(); ++k) termIndex_[idx(terms_[k])] = static_cast<int>(k);
    val_.assign(nodes_.size(), 0);
  }

  const std::vector<ExprId>& terms() const { return terms_; }
  bool is_p(SymbolId f) const { return idx(f) < pSymbol_.size() && pSymbol_[idx(f)]; }

  // Runs the search; `fixed` gives a block per term or is empty for free mode.
  // Returns false if the leaf callback stopped it.
  bool run(const std::vector<int>* fixed, bool pruneDiverse, const Leaf& leaf) {
    fixed_ = fixed;
    prune_ = pruneDiverse;
    leaf_ = &leaf;
    funcs_.clear();
    preds_.clear();
    blockP_.clear();
    return go(0);
  }

  PartitionAssignment snapshot(bool value, bool diverse) const {
    PartitionAssignment a;
    a.terms = terms_;
    a.value = value;
    a.maximallyDiverse = diverse;
    for (ExprId t : terms_) a.block.push_back(static_cast<int>(val_[pos_[idx(t)]]));
    for (auto& [key, v] : funcs_) a.interpretation.set(s_.symbols[SymbolId{key.first}].name, key.second, v);
    for (auto& [key, v] : preds_) a.interpretation.set(s_.symbols[SymbolId{key.first}].name, key.second, v);
    return a;
  }

 private:
  using Key = std::pair<std::uint32_t, Tuple>;

  Tuple args_of(const Node& n) const {
    Tuple t;
    for (ExprId c : n.args) t.push_back(val_[pos_[idx(c)]]);
    return t;
  }

  bool diverse_now() const {
    // Every block holding a p-application may hold only applications of that
    // symbol with equal argument values.
    std::map<long, std::vector<const Node*>> byBlock;
    for (ExprId t : terms_) byBlock[val_[pos_[idx(t)]]].push_back(&s_.node(t));
    for (auto& [b, members] : byBlock) {
      const Node* pTerm = nullptr;
      for (const Node* n : members)
        if (is_p(n->sym)) pTerm = n;
      if (!pTerm) continue;
      Tuple pa = args_of(*pTerm);
      for (const Node* n : members)
        if (n->sym != pTerm->sym || args_of(*n) != pa) return false;
    }
    return true;
  }

  bool go(std::size_t i) {
    if (i == nodes_.size()) {
      bool value = val_[pos_[idx(root_)]] != 0;
      bool diverse = prune_ || diverse_now();
      return (*leaf_)(*this, value, diverse);
    }
    ExprId e = nodes_[i];
    const Node& n = s_.node(e);
    auto v = [&](std::size_t k) { return val_[pos_[idx(n.args[k])]]; };
    switch (n.kind) {
      case Kind::True: val_[i] = 1; return go(i + 1);
      case Kind::False: val_[i] = 0; return go(i + 1);
      case Kind::Not: val_[i] = !v(0); return go(i + 1);
      case Kind::And: val_[i] = v(0) && v(1); return go(i + 1);
      case Kind::Or: val_[i] = v(0) || v(1); return go(i + 1);
      case Kind::Eq: val_[i] = v(0) == v(1); return go(i + 1);
      case Kind::Ite: val_[i] = v(0) ? v(1) : v(2); return go(i + 1);
      case Kind::PredApp: {
        Key key{idx(n.sym), args_of(n)};
        if (auto it = preds_.find(key); it != preds_.end()) {
          val_[i] = it->second;
          return go(i + 1);
        }
        for (int b = 0; b < 2; ++b) {
          preds_[key] = b;
          val_[i] = b;
          bool more = go(i + 1);
          preds_.erase(key);
          if (!more) return false;
        }
        return true;
      }
      case Kind::FuncApp: {
        Key key{idx(n.sym), args_of(n)};
        auto it = funcs_.find(key);
        if (fixed_) {
          long b = (*fixed_)[termIndex_[idx(e)]];
          if (it != funcs_.end()) {
            if (it->second != b) return true;  // functionally inconsistent
            val_[i] = b;
            return go(i + 1);
          }
          funcs_.emplace(key, b);
          val_[i] = b;
          bool more = go(i + 1);
          funcs_.erase(key);
          return more;
        }
        if (it != funcs_.end()) {
          val_[i] = it->second;
          return go(i + 1);
        }
        bool p = is_p(n.sym);
        std::size_t open = blockP_.size();
        for (std::size_t b = 0; b <= open; ++b) {
          if (prune_ && b < open && (p || blockP_[b])) continue;
          if (b == open) blockP_.push_back(0);
          blockP_[b] += p;
          funcs_.emplace(key, static_cast<long>(b));
          val_[i] = static_cast<long>(b);
          bool more = go(i + 1);
          funcs_.erase(key);
          blockP_[b] -= p;
          if (b == open) blockP_.pop_back();
          if (!more) return false;
        }
        return true;
      }
    }
    return true;
  }

  const ExprStore& s_;
  ExprId root_;
  std::vector<char> pSymbol_;
  std::vector<ExprId> nodes_;
  std::vector<int> pos_;
  std::vector<ExprId> terms_;
  std::vector<int> termIndex_;
  std::vector<long> val_;
  std::map<Key, long> funcs_;
  std::map<Key, long> preds_;
  std::vector<int> blockP_;
  const std::vector<int>* fixed_ = nullptr;
  bool prune_ = false;
  const Leaf* leaf_ = nullptr;
};

inline std::vector<char> p_symbols(ExprStore& s, ExprId root) {
  PolarityReport r = classify(s, to_nnf(s, root));
  std::vector<char> out(s.symbols.size(), 0);
  for (SymbolId f : r.pFuncs) out[idx(f)] = 1;
  return out;
}

}  // namespace detail

struct OracleOptions {
  std::size_t guard = default_guard();
  // Stream every raw partition instead of only the consistent ones.
  bool exhaustive = false;
};

inline std::size_t g_term_count(const ExprStore& s, ExprId root, const std::vector<char>& pSymbol) {
  std::size_t n = 0;
  for (ExprId t : function_application_terms(s, root)) n += !pSymbol[idx(s.node(t).sym)];
  return n;
}

inline void check_guard(const ExprStore& s, ExprId root, Restriction r, const std::vector<char>& pSymbol,
                        std::size_t guard) {
  std::size_t all = function_application_terms(s, root).size();
  std::size_t n = r == Restriction::All ? all : g_term_count(s, root, pSymbol);
  if (n > guard)
    throw GuardError(std::to_string(n) + (r == Restriction::All ? " application terms" : " g-application terms") +
                     " exceed the oracle size guard of " + std::to_string(guard));
}

// Streams every functionally consistent combination; `visit` returning false stops.
inline OracleCounts enumerate_partitionings(ExprStore& s, ExprId root,
                                            const std::function<bool(const PartitionAssignment&)>& visit,
                                            const OracleOptions& opt = {}) {
  std::vector<char> pSym = detail::p_symbols(s, root);
  check_guard(s, root, Restriction::All, pSym, opt.guard);
  detail::PartitionSearch search(s, root, pSym);
  OracleCounts counts;
  detail::PartitionSearch::Leaf leaf = [&](const detail::PartitionSearch& ps, bool value, bool diverse) {
    ++counts.consistent;
    counts.maximallyDiverse += diverse;
    return visit(ps.snapshot(value, diverse));
  };
  if (opt.exhaustive) {
    std::uint64_t raw = 0;
    bool more = true;
    for_each_set_partition(search.terms().size(), [&](const std::vector<int>& rgs) {
      ++raw;
      more = search.run(&rgs, false, leaf);
      return more;
    });
    counts.rawPartitions = raw;
  } else {
    search.run(nullptr, false, leaf);
    counts.rawPartitions = bell_number(search.terms().size());
  }
  return counts;
}

// Partition counts for F together with validity under both restrictions.
struct OracleReport {
  OracleCounts counts;
  bool validAll = true;
  bool validDiverse = true;
  std::optional<PartitionAssignment> witness;
};

inline OracleReport oracle_report(ExprStore& s, ExprId root, const OracleOptions& opt = {}) {
  OracleReport r;
  r.counts = enumerate_partitionings(
      s, root,
      [&](const PartitionAssignment& a) {
        if (!a.value) {
          r.validAll = false;
          if (a.maximallyDiverse) r.validDiverse = false;
          if (!r.witness) r.witness = a;
        }
        return true;
      },
      opt);
  return r;
}

// Valid iff F holds under every (restricted) consistent combination.
inline OracleResult oracle_validity(ExprStore& s, ExprId root, Restriction restrict, const OracleOptions& opt = {}) {
  std::vector<char> pSym = detail::p_symbols(s, root);
  check_guard(s, root, restrict, pSym, opt.guard);
  detail::PartitionSearch search(s, root, pSym);
  OracleResult r;
  r.restriction = restrict;
  bool diverseOnly = restrict == Restriction::MaximallyDiverse;
  detail::PartitionSearch::Leaf leaf = [&](const detail::PartitionSearch& ps, bool value, bool diverse) {
    if (diverseOnly && !diverse) return true;
    ++r.counts.consistent;
    r.counts.maximallyDiverse += diverse;
    if (!value) {
      r.valid = false;
      r.witness = ps.snapshot(value, diverse);
      return false;
    }
    return true;
  };
  search.run(nullptr, diverseOnly, leaf);
  if (!diverseOnly) r.counts.rawPartitions = bell_number(search.terms().size());
  return r;
}

// Number of consistent predicate assignments for one fixed partition of T(F)
// (block per term in T(F) order); zero means the partition is inconsistent.
inline std::uint64_t consistent_assignments(ExprStore& s, ExprId root, const std::vector<int>& blocks) {
  std::vector<char> pSym = detail::p_symbols(s, root);
  detail::PartitionSearch search(s, root, pSym);
  if (blocks.size() != search.terms().size()) throw std::invalid_argument("one block per application term expected");
  std::uint64_t n = 0;
  detail::PartitionSearch::Leaf leaf = [&](const detail::PartitionSearch&, bool, bool) {
    ++n;
    return true;
  };
  search.run(&blocks, false, leaf);
  return n;
}

}  // namespace peuf
