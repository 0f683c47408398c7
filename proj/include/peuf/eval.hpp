#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "peuf/expr.hpp"

namespace peuf {

using Value = long;
using Tuple = std::vector<Value>;

// A total table: explicit entries plus a value for every other tuple.
struct Table {
  std::map<Tuple, Value> entries;
  Value otherwise = 0;

  Value at(const Tuple& t) const {
    auto it = entries.find(t);
    return it == entries.end() ? otherwise : it->second;
  }
};

// Tables are keyed by symbol name so an interpretation can be replayed on any
// store that uses the same names. Order-0 symbols use the empty tuple; formula
// positions and predicate results are 0/1.
struct Interpretation {
  std::map<std::string, Table> tables;

  bool has(const std::string& name) const { return tables.count(name) != 0; }
  void set(const std::string& name, const Tuple& args, Value v) { tables[name].entries[args] = v; }
  void set(const std::string& name, Value v) { set(name, {}, v); }
  Value get(const std::string& name, const Tuple& args = {}) const {
    auto it = tables.find(name);
    if (it == tables.end()) throw std::out_of_range("no table for symbol '" + name + "'");
    return it->second.at(args);
  }
};

// Memoized valuation over node ids.
class Evaluator {
 public:
  Evaluator(const ExprStore& s, const Interpretation& i) : s_(s), i_(i), memo_(s.size()) {}

  Value operator()(ExprId root) {
    if (memo_.size() < s_.size()) memo_.resize(s_.size());
    if (memo_[idx(root)]) return *memo_[idx(root)];
    for (ExprId e : postorder(s_, root))
      if (!memo_[idx(e)]) memo_[idx(e)] = compute(e);
    return *memo_[idx(root)];
  }

  bool truth(ExprId f) { return (*this)(f) != 0; }

 private:
  Value compute(ExprId e) {
    const Node& n = s_.node(e);
    auto v = [&](std::size_t k) { return *memo_[idx(n.args[k])]; };
    switch (n.kind) {
      case Kind::True: return 1;
      case Kind::False: return 0;
      case Kind::Not: return v(0) ? 0 : 1;
      case Kind::And: return (v(0) && v(1)) ? 1 : 0;
      case Kind::Or: return (v(0) || v(1)) ? 1 : 0;
      case Kind::Eq: return v(0) == v(1) ? 1 : 0;
      case Kind::Ite: return v(0) ? v(1) : v(2);
      case Kind::FuncApp:
      case Kind::PredApp: {
        Tuple args;
        for (std::size_t k = 0; k < n.args.size(); ++k) args.push_back(v(k));
        Value r = i_.get(s_.symbols[n.sym].name, args);
        return n.kind == Kind::PredApp ? (r ? 1 : 0) : r;
      }
    }
    return 0;
  }

  const ExprStore& s_;
  const Interpretation& i_;
  std::vector<std::optional<Value>> memo_;
};

inline Value evaluate(const ExprStore& s, ExprId e, const Interpretation& i) { return Evaluator(s, i)(e); }

}  // namespace peuf
