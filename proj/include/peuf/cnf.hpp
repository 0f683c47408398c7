#pragma once

#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "peuf/prop.hpp"

namespace peuf {

enum class ClauseOrigin : std::uint8_t { Formula, Definition, Transitivity, Other };

using Clause = std::vector<int>;

struct CnfInstance {
  int numVars = 0;
  std::vector<Clause> clauses;
  std::vector<ClauseOrigin> provenance;
  std::vector<std::string> names;  // names[v-1]; empty for definition variables

  int new_var(const std::string& name = "") {
    names.push_back(name);
    return ++numVars;
  }
  void add(Clause c, ClauseOrigin o) {
    clauses.push_back(std::move(c));
    provenance.push_back(o);
  }
  std::size_t count(ClauseOrigin o) const {
    std::size_t n = 0;
    for (ClauseOrigin x : provenance) n += x == o;
    return n;
  }
};

// Structure-preserving clause form: one definition variable per internal node.
// Named propositional variables keep a stable mapping through `varOf`.
class TseitinBuilder {
 public:
  explicit TseitinBuilder(const PropStore& s) : s_(s) {}

  // Asserts `root` as true.
  void assert_formula(PropId root, ClauseOrigin origin = ClauseOrigin::Formula) {
    if (root == s_.mk_true()) return;
    if (root == s_.mk_false()) {
      cnf_.add({}, origin);
      return;
    }
    // Top-level conjunctions become separate assertions.
    const PropNode& n = s_.node(root);
    if (n.kind == PKind::And) {
      assert_formula(n.a, origin);
      assert_formula(n.b, origin);
      return;
    }
    if (n.kind == PKind::Or) {
      Clause c;
      if (collect_or(root, c)) {
        cnf_.add(std::move(c), origin);
        return;
      }
    }
    cnf_.add({lit(root)}, origin);
  }

  // Adds a clause over named variables directly.
  void add_clause(const std::vector<std::pair<PropId, bool>>& lits, ClauseOrigin origin) {
    Clause c;
    for (auto [p, positive] : lits) c.push_back(positive ? lit(p) : -lit(p));
    cnf_.add(std::move(c), origin);
  }

  // DIMACS variable of a propositional variable index, created on demand.
  int var_of(std::uint32_t v) {
    if (auto it = varMap_.find(v); it != varMap_.end()) return it->second;
    int d = cnf_.new_var(s_.var_name(v));
    varMap_.emplace(v, d);
    return d;
  }
  const std::unordered_map<std::uint32_t, int>& var_map() const { return varMap_; }

  const CnfInstance& cnf() const { return cnf_; }
  CnfInstance take() { return std::move(cnf_); }

  int lit(PropId root) {
    if (auto it = lit_.find(idx(root)); it != lit_.end()) return it->second;
    for (PropId p : prop_postorder(s_, {root})) {
      if (lit_.count(idx(p))) continue;
      const PropNode& n = s_.node(p);
      int l = 0;
      switch (n.kind) {
        case PKind::True:
        case PKind::False: {
          int t = const_true();
          l = n.kind == PKind::True ? t : -t;
          break;
        }
        case PKind::Var: l = var_of(n.var); break;
        case PKind::Not: l = -lit_.at(idx(n.a)); break;
        case PKind::And:
        case PKind::Or:
        case PKind::Iff: {
          int a = lit_.at(idx(n.a)), b = lit_.at(idx(n.b));
          int d = cnf_.new_var();
          auto def = ClauseOrigin::Definition;
          if (n.kind == PKind::And) {
            cnf_.add({-d, a}, def);
            cnf_.add({-d, b}, def);
            cnf_.add({d, -a, -b}, def);
          } else if (n.kind == PKind::Or) {
            cnf_.add({d, -a}, def);
            cnf_.add({d, -b}, def);
            cnf_.add({-d, a, b}, def);
          } else {
            cnf_.add({-d, -a, b}, def);
            cnf_.add({-d, a, -b}, def);
            cnf_.add({d, a, b}, def);
            cnf_.add({d, -a, -b}, def);
          }
          l = d;
          break;
        }
      }
      lit_.emplace(idx(p), l);
    }
    return lit_.at(idx(root));
  }

 private:
  bool collect_or(PropId p, Clause& out) {
    const PropNode& n = s_.node(p);
    if (n.kind == PKind::Or) return collect_or(n.a, out) && collect_or(n.b, out);
    out.push_back(lit(p));
    return true;
  }

  int const_true() {
    if (!trueVar_) {
      trueVar_ = cnf_.new_var();
      cnf_.add({trueVar_}, ClauseOrigin::Definition);
    }
    return trueVar_;
  }

  const PropStore& s_;
  CnfInstance cnf_;
  std::unordered_map<std::uint32_t, int> lit_;
  std::unordered_map<std::uint32_t, int> varMap_;
  int trueVar_ = 0;
};

inline CnfInstance to_cnf(const PropStore& s, PropId p) {
  TseitinBuilder b(s);
  for (std::uint32_t v : prop_vars(s, {p})) b.var_of(v);
  b.assert_formula(p);
  return b.take();
}

// DIMACS with `c var <n> <name>` lines for named variables and
// `c origin <clause> transitivity` lines for tagged clauses.
inline void write_dimacs(std::ostream& out, const CnfInstance& c) {
  for (int v = 1; v <= c.numVars; ++v)
    if (!c.names[v - 1].empty()) out << "c var " << v << ' ' << c.names[v - 1] << '\n';
  for (std::size_t i = 0; i < c.clauses.size(); ++i)
    if (c.provenance[i] == ClauseOrigin::Transitivity) out << "c origin " << i + 1 << " transitivity\n";
  out << "p cnf " << c.numVars << ' ' << c.clauses.size() << '\n';
  for (const Clause& cl : c.clauses) {
    for (int l : cl) out << l << ' ';
    out << "0\n";
  }
}

inline std::string to_dimacs(const CnfInstance& c) {
  std::ostringstream out;
  write_dimacs(out, c);
  return out.str();
}

class DimacsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline CnfInstance read_dimacs(std::istream& in) {
  CnfInstance c;
  std::unordered_map<int, std::string> names;
  std::unordered_map<std::size_t, bool> trans;
  std::string line;
  bool header = false;
  std::size_t expected = 0;
  Clause cur;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first == "c") {
      std::string tag;
      ls >> tag;
      if (tag == "var") {
        int v;
        std::string name;
        if (ls >> v >> name) names[v] = name;
      } else if (tag == "origin") {
        std::size_t i;
        std::string what;
        if (ls >> i >> what && what == "transitivity") trans[i] = true;
      }
      continue;
    }
    if (first == "p") {
      std::string fmt;
      long v = -1, n = -1;
      ls >> fmt >> v >> n;
      if (fmt != "cnf" || v < 0 || n < 0) throw DimacsError("line " + std::to_string(lineNo) + ": bad header");
      header = true;
      c.numVars = static_cast<int>(v);
      c.names.assign(v, "");
      expected = static_cast<std::size_t>(n);
      continue;
    }
    if (!header) throw DimacsError("line " + std::to_string(lineNo) + ": clause before header");
    std::istringstream all(line);
    long l;
    while (all >> l) {
      if (l == 0) {
        c.add(std::move(cur), ClauseOrigin::Formula);
        cur.clear();
      } else {
        if (std::labs(l) > c.numVars)
          throw DimacsError("line " + std::to_string(lineNo) + ": literal out of range");
        cur.push_back(static_cast<int>(l));
      }
    }
    if (!all.eof()) throw DimacsError("line " + std::to_string(lineNo) + ": bad literal");
  }
  if (!header) throw DimacsError("missing 'p cnf' header");
  if (!cur.empty()) throw DimacsError("last clause is not terminated by 0");
  if (c.clauses.size() != expected) throw DimacsError("clause count does not match header");
  for (auto& [v, name] : names)
    if (v >= 1 && v <= c.numVars) c.names[v - 1] = name;
  for (auto [i, t] : trans)
    if (i >= 1 && i <= c.provenance.size()) c.provenance[i - 1] = ClauseOrigin::Transitivity;
  return c;
}

}  // namespace peuf
