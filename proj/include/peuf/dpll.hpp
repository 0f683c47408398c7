#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <vector>

#include "peuf/cnf.hpp"

namespace peuf {

enum class SatResult { Sat, Unsat };

struct SolverStats {
  std::uint64_t decisions = 0;
  std::uint64_t propagations = 0;
  std::uint64_t conflicts = 0;
  std::uint64_t learned = 0;
};

// DPLL search with two-watched-literal unit propagation, first-UIP clause
// learning and non-chronological backjumping. Decisions pick the most active
// unassigned variable; named variables start with a head start.
class DpllSolver {
 public:
  explicit DpllSolver(const CnfInstance& cnf) : n_(cnf.numVars) {
    value_.assign(n_ + 1, 0);
    level_.assign(n_ + 1, 0);
    reason_.assign(n_ + 1, kNoReason);
    phase_.assign(n_ + 1, 1);
    seen_.assign(n_ + 1, 0);
    activity_.assign(n_ + 1, 0.0);
    watches_.assign(2 * (n_ + 1), {});
    for (int v = 1; v <= n_; ++v)
      if (!cnf.names[v - 1].empty()) activity_[v] = 1.0;
    for (const Clause& c0 : cnf.clauses) {
      Clause c;
      for (int l : c0)
        if (std::find(c.begin(), c.end(), l) == c.end()) c.push_back(l);
      bool taut = false;
      for (int l : c) taut |= std::find(c.begin(), c.end(), -l) != c.end();
      if (taut) continue;
      if (c.empty()) {
        trivialUnsat_ = true;
        continue;
      }
      if (c.size() == 1) {
        units_.push_back(c[0]);
        continue;
      }
      attach(std::move(c));
    }
  }

  SatResult solve() {
    if (trivialUnsat_) return SatResult::Unsat;
    for (int l : units_) {
      if (val(l) == -1) return SatResult::Unsat;
      if (val(l) == 0) assign(l, kNoReason);
    }
    for (;;) {
      std::size_t conflict = propagate();
      if (conflict != kNoReason) {
        ++stats_.conflicts;
        if (decisionLevel() == 0) return SatResult::Unsat;
        auto [learnt, back] = analyze(conflict);
        backjump(back);
        if (learnt.size() == 1) {
          assign(learnt[0], kNoReason);
        } else {
          std::size_t id = attach(learnt);
          assign(learnt[0], id);
        }
        ++stats_.learned;
        decay();
        continue;
      }
      int v = pick();
      if (v == 0) return SatResult::Sat;
      ++stats_.decisions;
      trailLim_.push_back(trail_.size());
      assign(phase_[v] ? v : -v, kNoReason);
    }
  }

  // model()[v] for v in 1..numVars.
  std::vector<char> model() const {
    std::vector<char> m(n_ + 1, 0);
    for (int v = 1; v <= n_; ++v) m[v] = value_[v] == 1;
    return m;
  }
  const SolverStats& stats() const { return stats_; }

 private:
  static constexpr std::size_t kNoReason = static_cast<std::size_t>(-1);

  std::size_t slot(int lit) const { return 2 * static_cast<std::size_t>(std::abs(lit)) + (lit < 0); }
  int val(int lit) const {
    int v = value_[std::abs(lit)];
    return lit > 0 ? v : -v;
  }
  int decisionLevel() const { return static_cast<int>(trailLim_.size()); }

  std::size_t attach(Clause c) {
    std::size_t id = clauses_.size();
    clauses_.push_back(std::move(c));
    watches_[slot(-clauses_[id][0])].push_back(id);
    watches_[slot(-clauses_[id][1])].push_back(id);
    return id;
  }
  void assign(int lit, std::size_t reason) {
    int v = std::abs(lit);
    value_[v] = lit > 0 ? 1 : -1;
    level_[v] = decisionLevel();
    reason_[v] = reason;
    trail_.push_back(lit);
  }
  void backjump(int level) {
    if (decisionLevel() <= level) return;
    std::size_t size = trailLim_[level];
    while (trail_.size() > size) {
      int v = std::abs(trail_.back());
      phase_[v] = value_[v] == 1;
      value_[v] = 0;
      reason_[v] = kNoReason;
      trail_.pop_back();
    }
    trailLim_.resize(level);
    qhead_ = std::min(qhead_, trail_.size());
  }

  int pick() const {
    int best = 0;
    for (int v = 1; v <= n_; ++v)
      if (value_[v] == 0 && (best == 0 || activity_[v] > activity_[best])) best = v;
    return best;
  }
  void bump(int v) {
    activity_[v] += increment_;
    if (activity_[v] > 1e100) {
      for (double& a : activity_) a *= 1e-100;
      increment_ *= 1e-100;
    }
  }
  void decay() { increment_ /= 0.95; }

  // Returns the learnt clause (asserting literal first, a literal of the
  // backjump level second) and the level to jump back to.
  std::pair<Clause, int> analyze(std::size_t conflict) {
    Clause learnt{0};
    int pending = 0;
    int lit = 0;
    std::size_t index = trail_.size();
    std::size_t reason = conflict;
    for (;;) {
      for (int q : clauses_[reason]) {
        if (q == lit) continue;
        int v = std::abs(q);
        if (seen_[v] || level_[v] == 0) continue;
        seen_[v] = 1;
        bump(v);
        if (level_[v] == decisionLevel()) ++pending;
        else learnt.push_back(q);
      }
      do {
        lit = trail_[--index];
      } while (!seen_[std::abs(lit)]);
      seen_[std::abs(lit)] = 0;
      if (--pending == 0) break;
      reason = reason_[std::abs(lit)];
    }
    learnt[0] = -lit;
    int back = 0;
    std::size_t at = 1;
    for (std::size_t i = 1; i < learnt.size(); ++i) {
      int v = std::abs(learnt[i]);
      seen_[v] = 0;
      if (level_[v] > back) {
        back = level_[v];
        at = i;
      }
    }
    if (learnt.size() > 1) std::swap(learnt[1], learnt[at]);
    return {learnt, back};
  }

  // Watches are indexed by the literal whose assignment makes a watched
  // literal false. Returns the conflicting clause or kNoReason.
  std::size_t propagate() {
    while (qhead_ < trail_.size()) {
      int lit = trail_[qhead_++];
      ++stats_.propagations;
      std::vector<std::size_t>& ws = watches_[slot(lit)];
      for (std::size_t k = 0; k < ws.size();) {
        std::size_t id = ws[k];
        Clause& c = clauses_[id];
        if (c[0] == -lit) std::swap(c[0], c[1]);
        if (val(c[0]) == 1) {
          ++k;
          continue;
        }
        bool moved = false;
        for (std::size_t j = 2; j < c.size(); ++j) {
          if (val(c[j]) != -1) {
            std::swap(c[1], c[j]);
            watches_[slot(-c[1])].push_back(id);
            ws[k] = ws.back();
            ws.pop_back();
            moved = true;
            break;
          }
        }
        if (moved) continue;
        if (val(c[0]) == -1) {
          qhead_ = trail_.size();
          return id;
        }
        if (val(c[0]) == 0) assign(c[0], id);
        ++k;
      }
    }
    return kNoReason;
  }

  int n_;
  bool trivialUnsat_ = false;
  std::vector<Clause> clauses_;
  std::vector<int> units_;
  std::vector<std::vector<std::size_t>> watches_;
  std::vector<int> value_, level_;
  std::vector<std::size_t> reason_;
  std::vector<char> phase_, seen_;
  std::vector<double> activity_;
  double increment_ = 1.0;
  std::vector<int> trail_;
  std::vector<std::size_t> trailLim_;
  std::size_t qhead_ = 0;
  SolverStats stats_;
};

struct SolveOutcome {
  SatResult result;
  std::vector<char> model;  // indexed by DIMACS variable
  SolverStats stats;
};

inline SolveOutcome solve(const CnfInstance& cnf) {
  DpllSolver s(cnf);
  SatResult r = s.solve();
  return {r, r == SatResult::Sat ? s.model() : std::vector<char>{}, s.stats()};
}

}  // namespace peuf
