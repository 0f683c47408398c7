#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace peuf {

enum class PropId : std::uint32_t {};
constexpr std::uint32_t idx(PropId p) { return static_cast<std::uint32_t>(p); }

enum class PKind : std::uint8_t { False, True, Var, Not, And, Or, Iff };

struct PropNode {
  PKind kind;
  std::uint32_t var = 0;  // Var: variable index
  PropId a{}, b{};
};

// Hash-consed propositional DAG with constant folding at construction.
class PropStore {
 public:
  PropStore() {
    false_ = intern({PKind::False});
    true_ = intern({PKind::True});
  }

  PropId mk_false() const { return false_; }
  PropId mk_true() const { return true_; }
  PropId mk_const(bool v) const { return v ? true_ : false_; }

  // Returns the variable called `name`, creating it if needed.
  PropId var(const std::string& name) {
    if (auto it = byName_.find(name); it != byName_.end()) return varNodes_[it->second];
    std::uint32_t v = static_cast<std::uint32_t>(names_.size());
    names_.push_back(name);
    byName_.emplace(name, v);
    PropNode n{PKind::Var};
    n.var = v;
    varNodes_.push_back(intern(n));
    return varNodes_.back();
  }
  // A new variable whose name avoids every existing one.
  PropId fresh_var(const std::string& base) {
    if (!byName_.count(base)) return var(base);
    for (int k = 2;; ++k)
      if (!byName_.count(base + "__" + std::to_string(k))) return var(base + "__" + std::to_string(k));
  }
  bool has_var(const std::string& name) const { return byName_.count(name) != 0; }
  std::optional<PropId> find_var(const std::string& name) const {
    auto it = byName_.find(name);
    if (it == byName_.end()) return std::nullopt;
    return varNodes_[it->second];
  }

  PropId mk_not(PropId a) {
    const PropNode& n = node(a);
    if (n.kind == PKind::True) return false_;
    if (n.kind == PKind::False) return true_;
    if (n.kind == PKind::Not) return n.a;
    return intern({PKind::Not, 0, a});
  }
  PropId mk_and(PropId a, PropId b) {
    if (a == false_ || b == false_) return false_;
    if (a == true_) return b;
    if (b == true_) return a;
    if (a == b) return a;
    if (complementary(a, b)) return false_;
    if (idx(b) < idx(a)) std::swap(a, b);
    return intern({PKind::And, 0, a, b});
  }
  PropId mk_or(PropId a, PropId b) {
    if (a == true_ || b == true_) return true_;
    if (a == false_) return b;
    if (b == false_) return a;
    if (a == b) return a;
    if (complementary(a, b)) return true_;
    if (idx(b) < idx(a)) std::swap(a, b);
    return intern({PKind::Or, 0, a, b});
  }
  PropId mk_iff(PropId a, PropId b) {
    if (a == b) return true_;
    if (a == true_) return b;
    if (b == true_) return a;
    if (a == false_) return mk_not(b);
    if (b == false_) return mk_not(a);
    if (complementary(a, b)) return false_;
    if (idx(b) < idx(a)) std::swap(a, b);
    return intern({PKind::Iff, 0, a, b});
  }
  PropId mk_implies(PropId a, PropId b) { return mk_or(mk_not(a), b); }
  PropId mk_ite(PropId c, PropId t, PropId e) {
    if (t == e) return t;
    return mk_or(mk_and(c, t), mk_and(mk_not(c), e));
  }
  PropId mk_and(const std::vector<PropId>& xs) {
    PropId acc = true_;
    for (PropId x : xs) acc = mk_and(acc, x);
    return acc;
  }
  PropId mk_or(const std::vector<PropId>& xs) {
    PropId acc = false_;
    for (PropId x : xs) acc = mk_or(acc, x);
    return acc;
  }

  const PropNode& node(PropId p) const { return nodes_.at(idx(p)); }
  std::size_t size() const { return nodes_.size(); }
  std::size_t num_vars() const { return names_.size(); }
  const std::string& var_name(std::uint32_t v) const { return names_.at(v); }
  PropId var_node(std::uint32_t v) const { return varNodes_.at(v); }
  bool is_const(PropId p) const { return p == true_ || p == false_; }

 private:
  bool complementary(PropId a, PropId b) const {
    const PropNode& na = node(a);
    const PropNode& nb = node(b);
    return (na.kind == PKind::Not && na.a == b) || (nb.kind == PKind::Not && nb.a == a);
  }

  PropId intern(PropNode n) {
    std::string key;
    key.reserve(13);
    key.push_back(static_cast<char>(n.kind));
    auto put = [&](std::uint32_t v) { key.append(reinterpret_cast<const char*>(&v), sizeof v); };
    put(n.var);
    put(idx(n.a));
    put(idx(n.b));
    if (auto it = table_.find(key); it != table_.end()) return it->second;
    PropId id{static_cast<std::uint32_t>(nodes_.size())};
    nodes_.push_back(n);
    table_.emplace(std::move(key), id);
    return id;
  }

  std::vector<PropNode> nodes_;
  std::unordered_map<std::string, PropId> table_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> byName_;
  std::vector<PropId> varNodes_;
  PropId false_{}, true_{};
};

// Nodes reachable from the roots, children first.
inline std::vector<PropId> prop_postorder(const PropStore& s, const std::vector<PropId>& roots) {
  std::vector<PropId> out;
  std::vector<char> seen(s.size(), 0);
  for (PropId r : roots) {
    if (seen[idx(r)]) continue;
    std::vector<std::pair<PropId, int>> stack{{r, 0}};
    seen[idx(r)] = 1;
    while (!stack.empty()) {
      auto& [p, i] = stack.back();
      const PropNode& n = s.node(p);
      int arity = n.kind == PKind::Not ? 1 : (n.kind >= PKind::And ? 2 : 0);
      if (i < arity) {
        PropId c = i++ == 0 ? n.a : n.b;
        if (!seen[idx(c)]) {
          seen[idx(c)] = 1;
          stack.emplace_back(c, 0);
        }
      } else {
        out.push_back(p);
        stack.pop_back();
      }
    }
  }
  return out;
}

// Variable indices occurring in the roots, ascending.
inline std::vector<std::uint32_t> prop_vars(const PropStore& s, const std::vector<PropId>& roots) {
  std::vector<std::uint32_t> out;
  for (PropId p : prop_postorder(s, roots))
    if (s.node(p).kind == PKind::Var) out.push_back(s.node(p).var);
  std::sort(out.begin(), out.end());
  return out;
}

// `assignment[v]` gives the value of variable v; missing entries read false.
inline bool prop_eval(const PropStore& s, PropId root, const std::vector<char>& assignment) {
  std::unordered_map<std::uint32_t, bool> val;
  for (PropId p : prop_postorder(s, {root})) {
    const PropNode& n = s.node(p);
    bool v = false;
    switch (n.kind) {
      case PKind::False: v = false; break;
      case PKind::True: v = true; break;
      case PKind::Var: v = n.var < assignment.size() && assignment[n.var]; break;
      case PKind::Not: v = !val[idx(n.a)]; break;
      case PKind::And: v = val[idx(n.a)] && val[idx(n.b)]; break;
      case PKind::Or: v = val[idx(n.a)] || val[idx(n.b)]; break;
      case PKind::Iff: v = val[idx(n.a)] == val[idx(n.b)]; break;
    }
    val[idx(p)] = v;
  }
  return val[idx(root)];
}

// Prefix text form, e.g. (or (not a) b). Shared nodes are repeated.
inline std::string to_prefix(const PropStore& s, PropId root) {
  std::ostringstream out;
  std::vector<std::pair<PropId, int>> stack{{root, 0}};
  while (!stack.empty()) {
    auto& [p, i] = stack.back();
    const PropNode& n = s.node(p);
    if (n.kind <= PKind::Var) {
      out << (n.kind == PKind::False ? "false" : n.kind == PKind::True ? "true" : s.var_name(n.var));
      stack.pop_back();
      continue;
    }
    int arity = n.kind == PKind::Not ? 1 : 2;
    if (i == 0) {
      static const char* names[] = {"", "", "", "not", "and", "or", "iff"};
      out << '(' << names[static_cast<int>(n.kind)];
    }
    if (i < arity) {
      PropId c = i++ == 0 ? n.a : n.b;
      out << ' ';
      stack.emplace_back(c, 0);
    } else {
      out << ')';
      stack.pop_back();
    }
  }
  return out.str();
}

}  // namespace peuf
