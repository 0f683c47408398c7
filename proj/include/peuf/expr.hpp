#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace peuf {

enum class Kind : std::uint8_t { True, False, Not, And, Or, Eq, PredApp, Ite, FuncApp };

enum class ExprId : std::uint32_t {};
enum class SymbolId : std::uint32_t {};

constexpr std::uint32_t idx(ExprId e) { return static_cast<std::uint32_t>(e); }
constexpr std::uint32_t idx(SymbolId s) { return static_cast<std::uint32_t>(s); }
inline constexpr SymbolId kNoSymbol{UINT32_MAX};

enum class SymbolKind : std::uint8_t { Function, Predicate };
enum class ArgKind : std::uint8_t { Term, Formula };
enum class Polarity : std::uint8_t { Unclassified, P, G };

inline bool is_formula_kind(Kind k) { return k != Kind::Ite && k != Kind::FuncApp; }

inline const char* kind_name(Kind k) {
  switch (k) {
    case Kind::True: return "true";
    case Kind::False: return "false";
    case Kind::Not: return "not";
    case Kind::And: return "and";
    case Kind::Or: return "or";
    case Kind::Eq: return "=";
    case Kind::PredApp: return "pred";
    case Kind::Ite: return "ite";
    case Kind::FuncApp: return "func";
  }
  return "?";
}

class KindError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Symbol {
  std::string name;
  SymbolKind kind = SymbolKind::Function;
  std::vector<ArgKind> argKinds;
  Polarity polarity = Polarity::Unclassified;

  std::size_t order() const { return argKinds.size(); }
  bool is_function() const { return kind == SymbolKind::Function; }
  bool is_predicate() const { return kind == SymbolKind::Predicate; }
};

class SymbolTable {
 public:
  // Adds a symbol or returns the existing one; a differing signature is an error.
  SymbolId declare(std::string_view name, SymbolKind kind, std::vector<ArgKind> argKinds) {
    if (auto it = byName_.find(std::string(name)); it != byName_.end()) {
      const Symbol& s = syms_[idx(it->second)];
      if (s.kind != kind)
        throw KindError("symbol '" + s.name + "' used both as function and predicate");
      if (s.argKinds != argKinds)
        throw KindError("symbol '" + s.name + "' used with inconsistent signature");
      return it->second;
    }
    SymbolId id{static_cast<std::uint32_t>(syms_.size())};
    syms_.push_back(Symbol{std::string(name), kind, std::move(argKinds), Polarity::Unclassified});
    byName_.emplace(std::string(name), id);
    return id;
  }

  const SymbolId* find(std::string_view name) const {
    auto it = byName_.find(std::string(name));
    return it == byName_.end() ? nullptr : &it->second;
  }

  bool contains(std::string_view name) const { return find(name) != nullptr; }

  // `base`, or `base__2`, `base__3`, ... whichever is unused first.
  std::string fresh_name(const std::string& base) const {
    if (!contains(base)) return base;
    for (int k = 2;; ++k) {
      std::string cand = base + "__" + std::to_string(k);
      if (!contains(cand)) return cand;
    }
  }

  const Symbol& operator[](SymbolId id) const { return syms_.at(idx(id)); }
  Symbol& at(SymbolId id) { return syms_.at(idx(id)); }
  std::size_t size() const { return syms_.size(); }

 private:
  std::vector<Symbol> syms_;
  std::unordered_map<std::string, SymbolId> byName_;
};

struct Node {
  Kind kind;
  SymbolId sym = kNoSymbol;
  std::vector<ExprId> args;

  bool is_formula() const { return is_formula_kind(kind); }
  bool is_term() const { return !is_formula(); }
};

// Hash-consed expression DAG. Nodes are append-only; a child always has a
// smaller id than its parent.
class ExprStore {
 public:
  SymbolTable symbols;

  ExprStore() {
    true_ = intern(Kind::True, kNoSymbol, {});
    false_ = intern(Kind::False, kNoSymbol, {});
  }

  ExprId mk_true() const { return true_; }
  ExprId mk_false() const { return false_; }
  ExprId mk_bool(bool b) const { return b ? true_ : false_; }

  ExprId mk_not(ExprId a) {
    need_formula(a, "not");
    return intern(Kind::Not, kNoSymbol, {a});
  }
  ExprId mk_and(ExprId a, ExprId b) {
    need_formula(a, "and");
    need_formula(b, "and");
    return intern(Kind::And, kNoSymbol, {a, b});
  }
  ExprId mk_or(ExprId a, ExprId b) {
    need_formula(a, "or");
    need_formula(b, "or");
    return intern(Kind::Or, kNoSymbol, {a, b});
  }
  ExprId mk_eq(ExprId a, ExprId b) {
    need_term(a, "=");
    need_term(b, "=");
    return intern(Kind::Eq, kNoSymbol, {a, b});
  }
  ExprId mk_ite(ExprId c, ExprId t, ExprId e) {
    need_formula(c, "ite");
    need_term(t, "ite");
    need_term(e, "ite");
    return intern(Kind::Ite, kNoSymbol, {c, t, e});
  }
  ExprId mk_app(SymbolId f, std::vector<ExprId> args) {
    const Symbol& s = symbols[f];
    if (args.size() != s.order())
      throw KindError("symbol '" + s.name + "' expects " + std::to_string(s.order()) +
                      " arguments, got " + std::to_string(args.size()));
    for (std::size_t i = 0; i < args.size(); ++i) {
      bool wantFormula = s.argKinds[i] == ArgKind::Formula;
      if (node(args[i]).is_formula() != wantFormula)
        throw KindError("argument " + std::to_string(i + 1) + " of '" + s.name + "' must be a " +
                        (wantFormula ? "formula" : "term"));
    }
    return intern(s.is_function() ? Kind::FuncApp : Kind::PredApp, f, std::move(args));
  }

  // Derived connectives.
  ExprId mk_implies(ExprId a, ExprId b) { return mk_or(mk_not(a), b); }
  ExprId mk_iff(ExprId a, ExprId b) { return mk_and(mk_implies(a, b), mk_implies(b, a)); }
  ExprId mk_and(const std::vector<ExprId>& xs) {
    if (xs.empty()) return true_;
    ExprId acc = xs[0];
    for (std::size_t i = 1; i < xs.size(); ++i) acc = mk_and(acc, xs[i]);
    return acc;
  }
  ExprId mk_or(const std::vector<ExprId>& xs) {
    if (xs.empty()) return false_;
    ExprId acc = xs[0];
    for (std::size_t i = 1; i < xs.size(); ++i) acc = mk_or(acc, xs[i]);
    return acc;
  }

  ExprId mk_var(std::string_view name) {
    return mk_app(symbols.declare(name, SymbolKind::Function, {}), {});
  }
  ExprId mk_prop(std::string_view name) {
    return mk_app(symbols.declare(name, SymbolKind::Predicate, {}), {});
  }
  ExprId mk_app(std::string_view name, std::vector<ExprId> args) {
    std::vector<ArgKind> kinds;
    for (ExprId a : args) kinds.push_back(node(a).is_formula() ? ArgKind::Formula : ArgKind::Term);
    return mk_app(symbols.declare(name, SymbolKind::Function, std::move(kinds)), std::move(args));
  }
  ExprId mk_pred(std::string_view name, std::vector<ExprId> args) {
    std::vector<ArgKind> kinds;
    for (ExprId a : args) kinds.push_back(node(a).is_formula() ? ArgKind::Formula : ArgKind::Term);
    return mk_app(symbols.declare(name, SymbolKind::Predicate, std::move(kinds)), std::move(args));
  }

  const Node& node(ExprId e) const { return nodes_.at(idx(e)); }
  const Node& operator[](ExprId e) const { return node(e); }
  std::size_t size() const { return nodes_.size(); }

  bool is_formula(ExprId e) const { return node(e).is_formula(); }
  bool is_term(ExprId e) const { return node(e).is_term(); }
  const Symbol& symbol_of(ExprId e) const { return symbols[node(e).sym]; }

  // Rebuilds `e` with new children, keeping kind and symbol.
  ExprId rebuild(ExprId e, std::vector<ExprId> args) {
    const Node& n = node(e);
    switch (n.kind) {
      case Kind::True:
      case Kind::False: return e;
      case Kind::Not: return mk_not(args[0]);
      case Kind::And: return mk_and(args[0], args[1]);
      case Kind::Or: return mk_or(args[0], args[1]);
      case Kind::Eq: return mk_eq(args[0], args[1]);
      case Kind::Ite: return mk_ite(args[0], args[1], args[2]);
      case Kind::PredApp:
      case Kind::FuncApp: return mk_app(n.sym, std::move(args));
    }
    return e;
  }

 private:
  struct Key {
    Kind kind;
    SymbolId sym;
    std::vector<ExprId> args;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      std::size_t h = static_cast<std::size_t>(k.kind) * 0x9e3779b97f4a7c15ULL ^ idx(k.sym);
      for (ExprId a : k.args) h = (h ^ idx(a)) * 0x100000001b3ULL + (h >> 29);
      return h;
    }
  };

  ExprId intern(Kind kind, SymbolId sym, std::vector<ExprId> args) {
    Key key{kind, sym, args};
    if (auto it = table_.find(key); it != table_.end()) return it->second;
    ExprId id{static_cast<std::uint32_t>(nodes_.size())};
    nodes_.push_back(Node{kind, sym, std::move(args)});
    table_.emplace(std::move(key), id);
    return id;
  }

  void need_formula(ExprId e, const char* op) const {
    if (!is_formula(e)) throw KindError(std::string("'") + op + "' expects a formula operand");
  }
  void need_term(ExprId e, const char* op) const {
    if (!is_term(e)) throw KindError(std::string("'") + op + "' expects a term operand");
  }

  std::vector<Node> nodes_;
  std::unordered_map<Key, ExprId, KeyHash> table_;
  ExprId true_{}, false_{};
};

// Nodes reachable from `root`, children before parents, in left-to-right
// first-occurrence order.
inline std::vector<ExprId> postorder(const ExprStore& s, ExprId root) {
  std::vector<ExprId> out;
  std::vector<char> seen(s.size(), 0);
  std::vector<std::pair<ExprId, std::size_t>> stack{{root, 0}};
  seen[idx(root)] = 1;
  while (!stack.empty()) {
    auto& [e, next] = stack.back();
    const Node& n = s.node(e);
    if (next < n.args.size()) {
      ExprId c = n.args[next++];
      if (!seen[idx(c)]) {
        seen[idx(c)] = 1;
        stack.emplace_back(c, 0);
      }
    } else {
      out.push_back(e);
      stack.pop_back();
    }
  }
  return out;
}

inline std::vector<ExprId> postorder(const ExprStore& s, const std::vector<ExprId>& roots) {
  std::vector<ExprId> out;
  std::unordered_set<std::uint32_t> have;
  for (ExprId r : roots)
    for (ExprId e : postorder(s, r))
      if (have.insert(idx(e)).second) out.push_back(e);
  return out;
}

// T(F): every function application node, domain variables included.
inline std::vector<ExprId> function_application_terms(const ExprStore& s, ExprId root) {
  std::vector<ExprId> out;
  for (ExprId e : postorder(s, root))
    if (s.node(e).kind == Kind::FuncApp) out.push_back(e);
  return out;
}

// Symbols heading some application reachable from `root`, first-occurrence order.
inline std::vector<SymbolId> symbols_in(const ExprStore& s, ExprId root) {
  std::vector<SymbolId> out;
  std::unordered_set<std::uint32_t> have;
  for (ExprId e : postorder(s, root)) {
    const Node& n = s.node(e);
    if ((n.kind == Kind::FuncApp || n.kind == Kind::PredApp) && have.insert(idx(n.sym)).second)
      out.push_back(n.sym);
  }
  return out;
}

}  // namespace peuf

template <>
struct std::hash<peuf::ExprId> {
  std::size_t operator()(peuf::ExprId e) const noexcept { return peuf::idx(e); }
};
template <>
struct std::hash<peuf::SymbolId> {
  std::size_t operator()(peuf::SymbolId e) const noexcept { return peuf::idx(e); }
};
