#pragma once

#include <cctype>
#include <cstdint>
#include <algorithm>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "peuf/expr.hpp"

namespace peuf {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, int line, int col)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
        line_(line),
        col_(col) {}
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  int line_, col_;
};

namespace detail {

struct Token {
  enum Type { LParen, RParen, Atom, End } type;
  std::string text;
  int line, col;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip();
    Token t{Token::End, "", line_, col_};
    if (pos_ >= src_.size()) return t;
    char c = src_[pos_];
    if (c == '(' || c == ')') {
      advance();
      t.type = c == '(' ? Token::LParen : Token::RParen;
      t.text = std::string(1, c);
      return t;
    }
    std::size_t start = pos_;
    while (pos_ < src_.size() && !std::isspace(static_cast<unsigned char>(src_[pos_])) &&
           src_[pos_] != '(' && src_[pos_] != ')' && src_[pos_] != ';')
      advance();
    t.type = Token::Atom;
    t.text = std::string(src_.substr(start, pos_ - start));
    return t;
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }
  void skip() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == ';') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
};

// Untyped S-expression tree; typing happens in a second pass.
struct Sexp {
  bool list = false;
  std::string atom;
  std::vector<Sexp> items;
  int line = 0, col = 0;
};

inline bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

inline bool is_reserved(std::string_view s) {
  static const char* kReserved[] = {"true", "false", "not", "and", "or", "ite", "declare",
                                    "define", "implies", "iff"};
  for (const char* r : kReserved)
    if (s == r) return true;
  return false;
}

class Parser {
 public:
  Parser(ExprStore& store, std::string_view src) : store_(store), lex_(src) { tok_ = lex_.next(); }

  ExprId parse_document() {
    std::vector<Sexp> forms;
    while (tok_.type != Token::End) forms.push_back(read());
    ExprId root{};
    bool have = false;
    for (const Sexp& f : forms) {
      if (f.list && !f.items.empty() && !f.items[0].list && f.items[0].atom == "declare") {
        if (have) fail("declarations must precede the formula", f);
        declare(f);
        continue;
      }
      if (f.list && !f.items.empty() && !f.items[0].list && f.items[0].atom == "define") {
        if (have) fail("definitions must precede the formula", f);
        define(f);
        continue;
      }
      if (have) fail("more than one formula in input", f);
      root = formula(f);
      have = true;
    }
    if (!have) throw ParseError("no formula in input", tok_.line, tok_.col);
    return root;
  }

 private:
  Sexp read() {
    Sexp s;
    s.line = tok_.line;
    s.col = tok_.col;
    if (tok_.type == Token::Atom) {
      s.atom = tok_.text;
      tok_ = lex_.next();
      return s;
    }
    if (tok_.type == Token::RParen) throw ParseError("unexpected ')'", tok_.line, tok_.col);
    if (tok_.type == Token::End) throw ParseError("unexpected end of input", tok_.line, tok_.col);
    s.list = true;
    tok_ = lex_.next();
    while (tok_.type != Token::RParen) {
      if (tok_.type == Token::End)
        throw ParseError("unterminated '(' opened at " + std::to_string(s.line) + ":" +
                             std::to_string(s.col),
                         tok_.line, tok_.col);
      s.items.push_back(read());
    }
    tok_ = lex_.next();
    return s;
  }

  [[noreturn]] static void fail(const std::string& msg, const Sexp& at) {
    throw ParseError(msg, at.line, at.col);
  }

  // (declare NAME [function|predicate] order K [bool-args I ...]); positions are 1-based.
  void declare(const Sexp& f) {
    const auto& it = f.items;
    std::size_t i = 1;
    if (i >= it.size() || it[i].list || !is_identifier(it[i].atom) || is_reserved(it[i].atom))
      fail("declare: expected a symbol name", f);
    Decl d;
    std::string name = it[i++].atom;
    if (i < it.size() && !it[i].list && (it[i].atom == "function" || it[i].atom == "predicate")) {
      d.kind = it[i].atom == "function" ? 1 : 2;
      ++i;
    }
    if (i + 1 >= it.size() || it[i].list || it[i].atom != "order" || it[i + 1].list)
      fail("declare: expected 'order K'", f);
    d.order = to_index(it[i + 1], 0);
    i += 2;
    d.kinds.assign(d.order, ArgKind::Term);
    if (i < it.size()) {
      if (it[i].list || it[i].atom != "bool-args") fail("declare: expected 'bool-args'", it[i]);
      for (++i; i < it.size(); ++i) {
        std::size_t pos = to_index(it[i], 1);
        if (pos > d.order) fail("declare: bool-args position out of range", it[i]);
        d.kinds[pos - 1] = ArgKind::Formula;
      }
    }
    if (decls_.count(name) || store_.symbols.contains(name)) fail("declare: '" + name + "' declared twice", f);
    decls_[name] = d;
  }

  // (define @NAME term|formula EXPR); later forms refer to the node as @NAME.
  void define(const Sexp& f) {
    const auto& it = f.items;
    if (it.size() != 4 || it[1].list || it[1].atom.size() < 2 || it[1].atom[0] != '@' ||
        !is_identifier(std::string_view(it[1].atom).substr(1)))
      fail("define: expected (define @NAME term|formula EXPR)", f);
    if (it[2].list || (it[2].atom != "term" && it[2].atom != "formula"))
      fail("define: expected 'term' or 'formula'", f);
    if (defs_.count(it[1].atom)) fail("define: '" + it[1].atom + "' defined twice", f);
    defs_[it[1].atom] = it[2].atom == "term" ? term(it[3]) : formula(it[3]);
  }

  ExprId reference(const Sexp& s, bool wantFormula) {
    auto d = defs_.find(s.atom);
    if (d == defs_.end()) fail("undefined reference '" + s.atom + "'", s);
    if (store_.is_formula(d->second) != wantFormula)
      fail(std::string("kind mismatch: '") + s.atom + "' is a " + (wantFormula ? "term" : "formula"), s);
    return d->second;
  }

  static std::size_t to_index(const Sexp& s, std::size_t min) {
    if (s.list || s.atom.empty()) fail("expected a number", s);
    for (char c : s.atom)
      if (!std::isdigit(static_cast<unsigned char>(c))) fail("expected a number", s);
    std::size_t v = std::stoul(s.atom);
    if (v < min) fail("number out of range", s);
    return v;
  }

  SymbolId symbol(const std::string& name, SymbolKind kind, std::size_t arity, const Sexp& at) {
    if (!is_identifier(name) || is_reserved(name)) fail("invalid symbol name '" + name + "'", at);
    std::vector<ArgKind> kinds(arity, ArgKind::Term);
    if (auto d = decls_.find(name); d != decls_.end()) {
      if (d->second.kind == 1 && kind != SymbolKind::Function)
        fail("kind mismatch: '" + name + "' is declared as a function", at);
      if (d->second.kind == 2 && kind != SymbolKind::Predicate)
        fail("kind mismatch: '" + name + "' is declared as a predicate", at);
      if (d->second.order != arity)
        fail("arity mismatch: '" + name + "' is declared with order " +
                 std::to_string(d->second.order) + ", used with " + std::to_string(arity),
             at);
      kinds = d->second.kinds;
    }
    if (const SymbolId* s = store_.symbols.find(name)) {
      const Symbol& sym = store_.symbols[*s];
      if (sym.kind != kind)
        fail("kind mismatch: '" + name + "' is used both as a " +
                 (sym.is_function() ? "term" : "formula") + " and as a " +
                 (kind == SymbolKind::Function ? "term" : "formula"),
             at);
      if (sym.order() != arity)
        fail("arity mismatch: '" + name + "' has order " + std::to_string(sym.order()) +
                 ", used with " + std::to_string(arity),
             at);
      return *s;
    }
    return store_.symbols.declare(name, kind, std::move(kinds));
  }

  std::vector<ExprId> app_args(SymbolId f, const Sexp& s) {
    std::vector<ExprId> args;
    const Symbol& sym = store_.symbols[f];
    for (std::size_t i = 1; i < s.items.size(); ++i)
      args.push_back(sym.argKinds[i - 1] == ArgKind::Formula ? formula(s.items[i]) : term(s.items[i]));
    return args;
  }

  static const std::string& head(const Sexp& s) {
    if (s.items.empty()) fail("empty form '()'", s);
    if (s.items[0].list) fail("operator position must be an identifier", s.items[0]);
    return s.items[0].atom;
  }

  void expect_arity(const Sexp& s, std::size_t n) {
    if (s.items.size() != n + 1)
      fail("arity mismatch: '" + s.items[0].atom + "' takes " + std::to_string(n) + " operand(s)", s);
  }

  ExprId formula(const Sexp& s) {
    if (!s.list) {
      if (s.atom == "true") return store_.mk_true();
      if (s.atom == "false") return store_.mk_false();
      if (s.atom[0] == '@') return reference(s, true);
      return store_.mk_app(symbol(s.atom, SymbolKind::Predicate, 0, s), {});
    }
    const std::string& h = head(s);
    if (h == "not") {
      expect_arity(s, 1);
      return store_.mk_not(formula(s.items[1]));
    }
    if (h == "and" || h == "or") {
      if (s.items.size() < 2) fail("'" + h + "' needs at least one operand", s);
      std::vector<ExprId> xs;
      for (std::size_t i = 1; i < s.items.size(); ++i) xs.push_back(formula(s.items[i]));
      return h == "and" ? store_.mk_and(xs) : store_.mk_or(xs);
    }
    if (h == "=>" || h == "implies") {
      expect_arity(s, 2);
      ExprId a = formula(s.items[1]);
      return store_.mk_implies(a, formula(s.items[2]));
    }
    if (h == "iff" || h == "<=>") {
      expect_arity(s, 2);
      ExprId a = formula(s.items[1]);
      return store_.mk_iff(a, formula(s.items[2]));
    }
    if (h == "=") {
      expect_arity(s, 2);
      ExprId a = term(s.items[1]);
      return store_.mk_eq(a, term(s.items[2]));
    }
    if (h == "ite") {
      expect_arity(s, 3);
      ExprId c = formula(s.items[1]);
      ExprId a = formula(s.items[2]);
      ExprId b = formula(s.items[3]);
      return store_.mk_or(store_.mk_and(c, a), store_.mk_and(store_.mk_not(c), b));
    }
    if (h == "declare" || h == "define") fail("'" + h + "' is only allowed at top level", s);
    SymbolId p = symbol(h, SymbolKind::Predicate, s.items.size() - 1, s.items[0]);
    return store_.mk_app(p, app_args(p, s));
  }

  ExprId term(const Sexp& s) {
    if (!s.list) {
      if (s.atom == "true" || s.atom == "false")
        fail("kind mismatch: literal '" + s.atom + "' used as a term", s);
      if (s.atom[0] == '@') return reference(s, false);
      return store_.mk_app(symbol(s.atom, SymbolKind::Function, 0, s), {});
    }
    const std::string& h = head(s);
    if (h == "ite") {
      expect_arity(s, 3);
      ExprId c = formula(s.items[1]);
      ExprId a = term(s.items[2]);
      return store_.mk_ite(c, a, term(s.items[3]));
    }
    if (h == "not" || h == "and" || h == "or" || h == "=" || h == "=>" || h == "implies" ||
        h == "iff" || h == "<=>")
      fail("kind mismatch: '" + h + "' is a formula where a term is expected", s);
    if (h == "declare" || h == "define") fail("'" + h + "' is only allowed at top level", s);
    SymbolId f = symbol(h, SymbolKind::Function, s.items.size() - 1, s.items[0]);
    return store_.mk_app(f, app_args(f, s));
  }

  struct Decl {
    int kind = 0;  // 0 inferred, 1 function, 2 predicate
    std::size_t order = 0;
    std::vector<ArgKind> kinds;
  };

  ExprStore& store_;
  Lexer lex_;
  Token tok_;
  std::unordered_map<std::string, Decl> decls_;
  std::unordered_map<std::string, ExprId> defs_;
};

}  // namespace detail

inline ExprId parse(ExprStore& store, std::string_view text) {
  return detail::Parser(store, text).parse_document();
}

// Surface syntax of `root`. Nodes listed in `refs` (other than the root) print
// as their reference name; everything else is expanded at each use.
inline std::string to_sexpr(const ExprStore& s, ExprId root,
                            const std::unordered_map<std::uint32_t, std::string>* refs = nullptr) {
  std::ostringstream out;
  // Explicit stack so deep conjunction chains do not exhaust the call stack.
  std::vector<std::pair<ExprId, std::size_t>> stack{{root, 0}};
  while (!stack.empty()) {
    auto& [e, i] = stack.back();
    const Node& n = s.node(e);
    if (i == 0 && refs && e != root) {
      if (auto r = refs->find(idx(e)); r != refs->end()) {
        out << r->second;
        stack.pop_back();
        continue;
      }
    }
    if (i == 0) {
      switch (n.kind) {
        case Kind::True: out << "true"; break;
        case Kind::False: out << "false"; break;
        case Kind::FuncApp:
        case Kind::PredApp:
          if (n.args.empty()) out << s.symbols[n.sym].name;
          else out << '(' << s.symbols[n.sym].name;
          break;
        default: out << '(' << kind_name(n.kind);
      }
      if (n.args.empty()) {
        stack.pop_back();
        continue;
      }
    }
    if (i < n.args.size()) {
      ExprId c = n.args[i++];
      out << ' ';
      stack.emplace_back(c, 0);
    } else {
      out << ')';
      stack.pop_back();
    }
  }
  return out.str();
}

// Declarations needed to re-parse `root`: symbols with formula arguments.
inline std::string declarations(const ExprStore& s, ExprId root) {
  std::string out;
  for (SymbolId id : symbols_in(s, root)) {
    const Symbol& sym = s.symbols[id];
    bool anyFormula = false;
    for (ArgKind k : sym.argKinds) anyFormula |= k == ArgKind::Formula;
    if (!anyFormula) continue;
    out += "(declare " + sym.name + (sym.is_function() ? " function" : " predicate") + " order " +
           std::to_string(sym.order()) + " bool-args";
    for (std::size_t i = 0; i < sym.order(); ++i)
      if (sym.argKinds[i] == ArgKind::Formula) out += " " + std::to_string(i + 1);
    out += ")\n";
  }
  return out;
}

// Declarations and the formula. When the expanded tree would exceed
// `shareAbove` nodes, every compound node with several parents is emitted once
// as a (define ...) form and referenced by name.
inline std::string to_document(const ExprStore& s, ExprId root, std::size_t shareAbove = 4096) {
  std::vector<ExprId> order = postorder(s, root);
  std::unordered_map<std::uint32_t, std::size_t> treeSize, parents;
  std::size_t total = 0;
  for (ExprId e : order) {
    std::size_t n = 1;
    for (ExprId c : s.node(e).args) {
      n = std::min<std::size_t>(n + treeSize[idx(c)], SIZE_MAX / 4);
      ++parents[idx(c)];
    }
    treeSize[idx(e)] = n;
    total = n;
  }
  std::string out = declarations(s, root);
  if (total <= shareAbove) return out + to_sexpr(s, root) + "\n";
  std::unordered_map<std::uint32_t, std::string> refs;
  for (ExprId e : order) {
    if (s.node(e).args.empty() || parents[idx(e)] < 2 || e == root) continue;
    std::string name = "@d" + std::to_string(refs.size() + 1);
    out += "(define " + name + (s.is_formula(e) ? " formula " : " term ") + to_sexpr(s, e, &refs) + ")\n";
    refs.emplace(idx(e), name);
  }
  return out + to_sexpr(s, root, &refs) + "\n";
}

// Graphviz rendering; term-valued edges solid, formula-valued edges dashed.
inline std::string to_dot(const ExprStore& s, ExprId root) {
  std::ostringstream out;
  out << "digraph expr {\n  node [fontname=\"Helvetica\"];\n";
  for (ExprId e : postorder(s, root)) {
    const Node& n = s.node(e);
    std::string label;
    if (n.kind == Kind::FuncApp || n.kind == Kind::PredApp) label = s.symbols[n.sym].name;
    else label = kind_name(n.kind);
    out << "  n" << idx(e) << " [label=\"" << label << "\", shape=" << (n.is_formula() ? "box" : "ellipse")
        << "];\n";
    for (std::size_t i = 0; i < n.args.size(); ++i) {
      ExprId c = n.args[i];
      out << "  n" << idx(e) << " -> n" << idx(c) << " [style=" << (s.is_formula(c) ? "dashed" : "solid");
      if (n.args.size() > 1) out << ", label=\"" << i + 1 << "\"";
      out << "];\n";
    }
  }
  out << "}\n";
  return out.str();
}

}  // namespace peuf
