#pragma once

#include <bit>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "peuf/expr.hpp"
#include "peuf/prop.hpp"

namespace peuf {

inline std::size_t ceil_log2(std::size_t n) { return n <= 1 ? 0 : std::bit_width(n - 1); }

// Bit vectors are stored least significant bit first.
struct BitVecEncoding {
  std::size_t width = 1;
  std::size_t N = 0, M = 0;
  std::vector<SymbolId> gVars, pVars;
  std::unordered_map<SymbolId, std::vector<PropId>> bits;
  std::vector<PropId> registry;
  // Restricts each g-variable to {0..i-1} where its free bits could exceed that.
  PropId range{};
};

// Comma-separated word, most significant bit first; variables print by name.
inline std::string pattern_string(const PropStore& props, const std::vector<PropId>& bits) {
  std::string out;
  for (std::size_t b = bits.size(); b-- > 0;) {
    PropId p = bits[b];
    out += p == props.mk_true() ? "1" : p == props.mk_false() ? "0" : to_prefix(props, p);
    if (b) out += ",";
  }
  return out;
}

namespace detail {

// value(bits) <= c, bits LSB first.
inline PropId bits_at_most(PropStore& props, const std::vector<PropId>& bits, std::size_t c) {
  PropId acc = props.mk_true();
  for (std::size_t b = 0; b < bits.size(); ++b) {
    PropId nb = props.mk_not(bits[b]);
    acc = (c >> b) & 1 ? props.mk_or(nb, acc) : props.mk_and(nb, acc);
  }
  return acc;
}

}  // namespace detail

inline BitVecEncoding assign_encodings(PropStore& props, const std::vector<SymbolId>& sigmaG,
                                       const std::vector<SymbolId>& sigmaP) {
  BitVecEncoding enc;
  enc.N = sigmaG.size();
  enc.M = sigmaP.size();
  enc.gVars = sigmaG;
  enc.pVars = sigmaP;
  enc.width = std::max<std::size_t>(1, ceil_log2(enc.N + enc.M));
  std::vector<PropId> ranges;
  for (std::size_t i = 1; i <= enc.N; ++i) {
    std::vector<PropId> v(enc.width, props.mk_false());
    std::size_t free = ceil_log2(i);
    for (std::size_t b = 0; b < free; ++b) {
      PropId a = props.fresh_var("a_" + std::to_string(i - 1) + "_" + std::to_string(b));
      v[b] = a;
      enc.registry.push_back(a);
    }
    if (free > 0 && (std::size_t{1} << free) != i) ranges.push_back(detail::bits_at_most(props, v, i - 1));
    enc.bits[sigmaG[i - 1]] = v;
  }
  for (std::size_t j = 1; j <= enc.M; ++j) {
    std::size_t value = enc.N - 1 + j;
    std::vector<PropId> v(enc.width);
    for (std::size_t b = 0; b < enc.width; ++b) v[b] = props.mk_const((value >> b) & 1);
    enc.bits[sigmaP[j - 1]] = v;
  }
  enc.range = props.mk_and(ranges);
  return enc;
}

class EncodingError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Translates an application-free formula; terms become bit vectors.
inline PropId encode_bitvec(const ExprStore& s, ExprId fStar, const BitVecEncoding& enc, PropStore& props) {
  std::unordered_map<std::uint32_t, std::vector<PropId>> tv;
  std::unordered_map<std::uint32_t, PropId> fv;
  for (ExprId e : postorder(s, fStar)) {
    const Node& n = s.node(e);
    auto F = [&](std::size_t k) { return fv.at(idx(n.args[k])); };
    auto T = [&](std::size_t k) -> const std::vector<PropId>& { return tv.at(idx(n.args[k])); };
    switch (n.kind) {
      case Kind::True: fv[idx(e)] = props.mk_true(); break;
      case Kind::False: fv[idx(e)] = props.mk_false(); break;
      case Kind::Not: fv[idx(e)] = props.mk_not(F(0)); break;
      case Kind::And: fv[idx(e)] = props.mk_and(F(0), F(1)); break;
      case Kind::Or: fv[idx(e)] = props.mk_or(F(0), F(1)); break;
      case Kind::Eq: {
        PropId acc = props.mk_true();
        for (std::size_t b = 0; b < enc.width; ++b) acc = props.mk_and(acc, props.mk_iff(T(0)[b], T(1)[b]));
        fv[idx(e)] = acc;
        break;
      }
      case Kind::Ite: {
        std::vector<PropId> v(enc.width);
        for (std::size_t b = 0; b < enc.width; ++b) v[b] = props.mk_ite(F(0), T(1)[b], T(2)[b]);
        tv[idx(e)] = std::move(v);
        break;
      }
      case Kind::PredApp:
        if (!n.args.empty()) throw EncodingError("formula still contains predicate applications");
        fv[idx(e)] = props.var(s.symbols[n.sym].name);
        break;
      case Kind::FuncApp: {
        if (!n.args.empty()) throw EncodingError("formula still contains function applications");
        auto it = enc.bits.find(n.sym);
        if (it == enc.bits.end())
          throw EncodingError("domain variable '" + s.symbols[n.sym].name + "' has no encoding");
        tv[idx(e)] = it->second;
        break;
      }
    }
  }
  return fv.at(idx(fStar));
}

// Integer denoted by `bits` under a propositional assignment.
inline long decode_bits(const PropStore& props, const std::vector<PropId>& bits, const std::vector<char>& assignment) {
  long v = 0;
  for (std::size_t b = 0; b < bits.size(); ++b)
    if (prop_eval(props, bits[b], assignment)) v |= 1L << b;
  return v;
}

}  // namespace peuf
