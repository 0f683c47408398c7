#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "peuf/expr.hpp"

namespace peuf {

enum class InstrClass { Alu, Load, Store, Branch, Jump };
enum class Bug { None, NoBypass, WrongMuxPolarity, StalePcOnBranch };
enum class MemoryModel { Abstract, WriteHistory };

inline const char* class_name(InstrClass c) {
  switch (c) {
    case InstrClass::Alu: return "alu";
    case InstrClass::Load: return "load";
    case InstrClass::Store: return "store";
    case InstrClass::Branch: return "branch";
    case InstrClass::Jump: return "jump";
  }
  return "?";
}

inline std::optional<InstrClass> parse_class(const std::string& s) {
  for (InstrClass c : {InstrClass::Alu, InstrClass::Load, InstrClass::Store, InstrClass::Branch, InstrClass::Jump})
    if (s == class_name(c)) return c;
  return std::nullopt;
}

inline const char* bug_name(Bug b) {
  switch (b) {
    case Bug::None: return "none";
    case Bug::NoBypass: return "no-bypass";
    case Bug::WrongMuxPolarity: return "wrong-mux-polarity";
    case Bug::StalePcOnBranch: return "stale-PC-on-branch";
  }
  return "?";
}

inline std::optional<Bug> parse_bug(const std::string& s) {
  for (Bug b : {Bug::None, Bug::NoBypass, Bug::WrongMuxPolarity, Bug::StalePcOnBranch})
    if (s == bug_name(b)) return b;
  if (s == "stale-pc-on-branch") return Bug::StalePcOnBranch;
  return std::nullopt;
}

struct PipelineSpec {
  int stages = 3;
  std::vector<InstrClass> classes{InstrClass::Alu};
  bool bypass = true;
  bool interlock = true;
  Bug bug = Bug::None;
  MemoryModel memory = MemoryModel::Abstract;

  bool has(InstrClass c) const { return std::find(classes.begin(), classes.end(), c) != classes.end(); }
};

class PipelineError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Builds terms with constant folding, so empty pipeline slots and reads of a
// just-written address collapse.
class TermBuilder {
 public:
  explicit TermBuilder(ExprStore& s) : s_(s) {}
  ExprStore& store() { return s_; }

  ExprId t() const { return s_.mk_true(); }
  ExprId f() const { return s_.mk_false(); }
  bool is_true(ExprId e) const { return e == s_.mk_true(); }
  bool is_false(ExprId e) const { return e == s_.mk_false(); }

  ExprId not_(ExprId a) {
    if (is_true(a)) return f();
    if (is_false(a)) return t();
    if (s_.node(a).kind == Kind::Not) return s_.node(a).args[0];
    return s_.mk_not(a);
  }
  ExprId and_(ExprId a, ExprId b) {
    if (is_false(a) || is_false(b)) return f();
    if (is_true(a)) return b;
    if (is_true(b) || a == b) return a;
    return s_.mk_and(a, b);
  }
  ExprId or_(ExprId a, ExprId b) {
    if (is_true(a) || is_true(b)) return t();
    if (is_false(a)) return b;
    if (is_false(b) || a == b) return a;
    return s_.mk_or(a, b);
  }
  ExprId eq(ExprId a, ExprId b) { return a == b ? t() : s_.mk_eq(a, b); }
  ExprId ite(ExprId c, ExprId x, ExprId y) {
    if (is_true(c) || x == y) return x;
    if (is_false(c)) return y;
    return s_.mk_ite(c, x, y);
  }
  // Formula-valued multiplexer.
  ExprId fite(ExprId c, ExprId x, ExprId y) {
    if (x == y) return x;
    return or_(and_(c, x), and_(not_(c), y));
  }

  ExprId var(const std::string& n) { return s_.mk_var(n); }
  ExprId prop(const std::string& n) { return s_.mk_prop(n); }
  ExprId app(const std::string& n, std::vector<ExprId> args) { return s_.mk_app(n, std::move(args)); }
  ExprId pred(const std::string& n, std::vector<ExprId> args) { return s_.mk_pred(n, std::move(args)); }

 private:
  ExprStore& s_;
};

struct Write {
  ExprId guard, addr, data;
};

// Read after a guarded write history, newest write outermost.
inline ExprId guarded_read(TermBuilder& b, const std::vector<Write>& history, ExprId addr, const std::string& init) {
  ExprId v = b.app(init, {addr});
  for (const Write& w : history) v = b.ite(b.and_(w.guard, b.eq(addr, w.addr)), w.data, v);
  return v;
}

// Register-file read: ITE(a=A_k, D_k, ... ITE(a=A_1, D_1, init(a))).
inline ExprId reg_read(ExprStore& s, const std::vector<std::pair<ExprId, ExprId>>& writes, ExprId addr,
                       const std::string& init = "rf_init") {
  TermBuilder b(s);
  std::vector<Write> h;
  for (auto [a, d] : writes) h.push_back({s.mk_true(), a, d});
  return guarded_read(b, h, addr, init);
}

// Abstract data memory: a state term updated only through uninterpreted functions.
inline ExprId mem_read(ExprStore& s, ExprId state, ExprId addr) { return s.mk_app("mem_read", {state, addr}); }
inline ExprId mem_write(ExprStore& s, ExprId state, ExprId addr, ExprId data) {
  return s.mk_app("mem_write", {state, addr, data});
}

struct MachineState {
  ExprId pc{};
  std::vector<Write> regFile;
  ExprId mem{};                  // abstract model
  std::vector<Write> memWrites;  // write-history model
};

namespace detail {

inline const ExprId kUnset{UINT32_MAX};

// An instruction in flight; fields a stage does not need stay unset.
struct Slot {
  ExprId valid = kUnset;
  ExprId alu = kUnset, load = kUnset, store = kUnset, branch = kUnset, jump = kUnset;
  ExprId pcv = kUnset, dst = kUnset, op = kUnset, imm = kUnset, a = kUnset, b = kUnset;
  ExprId res = kUnset, addr = kUnset;
};

class Machine {
 public:
  Machine(ExprStore& s, const PipelineSpec& spec) : b_(s), spec_(spec) {
    if (spec.stages != 3 && spec.stages != 5) throw PipelineError("stage count must be 3 or 5");
    if (spec.classes.empty()) throw PipelineError("at least one instruction class must be enabled");
    for (InstrClass c : {InstrClass::Alu, InstrClass::Load, InstrClass::Store, InstrClass::Branch, InstrClass::Jump})
      if (spec.has(c)) order_.push_back(c);
  }

  TermBuilder& builder() { return b_; }

  // Kind selectors by priority: the first enabled class is the default, every
  // other class has an opcode bit.
  void decode(Slot& x, const std::function<ExprId(InstrClass)>& bit) {
    ExprId none = b_.t();
    for (std::size_t i = 1; i < order_.size(); ++i) {
      ExprId is = bit(order_[i]);
      set_kind(x, order_[i], b_.and_(none, is));
      none = b_.and_(none, b_.not_(is));
    }
    set_kind(x, order_[0], none);
    for (InstrClass c : {InstrClass::Alu, InstrClass::Load, InstrClass::Store, InstrClass::Branch, InstrClass::Jump})
      if (!spec_.has(c)) set_kind(x, c, b_.f());
  }

  void decode_at(Slot& x, ExprId pc) {
    decode(x, [&](InstrClass c) { return b_.pred(std::string("is_") + class_name(c), {pc}); });
    x.pcv = pc;
    if (writes_regs()) x.dst = b_.app("dst", {pc});
    if (spec_.has(InstrClass::Alu)) x.op = b_.app("op", {pc});
    if (spec_.has(InstrClass::Load) || spec_.has(InstrClass::Store)) x.imm = b_.app("imm", {pc});
  }
  void decode_latch(Slot& x, const std::string& prefix) {
    decode(x, [&](InstrClass c) { return b_.prop(prefix + "_is_" + class_name(c)); });
  }

  ExprId src1(ExprId pc) { return b_.app("src1", {pc}); }
  ExprId src2(ExprId pc) { return b_.app("src2", {pc}); }
  ExprId writes(const Slot& x) { return b_.or_(x.alu, x.load); }
  ExprId control(const Slot& x) { return b_.or_(x.branch, x.jump); }
  bool writes_regs() const { return spec_.has(InstrClass::Alu) || spec_.has(InstrClass::Load); }
  bool uses_mem() const { return spec_.has(InstrClass::Load) || spec_.has(InstrClass::Store); }

  ExprId alu(const Slot& x) {
    return spec_.has(InstrClass::Alu) ? b_.app("alu", {x.op, x.a, x.b}) : kUnset;
  }
  ExprId agen(const Slot& x) { return uses_mem() ? b_.app("agen", {x.a, x.imm}) : kUnset; }

  ExprId next_pc(const Slot& x, bool stale) {
    ExprId seq = b_.app("inc", {x.pcv});
    if (stale && !spec_.has(InstrClass::Branch)) return x.pcv;
    ExprId v = seq;
    if (spec_.has(InstrClass::Branch) && !stale)
      v = b_.ite(b_.and_(x.branch, b_.pred("taken", {x.a, x.b})), b_.app("target", {x.pcv}), v);
    if (spec_.has(InstrClass::Jump)) v = b_.ite(x.jump, b_.app("target", {x.pcv}), v);
    return v;
  }

  ExprId mread(const MachineState& st, ExprId addr) {
    if (spec_.memory == MemoryModel::Abstract) return b_.app("mem_read", {st.mem, addr});
    return guarded_read(b_, st.memWrites, addr, "mem_init");
  }
  void mwrite(MachineState& st, ExprId guard, ExprId addr, ExprId data) {
    if (b_.is_false(guard)) return;
    if (spec_.memory == MemoryModel::Abstract) st.mem = b_.ite(guard, b_.app("mem_write", {st.mem, addr, data}), st.mem);
    else st.memWrites.push_back({guard, addr, data});
  }
  void rwrite(MachineState& st, ExprId guard, ExprId addr, ExprId data) {
    if (!b_.is_false(guard)) st.regFile.push_back({guard, addr, data});
  }
  ExprId rread(const MachineState& st, ExprId addr) { return guarded_read(b_, st.regFile, addr, "rf_init"); }

  // Value written back by a slot whose operands are known.
  ExprId result(const MachineState& st, const Slot& x, ExprId addr) {
    ExprId r = alu(x);
    if (spec_.has(InstrClass::Load)) {
      ExprId ld = mread(st, addr);
      r = r == kUnset ? ld : b_.ite(x.load, ld, r);
    }
    return r;
  }

  // One step of the specification machine, applied when `enable` holds.
  void spec_step(MachineState& st, ExprId enable) {
    if (b_.is_false(enable)) return;
    Slot x;
    decode_at(x, st.pc);
    x.a = rread(st, src1(st.pc));
    x.b = rread(st, src2(st.pc));
    ExprId addr = agen(x);
    if (writes_regs()) rwrite(st, b_.and_(enable, writes(x)), x.dst, result(st, x, addr));
    if (spec_.has(InstrClass::Store)) mwrite(st, b_.and_(enable, x.store), addr, x.b);
    st.pc = b_.ite(enable, next_pc(x, false), st.pc);
  }

  const PipelineSpec& spec() const { return spec_; }

  Slot bubble() {
    Slot x;
    x.valid = b_.f();
    x.alu = x.load = x.store = x.branch = x.jump = b_.f();
    return x;
  }
  bool empty(const Slot& x) const { return x.valid == kUnset || b_.is_false(x.valid); }

 private:
  void set_kind(Slot& x, InstrClass c, ExprId v) {
    switch (c) {
      case InstrClass::Alu: x.alu = v; break;
      case InstrClass::Load: x.load = v; break;
      case InstrClass::Store: x.store = v; break;
      case InstrClass::Branch: x.branch = v; break;
      case InstrClass::Jump: x.jump = v; break;
    }
  }

  TermBuilder b_;
  PipelineSpec spec_;
  std::vector<InstrClass> order_;
};

struct PipeState {
  MachineState arch;
  Slot d, e, m, w;  // d and m are used by the 5-stage machine only
};

// Operand value with forwarding, youngest producer first. Each select line
// excludes the younger hits, so the multiplexer is one-hot. The no-bypass bug
// drops the youngest producer, the polarity bug swaps its data inputs.
inline ExprId bypass(Machine& mc, const std::vector<std::pair<ExprId, ExprId>>& producers, ExprId regValue) {
  TermBuilder& b = mc.builder();
  const Bug bug = mc.spec().bug;
  if (!mc.spec().bypass) return regValue;
  std::vector<std::pair<ExprId, ExprId>> lines;
  ExprId younger = b.f();
  for (std::size_t i = 0; i < producers.size(); ++i) {
    auto [hit, data] = producers[i];
    if (!(i == 0 && bug == Bug::NoBypass)) lines.push_back({b.and_(hit, b.not_(younger)), data});
    younger = b.or_(younger, hit);
  }
  ExprId v = regValue;
  for (std::size_t i = lines.size(); i-- > 0;) {
    auto [sel, data] = lines[i];
    v = (i == 0 && bug == Bug::WrongMuxPolarity) ? b.ite(sel, v, data) : b.ite(sel, data, v);
  }
  return v;
}

class Pipeline3 {
 public:
  explicit Pipeline3(Machine& mc) : mc_(mc) {}

  PipeState initial() {
    TermBuilder& b = mc_.builder();
    PipeState q;
    q.arch.pc = b.var("pc");
    q.arch.mem = b.var("mem0");
    q.e.valid = b.prop("E_valid");
    mc_.decode_latch(q.e, "E");
    q.e.dst = mc_.writes_regs() ? b.var("E_dst") : kUnset;
    q.e.op = b.var("E_op");
    q.e.imm = b.var("E_imm");
    q.e.a = b.var("E_a");
    q.e.b = b.var("E_b");
    q.w.valid = b.prop("W_valid");
    mc_.decode_latch(q.w, "W");
    q.w.dst = b.var("W_dst");
    q.w.res = b.var("W_res");
    return q;
  }

  // Returns whether an instruction was fetched.
  ExprId step(PipeState& q, bool fetchEnabled) {
    TermBuilder& b = mc_.builder();
    MachineState& st = q.arch;
    const MachineState regsBefore = st;
    // WB
    if (mc_.writes_regs() && !mc_.empty(q.w))
      mc_.rwrite(st, b.and_(q.w.valid, mc_.writes(q.w)), q.w.dst, q.w.res);
    // EX: result and memory access
    Slot w = mc_.bubble();
    ExprId exRes = kUnset;
    if (!mc_.empty(q.e)) {
      MachineState before = st;
      ExprId addr = mc_.agen(q.e);
      if (mc_.writes_regs()) exRes = mc_.result(before, q.e, addr);
      if (mc_.spec().has(InstrClass::Store)) mc_.mwrite(st, b.and_(q.e.valid, q.e.store), addr, q.e.b);
      w = q.e;
      w.res = exRes;
    }
    // FD
    Slot e;
    ExprId fetched = b.f();
    if (fetchEnabled) {
      fetched = b.t();
      ExprId pc = st.pc;
      mc_.decode_at(e, pc);
      e.valid = b.t();
      auto operand = [&](ExprId src) {
        if (!mc_.writes_regs()) return mc_.rread(st, src);
        std::vector<std::pair<ExprId, ExprId>> producers;
        if (!mc_.empty(q.e))
          producers.push_back({b.and_(b.and_(q.e.valid, mc_.writes(q.e)), b.eq(src, q.e.dst)), exRes});
        if (!mc_.empty(q.w))
          producers.push_back({b.and_(b.and_(q.w.valid, mc_.writes(q.w)), b.eq(src, q.w.dst)), q.w.res});
        return bypass(mc_, producers, mc_.rread(regsBefore, src));
      };
      e.a = operand(mc_.src1(pc));
      e.b = operand(mc_.src2(pc));
      st.pc = mc_.next_pc(e, mc_.spec().bug == Bug::StalePcOnBranch);
    } else {
      e = mc_.bubble();
    }
    q.w = w;
    q.e = e;
    return fetched;
  }

  int drain_cycles() const { return 3; }

 private:
  Machine& mc_;
};

class Pipeline5 {
 public:
  explicit Pipeline5(Machine& mc) : mc_(mc) {}

  PipeState initial() {
    TermBuilder& b = mc_.builder();
    PipeState q;
    q.arch.pc = b.var("pc");
    q.arch.mem = b.var("mem0");
    q.d.valid = b.prop("D_valid");
    q.d.pcv = b.var("D_pc");
    q.e.valid = b.prop("E_valid");
    mc_.decode_latch(q.e, "E");
    q.e.dst = b.var("E_dst");
    q.e.op = b.var("E_op");
    q.e.imm = b.var("E_imm");
    q.e.a = b.var("E_a");
    q.e.b = b.var("E_b");
    q.m.valid = b.prop("M_valid");
    mc_.decode_latch(q.m, "M");
    q.m.dst = b.var("M_dst");
    q.m.res = b.var("M_res");
    q.m.addr = b.var("M_addr");
    q.m.b = b.var("M_b");
    q.w.valid = b.prop("W_valid");
    mc_.decode_latch(q.w, "W");
    q.w.dst = b.var("W_dst");
    q.w.res = b.var("W_res");
    return q;
  }

  ExprId step(PipeState& q, bool fetchEnabled) {
    TermBuilder& b = mc_.builder();
    const PipelineSpec& spec = mc_.spec();
    MachineState& st = q.arch;
    const MachineState regsBefore = st;
    // WB
    if (mc_.writes_regs() && !mc_.empty(q.w))
      mc_.rwrite(st, b.and_(q.w.valid, mc_.writes(q.w)), q.w.dst, q.w.res);
    // MEM
    Slot w = mc_.bubble();
    ExprId memData = kUnset;
    if (!mc_.empty(q.m)) {
      MachineState before = st;
      memData = q.m.res;
      if (spec.has(InstrClass::Load)) {
        ExprId ld = mc_.mread(before, q.m.addr);
        memData = spec.has(InstrClass::Alu) ? b.ite(q.m.load, ld, q.m.res) : ld;
      }
      if (spec.has(InstrClass::Store)) mc_.mwrite(st, b.and_(q.m.valid, q.m.store), q.m.addr, q.m.b);
      w = q.m;
      w.res = memData;
    }
    // EX
    Slot m = mc_.bubble();
    if (!mc_.empty(q.e)) {
      m = q.e;
      m.res = mc_.alu(q.e);
      m.addr = mc_.agen(q.e);
    }
    // ID
    Slot e = mc_.bubble();
    ExprId stall = b.f(), redirect = b.f(), control = b.f();
    Slot d;
    if (!mc_.empty(q.d)) {
      mc_.decode_at(d, q.d.pcv);
      d.valid = q.d.valid;
      ExprId s1 = mc_.src1(q.d.pcv), s2 = mc_.src2(q.d.pcv);
      auto operand = [&](ExprId src) {
        if (!mc_.writes_regs()) return mc_.rread(st, src);
        std::vector<std::pair<ExprId, ExprId>> producers;
        if (spec.has(InstrClass::Alu) && !mc_.empty(q.e))
          producers.push_back({b.and_(b.and_(q.e.valid, q.e.alu), b.eq(src, q.e.dst)), m.res});
        if (!mc_.empty(q.m))
          producers.push_back({b.and_(b.and_(q.m.valid, mc_.writes(q.m)), b.eq(src, q.m.dst)), memData});
        if (!mc_.empty(q.w))
          producers.push_back({b.and_(b.and_(q.w.valid, mc_.writes(q.w)), b.eq(src, q.w.dst)), q.w.res});
        return bypass(mc_, producers, mc_.rread(regsBefore, src));
      };
      d.a = operand(s1);
      d.b = operand(s2);
      if (spec.interlock && spec.has(InstrClass::Load) && !mc_.empty(q.e))
        stall = b.and_(b.and_(q.d.valid, b.and_(q.e.valid, q.e.load)),
                       b.or_(b.eq(s1, q.e.dst), b.eq(s2, q.e.dst)));
      e = d;
      e.valid = b.and_(q.d.valid, b.not_(stall));
      control = b.and_(q.d.valid, mc_.control(d));
      redirect = b.and_(e.valid, mc_.control(d));
    }
    // IF
    ExprId fetch = b.f();
    if (fetchEnabled) fetch = b.not_(b.and_(q.d.valid == kUnset ? b.f() : q.d.valid, b.or_(stall, control)));
    ExprId pcNext = b.ite(fetch, b.app("inc", {st.pc}), st.pc);
    if (spec.bug == Bug::StalePcOnBranch && !spec.has(InstrClass::Branch)) pcNext = st.pc;
    if (!b.is_false(redirect)) pcNext = b.ite(redirect, mc_.next_pc(d, spec.bug == Bug::StalePcOnBranch), pcNext);
    Slot nd = mc_.bubble();
    if (!b.is_false(fetch) || !b.is_false(stall)) {
      nd.valid = b.or_(fetch, b.and_(q.d.valid, stall));
      nd.pcv = mc_.empty(q.d) ? st.pc : b.ite(fetch, st.pc, q.d.pcv);
    }
    st.pc = pcNext;
    q.w = w;
    q.m = m;
    q.e = e;
    q.d = nd;
    return fetch;
  }

  int drain_cycles() const { return 5; }

 private:
  Machine& mc_;
};

template <class P>
ExprId commuting_diagram(Machine& mc, P& pipe, int n) {
  TermBuilder& b = mc.builder();
  PipeState q0 = pipe.initial();

  PipeState impl = q0;
  std::vector<ExprId> fetched;
  for (int k = 0; k < n; ++k) fetched.push_back(pipe.step(impl, true));
  for (int k = 0; k < pipe.drain_cycles(); ++k) pipe.step(impl, false);

  PipeState flushed = q0;
  for (int k = 0; k < pipe.drain_cycles(); ++k) pipe.step(flushed, false);
  MachineState spec = flushed.arch;
  for (ExprId f : fetched) mc.spec_step(spec, f);

  std::vector<ExprId> eqs;
  eqs.push_back(b.eq(impl.arch.pc, spec.pc));
  if (mc.writes_regs()) {
    ExprId r = b.var("r");
    eqs.push_back(b.eq(mc.rread(impl.arch, r), mc.rread(spec, r)));
  }
  if (mc.uses_mem()) {
    if (mc.spec().memory == MemoryModel::Abstract) {
      eqs.push_back(b.eq(impl.arch.mem, spec.mem));
    } else {
      ExprId a = b.var("ma");
      eqs.push_back(b.eq(mc.mread(impl.arch, a), mc.mread(spec, a)));
    }
  }
  ExprId f = eqs[0];
  for (std::size_t i = 1; i < eqs.size(); ++i) f = b.and_(f, eqs[i]);
  return f;
}

}  // namespace detail

// Commuting-diagram correctness formula: n implementation steps followed by a
// flush against a flush followed by the matching specification steps.
inline ExprId correctness_formula(ExprStore& s, const PipelineSpec& spec, int n) {
  if (n < 0 || n > 3) throw PipelineError("instruction count must be between 0 and 3");
  detail::Machine mc(s, spec);
  if (spec.stages == 3) {
    detail::Pipeline3 p(mc);
    return detail::commuting_diagram(mc, p, n);
  }
  detail::Pipeline5 p(mc);
  return detail::commuting_diagram(mc, p, n);
}

}  // namespace peuf
