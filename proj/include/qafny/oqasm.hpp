#pragma once

// The reversible oracle sub-language: linear per-register state in the Nor or
// Phi basis, a basis-tracking type system, exact semantics on basis values,
// inversion, the QFT-adder metaprogram, and lowering to gates.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "qafny/ast.hpp"
#include "qafny/bits.hpp"
#include "qafny/diag.hpp"
#include "qafny/gates.hpp"

namespace qafny {

using SizeEnv = std::map<std::string, int>;  // register -> qubit count

struct OqType {
  bool phi = false;
  int n = 0;  // Phi precision
  bool operator==(const OqType& o) const { return phi == o.phi && (!phi || n == o.n); }
};
using OqTypeEnv = std::map<std::string, OqType>;

// A register is either Nor (one bit per position, position 0 read as the most
// significant when a QFT takes its value) or Phi: one shared value v with
// position k holding the phase v/2^(n-k) of a phase-gradient qubit.
struct OqVar {
  bool phi = false;
  std::vector<int> bits;  // Nor
  int n = 0;              // Phi precision
  std::uint64_t v = 0;    // Phi shared value, < 2^n
};

struct OqState {
  double phase = 0.0;  // global phase, turns in [0,1)
  std::map<std::string, OqVar> vars;
};

inline OqVar oq_nor(const std::vector<int>& bits) { return {false, bits, 0, 0}; }

// Registers are little-endian at the caller boundary: position k holds value
// bit k, matching the ket-bit-to-position identification of surface blocks.
// (The QFT itself reads positions most-significant-first; metaprograms that
// want value arithmetic bracket it with Rev, as the adder does.)
inline OqState make_oq_state(const std::map<std::string, std::uint64_t>& values,
                             const SizeEnv& sz) {
  OqState st;
  for (const auto& [x, n] : sz) {
    auto it = values.find(x);
    const std::uint64_t v = it == values.end() ? 0 : it->second;
    std::vector<int> bits(n, 0);
    for (int k = 0; k < n; ++k) bits[k] = static_cast<int>((v >> k) & 1);
    st.vars[x] = oq_nor(bits);
  }
  return st;
}

inline std::uint64_t oq_read(const OqState& st, const std::string& x) {
  const OqVar& var = st.vars.at(x);
  if (var.phi)
    throw Error(ErrCat::Runtime, "IllFormedState: reading " + x + " in Phi basis");
  std::uint64_t v = 0;
  for (std::size_t k = 0; k < var.bits.size(); ++k)
    if (var.bits[k]) v |= std::uint64_t{1} << k;
  return v;
}

inline void oq_check_wellformed(const SizeEnv& sz, const OqState& st) {
  for (const auto& [x, var] : st.vars) {
    auto it = sz.find(x);
    if (it == sz.end())
      throw Error(ErrCat::Runtime, "IllFormedState: unknown register " + x);
    if (var.phi) {
      if (var.n < 1 || var.n > it->second)
        throw Error(ErrCat::Runtime, "IllFormedState: Phi precision out of range on " + x);
      if (var.n < 64 && var.v >= (std::uint64_t(1) << var.n))
        throw Error(ErrCat::Runtime, "IllFormedState: Phi value exceeds precision on " + x);
    } else {
      if (static_cast<int>(var.bits.size()) != it->second)
        throw Error(ErrCat::Runtime, "IllFormedState: width mismatch on " + x);
      for (int b : var.bits)
        if (b != 0 && b != 1)
          throw Error(ErrCat::Runtime, "IllFormedState: non-bit value on " + x);
    }
  }
}

// ---- typing ----

namespace detail {

inline int oq_size(const SizeEnv& sz, const OqInst& i) {
  auto it = sz.find(i.var);
  if (it == sz.end())
    throw Error(ErrCat::Type, "UnboundVariable: oqasm register " + i.var, i.line, i.col);
  return it->second;
}

inline void oq_need_nor(const OqTypeEnv& env, const OqInst& i, const char* what) {
  auto it = env.find(i.var);
  if (it != env.end() && it->second.phi)
    throw Error(ErrCat::Type,
                std::string("BasisMismatch: ") + what + " needs the Nor basis on " + i.var,
                i.line, i.col);
}

inline void oq_need_pos(const SizeEnv& sz, const OqInst& i, int p) {
  if (p < 0 || p >= oq_size(sz, i))
    throw Error(ErrCat::Type,
                "RangeOutOfBounds: position " + std::to_string(p) + " on " + i.var,
                i.line, i.col);
}

// Positions an instruction sequence may touch: exact positions per register
// plus registers touched wholesale (QFT, shifts, SR).
inline void oq_footprint(const OqProgram& p, std::map<std::string, std::set<int>>& pos,
                         std::set<std::string>& whole) {
  for (const auto& i : p) {
    switch (i.op) {
      case OqInst::Op::Id:
      case OqInst::Op::X:
      case OqInst::Op::Rz:
      case OqInst::Op::Rzinv: pos[i.var].insert(i.q); break;
      case OqInst::Op::Sr:
      case OqInst::Op::Srinv:
      case OqInst::Op::Qft:
      case OqInst::Op::Rqft:
      case OqInst::Op::Lshift:
      case OqInst::Op::Rshift:
      case OqInst::Op::Rev: whole.insert(i.var); break;
      case OqInst::Op::Cu:
        pos[i.var].insert(i.q);
        oq_footprint(i.body, pos, whole);
        break;
    }
  }
}

// Net permutation of positions induced by shifts, as a dihedral element
// pi(i) = flip ? off - i : off + i (mod n). Shifts under a control must
// compose to the identity, since the compiled layout change is unconditional.
struct ShiftNet {
  bool flip = false;
  long long off = 0;
  void compose(bool f2, long long o2) {  // apply (f2,o2) after current
    off = f2 ? o2 - off : o2 + off;
    flip = flip != f2;
  }
};

// Environments agree when every register has the same basis, with a missing
// entry standing for Nor.
inline bool oq_env_equiv(const OqTypeEnv& a, const OqTypeEnv& b) {
  auto get = [](const OqTypeEnv& e, const std::string& x) {
    auto it = e.find(x);
    return it == e.end() ? OqType{} : it->second;
  };
  std::set<std::string> keys;
  for (const auto& [k, v] : a) keys.insert(k);
  for (const auto& [k, v] : b) keys.insert(k);
  for (const auto& k : keys)
    if (!(get(a, k) == get(b, k))) return false;
  return true;
}

inline void oq_shift_net(const OqProgram& p, std::map<std::string, ShiftNet>& net,
                         const SizeEnv& sz) {
  for (const auto& i : p) {
    switch (i.op) {
      case OqInst::Op::Lshift: net[i.var].compose(false, 1); break;
      case OqInst::Op::Rshift: net[i.var].compose(false, -1); break;
      case OqInst::Op::Rev:
        net[i.var].compose(true, oq_size(sz, i) - 1);
        break;
      case OqInst::Op::Cu:
        // nested controls are checked neutral by their own typing pass
        break;
      default: break;
    }
  }
}

}  // namespace detail

inline OqTypeEnv oq_typecheck(const SizeEnv& sz, OqTypeEnv env, const OqProgram& p) {
  using detail::oq_need_nor;
  using detail::oq_need_pos;
  for (const auto& i : p) {
    const int size = detail::oq_size(sz, i);
    switch (i.op) {
      case OqInst::Op::Id:
        oq_need_pos(sz, i, i.q);
        break;
      case OqInst::Op::X:
        oq_need_pos(sz, i, i.q);
        oq_need_nor(env, i, "X");
        break;
      case OqInst::Op::Rz:
      case OqInst::Op::Rzinv:
        oq_need_pos(sz, i, i.q);
        oq_need_nor(env, i, "RZ");
        if (i.m < 0)
          throw Error(ErrCat::Type, "RangeOutOfBounds: negative RZ precision", i.line, i.col);
        break;
      case OqInst::Op::Sr:
      case OqInst::Op::Srinv: {
        auto it = env.find(i.var);
        if (it == env.end() || !it->second.phi)
          throw Error(ErrCat::Type, "BasisMismatch: SR needs the Phi basis on " + i.var,
                      i.line, i.col);
        if (i.m < 0 || i.m >= it->second.n)
          throw Error(ErrCat::Type, "BasisMismatch: SR precision " + std::to_string(i.m) +
                                        " outside Phi " + std::to_string(it->second.n),
                      i.line, i.col);
        break;
      }
      case OqInst::Op::Qft:
        oq_need_nor(env, i, "QFT");
        if (i.m < 1 || i.m > size)
          throw Error(ErrCat::Type, "RangeOutOfBounds: QFT precision " + std::to_string(i.m),
                      i.line, i.col);
        env[i.var] = {true, i.m};
        break;
      case OqInst::Op::Rqft: {
        auto it = env.find(i.var);
        if (it == env.end() || !it->second.phi || it->second.n != i.m)
          throw Error(ErrCat::Type, "BasisMismatch: RQFT " + std::to_string(i.m) +
                                        " needs Phi " + std::to_string(i.m) + " on " + i.var,
                      i.line, i.col);
        env[i.var] = {false, 0};
        break;
      }
      case OqInst::Op::Lshift:
      case OqInst::Op::Rshift:
      case OqInst::Op::Rev:
        oq_need_nor(env, i, "position shifts");
        break;
      case OqInst::Op::Cu: {
        oq_need_pos(sz, i, i.q);
        oq_need_nor(env, i, "a control qubit");
        std::map<std::string, std::set<int>> pos;
        std::set<std::string> whole;
        detail::oq_footprint(i.body, pos, whole);
        if (whole.count(i.var) || pos[i.var].count(i.q))
          throw Error(ErrCat::Type,
                      "FreshnessViolation: control " + i.var + "[" + std::to_string(i.q) +
                          "] is used in the controlled body",
                      i.line, i.col);
        std::map<std::string, detail::ShiftNet> net;
        detail::oq_shift_net(i.body, net, sz);
        for (const auto& [x, sn] : net) {
          const long long n = sz.at(x);
          if (sn.flip || ((sn.off % n) + n) % n != 0)
            throw Error(ErrCat::Type,
                        "NonNeutralShiftUnderCU: net shift on " + x + " is not the identity",
                        i.line, i.col);
        }
        OqTypeEnv after = oq_typecheck(sz, env, i.body);
        if (!detail::oq_env_equiv(after, env))
          throw Error(ErrCat::Type,
                      "BasisMismatch: controlled body must preserve every register basis",
                      i.line, i.col);
        break;
      }
    }
  }
  return env;
}

// ---- semantics ----

inline void oq_eval_inst(const SizeEnv& sz, const OqInst& i, OqState& st);

inline OqState oq_eval(const SizeEnv& sz, const OqProgram& p, OqState st) {
  for (const auto& i : p) oq_eval_inst(sz, i, st);
  return st;
}

inline void oq_eval_inst(const SizeEnv& sz, const OqInst& i, OqState& st) {
  auto vit = st.vars.find(i.var);
  if (vit == st.vars.end())
    throw Error(ErrCat::Runtime, "IllFormedState: unknown register " + i.var, i.line, i.col);
  OqVar& var = vit->second;
  const int size = detail::oq_size(sz, i);
  auto need_nor = [&](const char* what) {
    if (var.phi)
      throw Error(ErrCat::Runtime,
                  std::string("IllFormedState: ") + what + " on Phi-basis " + i.var,
                  i.line, i.col);
  };
  switch (i.op) {
    case OqInst::Op::Id: break;
    case OqInst::Op::X:
      need_nor("X");
      var.bits.at(i.q) ^= 1;
      break;
    case OqInst::Op::Rz:
    case OqInst::Op::Rzinv: {
      need_nor("RZ");
      if (var.bits.at(i.q) == 1) {
        const double turn = std::ldexp(1.0, -i.m);
        st.phase = wrap_turn(st.phase + (i.op == OqInst::Op::Rz ? turn : -turn));
      }
      break;
    }
    case OqInst::Op::Sr:
    case OqInst::Op::Srinv: {
      if (!var.phi)
        throw Error(ErrCat::Runtime, "IllFormedState: SR on Nor-basis " + i.var, i.line, i.col);
      const std::uint64_t full = std::uint64_t(1) << var.n;
      const std::uint64_t step = std::uint64_t(1) << (var.n - 1 - i.m);
      var.v = i.op == OqInst::Op::Sr ? (var.v + step) % full : (var.v + full - step % full) % full;
      break;
    }
    case OqInst::Op::Qft: {
      need_nor("QFT");
      std::uint64_t y = 0;
      for (int b : var.bits) y = y * 2 + static_cast<std::uint64_t>(b);
      var.phi = true;
      var.n = i.m;
      var.v = i.m >= 64 ? y : y % (std::uint64_t(1) << i.m);
      var.bits.clear();
      break;
    }
    case OqInst::Op::Rqft: {
      if (!var.phi || var.n != i.m)
        throw Error(ErrCat::Runtime, "IllFormedState: RQFT precision mismatch on " + i.var,
                    i.line, i.col);
      std::vector<int> bits(size, 0);
      for (int j = 0; j < i.m; ++j)
        bits[size - i.m + j] = static_cast<int>((var.v >> (i.m - 1 - j)) & 1);
      var = oq_nor(bits);
      break;
    }
    case OqInst::Op::Lshift: {
      need_nor("position shifts");
      std::vector<int> out(size);
      for (int j = 0; j < size; ++j) out[j] = var.bits[(j - 1 + size) % size];
      var.bits = out;
      break;
    }
    case OqInst::Op::Rshift: {
      need_nor("position shifts");
      std::vector<int> out(size);
      for (int j = 0; j < size; ++j) out[j] = var.bits[(j + 1) % size];
      var.bits = out;
      break;
    }
    case OqInst::Op::Rev: {
      need_nor("position shifts");
      std::vector<int> out(size);
      for (int j = 0; j < size; ++j) out[j] = var.bits[size - 1 - j];
      var.bits = out;
      break;
    }
    case OqInst::Op::Cu: {
      need_nor("a control qubit");
      if (var.bits.at(i.q) == 1)
        for (const auto& b : i.body) oq_eval_inst(sz, b, st);
      break;
    }
  }
}

// ---- inversion ----

inline OqProgram oq_invert(const OqProgram& p) {
  OqProgram out;
  for (auto it = p.rbegin(); it != p.rend(); ++it) {
    OqInst j = *it;
    switch (j.op) {
      case OqInst::Op::Id:
      case OqInst::Op::X:
      case OqInst::Op::Rev: break;
      case OqInst::Op::Rz: j.op = OqInst::Op::Rzinv; break;
      case OqInst::Op::Rzinv: j.op = OqInst::Op::Rz; break;
      case OqInst::Op::Sr: j.op = OqInst::Op::Srinv; break;
      case OqInst::Op::Srinv: j.op = OqInst::Op::Sr; break;
      case OqInst::Op::Qft: j.op = OqInst::Op::Rqft; break;
      case OqInst::Op::Rqft: j.op = OqInst::Op::Qft; break;
      case OqInst::Op::Lshift: j.op = OqInst::Op::Rshift; break;
      case OqInst::Op::Rshift: j.op = OqInst::Op::Lshift; break;
      case OqInst::Op::Cu: j.body = oq_invert(j.body); break;
    }
    out.push_back(std::move(j));
  }
  return out;
}

// ---- QFT adder metaprogram ----

namespace detail {

inline OqInst oq1(OqInst::Op op, std::string var, int m = 0, int q = 0) {
  OqInst i;
  i.op = op;
  i.var = std::move(var);
  i.m = m;
  i.q = q;
  return i;
}

}  // namespace detail

// Rev a; Rev b; QFT b; (CU (a,m) (SR m b)) for m < n; RQFT b; Rev b; Rev a.
// Computes b <- (a + b) mod 2^n on little-endian n-bit registers.
inline OqProgram build_rz_adder(const std::string& a, const std::string& b, int n) {
  using detail::oq1;
  using Op = OqInst::Op;
  OqProgram p;
  p.push_back(oq1(Op::Rev, a));
  p.push_back(oq1(Op::Rev, b));
  p.push_back(oq1(Op::Qft, b, n));
  p.push_back(oq1(Op::Id, a, 0, 0));
  for (int m = 0; m < n; ++m) {
    OqInst cu = oq1(Op::Cu, a, 0, m);
    cu.body.push_back(oq1(Op::Sr, b, m));
    p.push_back(std::move(cu));
  }
  p.push_back(oq1(Op::Rqft, b, n));
  p.push_back(oq1(Op::Rev, b));
  p.push_back(oq1(Op::Rev, a));
  return p;
}

// ---- lowering to gates ----

// Virtual wire table: wires[x][k] is the concrete wire currently holding
// position k of register x. Shifts permute this table and emit nothing.
struct OqLayout {
  std::map<std::string, std::vector<int>> wires;
};

namespace detail {

inline void oq_lower_inst(const SizeEnv& sz, const OqInst& i, OqLayout& lay,
                          AncillaPool& pool, GateProgram& out);

inline void oq_lower_seq(const SizeEnv& sz, const OqProgram& p, OqLayout& lay,
                         AncillaPool& pool, GateProgram& out) {
  for (const auto& i : p) oq_lower_inst(sz, i, lay, pool, out);
}

inline void oq_lower_inst(const SizeEnv& sz, const OqInst& i, OqLayout& lay,
                          AncillaPool& pool, GateProgram& out) {
  auto wit = lay.wires.find(i.var);
  if (wit == lay.wires.end())
    throw Error(ErrCat::Type, "UnboundVariable: no wires for register " + i.var,
                i.line, i.col);
  std::vector<int>& w = wit->second;
  const int size = oq_size(sz, i);
  switch (i.op) {
    case OqInst::Op::Id: break;
    case OqInst::Op::X: out.gates.push_back(g_x(w.at(i.q))); break;
    case OqInst::Op::Rz: add_rz(out, 1, i.m, w.at(i.q)); break;
    case OqInst::Op::Rzinv: add_rz(out, -1, i.m, w.at(i.q)); break;
    case OqInst::Op::Sr:
    case OqInst::Op::Srinv: {
      // position k <= m gains 1/2^(m-k+1) turns
      const std::int64_t sign = i.op == OqInst::Op::Sr ? 1 : -1;
      for (int k = 0; k <= i.m; ++k) add_rz(out, sign, i.m - k + 1, w.at(k));
      break;
    }
    case OqInst::Op::Qft: {
      if (i.m != size)
        throw Error(ErrCat::Type,
                    "UnsupportedOracleLowering: partial-precision QFT is not injective",
                    i.line, i.col);
      // swap-free QFT: position k ends holding the phase value/2^(n-k)
      for (int k = 0; k < size; ++k) {
        out.gates.push_back(g_h(w[k]));
        for (int j = k + 1; j < size; ++j) {
          // controlled phase 1/2^(j-k+1) from position j onto position k
          const int den = j - k + 1;
          add_rz(out, 1, den + 1, w[j]);
          out.gates.push_back(g_cx(w[j], w[k]));
          add_rz(out, -1, den + 1, w[k]);
          out.gates.push_back(g_cx(w[j], w[k]));
          add_rz(out, 1, den + 1, w[k]);
        }
      }
      break;
    }
    case OqInst::Op::Rqft: {
      if (i.m != size)
        throw Error(ErrCat::Type,
                    "UnsupportedOracleLowering: partial-precision QFT is not injective",
                    i.line, i.col);
      for (int k = size - 1; k >= 0; --k) {
        for (int j = size - 1; j > k; --j) {
          const int den = j - k + 1;
          add_rz(out, -1, den + 1, w[j]);
          out.gates.push_back(g_cx(w[j], w[k]));
          add_rz(out, 1, den + 1, w[k]);
          out.gates.push_back(g_cx(w[j], w[k]));
          add_rz(out, -1, den + 1, w[k]);
        }
        out.gates.push_back(g_h(w[k]));
      }
      break;
    }
    case OqInst::Op::Lshift: {
      std::vector<int> nw(size);
      for (int j = 0; j < size; ++j) nw[j] = w[(j - 1 + size) % size];
      w = nw;
      break;
    }
    case OqInst::Op::Rshift: {
      std::vector<int> nw(size);
      for (int j = 0; j < size; ++j) nw[j] = w[(j + 1) % size];
      w = nw;
      break;
    }
    case OqInst::Op::Rev: {
      std::vector<int> nw(size);
      for (int j = 0; j < size; ++j) nw[j] = w[size - 1 - j];
      w = nw;
      break;
    }
    case OqInst::Op::Cu: {
      GateProgram body;
      body.d = out.d;
      oq_lower_seq(sz, i.body, lay, pool, body);
      GateProgram wrapped = ctrl_wrap(w.at(i.q), body, pool);
      for (auto& g : wrapped.gates) out.gates.push_back(std::move(g));
      break;
    }
  }
}

}  // namespace detail

inline GateProgram oq_lower(const SizeEnv& sz, const OqProgram& p, OqLayout& lay,
                            AncillaPool& pool) {
  GateProgram out;
  for (const auto& [x, ws] : lay.wires)
    for (int wire : ws) out.d = std::max(out.d, wire + 1);
  detail::oq_lower_seq(sz, p, lay, pool, out);
  out.d = std::max(out.d, pool.total());
  return out;
}

// ---- single-register helpers for surface `oqasm { ... }` blocks ----

// Surface blocks act on the target locus as one implicit register named "".
inline void oq_check_block(const OqProgram& p, int width, int line, int col) {
  SizeEnv sz{{"", width}};
  OqTypeEnv out;
  try {
    out = oq_typecheck(sz, {{"", {false, 0}}}, p);
  } catch (const Error& e) {
    throw Error(e.cat, e.raw, line, col);
  }
  if (out.at("").phi)
    throw Error(ErrCat::Type, "BasisMismatch: oqasm block must end in the Nor basis",
                line, col);
}

// Apply a block to one basis ket; returns the new bits and the phase delta in
// turns. Ket bit i (little-endian) is register position i.
inline std::pair<Bits, double> oq_run_ket(const OqProgram& p, const Bits& in) {
  OqState st;
  std::vector<int> bits(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) bits[i] = in[i] == '1' ? 1 : 0;
  st.vars[""] = oq_nor(bits);
  SizeEnv sz{{"", static_cast<int>(in.size())}};
  st = oq_eval(sz, p, st);
  const OqVar& var = st.vars.at("");
  if (var.phi)
    throw Error(ErrCat::Runtime, "IllFormedState: oqasm block left the Phi basis open");
  Bits out(in.size(), '0');
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = var.bits[i] ? '1' : '0';
  return {out, st.phase};
}

}  // namespace qafny
