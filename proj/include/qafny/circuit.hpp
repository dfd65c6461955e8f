#pragma once

// Statement-to-gate compiler.  Declarations claim contiguous wire blocks in
// order; ancillas for control ladders are appended after them.  Virtual
// position shifts (QFT bit order, oqasm shifts) update the layout instead of
// emitting gates, except inside controlled bodies, where the entry layout is
// restored with real swaps so the control stays sound.

#include <bit>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "qafny/ast.hpp"
#include "qafny/gates.hpp"
#include "qafny/interp.hpp"
#include "qafny/kinds.hpp"
#include "qafny/locus.hpp"
#include "qafny/oqasm.hpp"
#include "qafny/typecheck.hpp"

namespace qafny {

struct CompileResult {
  GateProgram gates;  // flattened: no Ctrl nodes
  Layout layout;      // final position-to-wire map, shifts applied
  // One group per measure statement, in execution order; element i is the
  // wire holding bit i of that measurement's outcome.
  std::vector<std::vector<int>> measure_wires;
};

namespace detail {

// Width cap for constructions that enumerate operand values.
inline constexpr int kEnumWidth = 16;

struct Compiler {
  KindEnv omega;
  Layout lay;
  AncillaPool pool;
  GateProgram out;
  std::set<int> measured;
  std::vector<std::vector<int>> measure_wires;

  explicit Compiler(const Program& p) : omega(kind_env_of(p)) {
    std::vector<std::pair<std::string, int>> decls;
    for (const auto& d : p.decls)
      decls.emplace_back(d.name, static_cast<int>(d.count));
    lay = make_layout(decls);
    pool.base = lay.declared;
    out.d = lay.declared;
  }

  std::vector<int> wires_of(const std::vector<Pos>& ps) const {
    std::vector<int> ws;
    ws.reserve(ps.size());
    for (const auto& p : ps) ws.push_back(lay.wire(p));
    return ws;
  }

  void push(GateProgram& dst, Gate g) {
    for (int w : gate_operands(g))
      if (measured.count(w))
        throw Error(ErrCat::Type,
                    "UnboundLocus: " + lay.pos_of.at(static_cast<std::size_t>(w)).str() +
                        " was measured away");
    dst.gates.push_back(std::move(g));
  }

  void append(GateProgram& dst, GateProgram sub) {
    for (auto& g : sub.gates) push(dst, std::move(g));
  }

  // Flip target iff each control wire carries its pattern bit.
  void mcx(GateProgram& dst, const std::vector<std::pair<int, bool>>& controls,
           int target) {
    for (const auto& [w, bit] : controls)
      if (!bit) push(dst, g_x(w));
    GateProgram core;
    core.d = out.d;
    core.gates.push_back(g_x(target));
    for (auto it = controls.rbegin(); it != controls.rend(); ++it)
      core = GateProgram{out.d, {g_ctrl(it->first, std::move(core))}};
    append(dst, std::move(core));
    for (const auto& [w, bit] : controls)
      if (!bit) push(dst, g_x(w));
  }

  void block(GateProgram& dst, const Block& b) {
    for (const auto& s : b) stmt(dst, s);
  }

  void stmt(GateProgram& dst, const Stmt& s) {
    std::visit(
        overloaded{
            [&](const SSkip&) {},
            [&](const SAssert&) {},
            [&](const SLetC& l) {
              if (kind_of(omega, l.rhs).tag != Kind::Tag::C)
                throw Error(ErrCat::Type,
                            "UnsupportedOracleLowering: let " + l.x +
                                " depends on a measurement outcome",
                            s.line, s.col);
              block(dst, subst_block(l.body, l.x, eval_closed_aexp(l.rhs)));
            },
            [&](const SLetM& l) {
              auto it = omega.find(l.measured);
              if (it == omega.end() || it->second.tag != Kind::Tag::Q)
                throw Error(ErrCat::Kind,
                            "KindError: measure of non-qubit " + l.measured,
                            s.line, s.col);
              std::vector<int> group;
              for (int i = 0; i < static_cast<int>(it->second.n); ++i) {
                const int w = lay.wire({l.measured, i});
                push(dst, g_measure(w, w));
                measured.insert(w);
                group.push_back(w);
              }
              measure_wires.push_back(std::move(group));
              KindEnv saved = omega;
              omega[l.x] = Kind{Kind::Tag::M, 0};
              block(dst, l.body);
              omega = std::move(saved);
            },
            [&](const SApply& a) { apply(dst, a, s.line, s.col); },
            [&](const SQIf& q) { qif(dst, q, s.line, s.col); },
            [&](const SCIf& c) {
              if (kind_of(omega, c.cond).tag != Kind::Tag::C)
                throw Error(ErrCat::Type,
                            "UnsupportedOracleLowering: branch depends on a "
                            "measurement outcome",
                            s.line, s.col);
              block(dst, eval_closed_bexp(c.cond) ? c.thn : c.els);
            },
            [&](const SFor& f) {
              const std::uint64_t lo = eval_closed_aexp(f.lo);
              const std::uint64_t hi = eval_closed_aexp(f.hi);
              for (std::uint64_t j = lo; j < hi; ++j) {
                if (f.guard) {
                  Stmt iter{SQIf{subst_bexp(*f.guard, f.x, j),
                                 subst_block(f.body, f.x, j)},
                            s.line, s.col};
                  stmt(dst, iter);
                } else {
                  block(dst, subst_block(f.body, f.x, j));
                }
              }
            },
            [&](const SCall& c) {
              throw Error(ErrCat::Kind,
                          "KindError: unexpanded procedure call " + c.name,
                          s.line, s.col);
            }},
        s.node);
  }

  void apply(GateProgram& dst, const SApply& a, int line, int col) {
    const Locus target = eval_locusexpr(a.target);
    for (const auto& r : target.ranges) check_range_bounds(omega, r, line, col);
    const auto ps = target.positions();
    switch (a.u.kind) {
      case Unitary::Kind::H:
        for (int w : wires_of(ps)) push(dst, g_h(w));
        break;
      case Unitary::Kind::QFT:
        qft(dst, ps, false);
        break;
      case Unitary::Kind::RQFT:
        qft(dst, ps, true);
        break;
      case Unitary::Kind::Dis:
        dis(dst, wires_of(ps));
        break;
      case Unitary::Kind::Reduce:
        throw Error(ErrCat::Type,
                    "UnsupportedOracleLowering: reduce has no gate form; only "
                    "the interpreter runs it",
                    line, col);
      case Unitary::Kind::Oracle:
        oracle(dst, target, a.u.oracle, line, col);
        break;
    }
  }

  // Emit one oqasm program on the positions ps (register "") and fold the
  // final virtual wire table back into the layout.
  void oq_block(GateProgram& dst, const std::vector<Pos>& ps,
                const OqProgram& prog) {
    SizeEnv sz{{"", static_cast<int>(ps.size())}};
    OqLayout ol;
    ol.wires[""] = wires_of(ps);
    GateProgram g = oq_lower(sz, prog, ol, pool);
    append(dst, std::move(g));
    const auto& table = ol.wires[""];
    for (std::size_t k = 0; k < ps.size(); ++k) {
      lay.wire_of[ps[k]] = table[k];
      lay.pos_of[static_cast<std::size_t>(table[k])] = ps[k];
    }
  }

  // Little-endian transform: reverse the virtual order, then the msb-first
  // oqasm QFT.  The bit reversal stays in the layout.
  void qft(GateProgram& dst, const std::vector<Pos>& ps, bool inverse) {
    const int w = static_cast<int>(ps.size());
    OqProgram prog;
    if (inverse) {
      prog.push_back(oq1(OqInst::Op::Rqft, "", w));
      prog.push_back(oq1(OqInst::Op::Rev, ""));
    } else {
      prog.push_back(oq1(OqInst::Op::Rev, ""));
      prog.push_back(oq1(OqInst::Op::Qft, "", w));
    }
    oq_block(dst, ps, prog);
  }

  // Grover mirror: H / X on every wire, a phase flip on the all-ones string,
  // then undo.
  void dis(GateProgram& dst, const std::vector<int>& ws) {
    for (int w : ws) push(dst, g_h(w));
    for (int w : ws) push(dst, g_x(w));
    GateProgram core;
    core.d = out.d;
    core.gates.push_back(g_rz(1, 1, ws.back()));
    for (std::size_t i = 0; i + 1 < ws.size(); ++i)
      core = GateProgram{out.d, {g_ctrl(ws[i], std::move(core))}};
    append(dst, std::move(core));
    for (int w : ws) push(dst, g_x(w));
    for (int w : ws) push(dst, g_h(w));
  }

  // Ripple increment by 2^m on the wires ws: highest carry first, then the
  // flip at m itself.
  void add_power(GateProgram& dst, const std::vector<int>& ws, int m) {
    const int w = static_cast<int>(ws.size());
    for (int j = w - 1; j > m; --j) {
      std::vector<std::pair<int, bool>> controls;
      for (int b = m; b < j; ++b) controls.emplace_back(ws[b], true);
      mcx(dst, controls, ws[j]);
    }
    push(dst, g_x(ws[m]));
  }

  // Phase kick of mul * value(e) onto a Phi-basis target whose position j
  // sits on wire ws[j] carrying v / 2^(w-j) turns.
  void kick(GateProgram& dst, const std::vector<int>& ws, const AExpPtr& e,
            std::int64_t mul, int line, int col) {
    const int w = static_cast<int>(ws.size());
    if (kind_of(omega, e).tag == Kind::Tag::C) {
      const std::int64_t k =
          mul * static_cast<std::int64_t>(eval_closed_aexp(e));
      for (int j = 0; j < w; ++j) add_rz(dst, k, w - j, ws[j]);
      return;
    }
    std::visit(
        overloaded{
            [&](const ANum&) {},  // unreachable: closed case above
            [&](const AVar& v) {
              auto it = omega.find(v.name);
              if (it == omega.end() || it->second.tag != Kind::Tag::Q)
                throw Error(ErrCat::Type,
                            "UnsupportedOracleLowering: operand " + v.name +
                                " depends on a measurement outcome",
                            line, col);
              kick_range(dst, ws, Range{v.name, 0, static_cast<int>(it->second.n)},
                         mul);
            },
            [&](const ARange& r) { kick_range(dst, ws, eval_range(r), mul); },
            [&](const ABin& b) {
              if (b.op == '+') {
                kick(dst, ws, b.l, mul, line, col);
                kick(dst, ws, b.r, mul, line, col);
              } else if (b.op == '*' &&
                         kind_of(omega, b.l).tag == Kind::Tag::C) {
                kick(dst, ws, b.r,
                     mul * static_cast<std::int64_t>(eval_closed_aexp(b.l)),
                     line, col);
              } else if (b.op == '*' &&
                         kind_of(omega, b.r).tag == Kind::Tag::C) {
                kick(dst, ws, b.l,
                     mul * static_cast<std::int64_t>(eval_closed_aexp(b.r)),
                     line, col);
              } else {
                throw Error(ErrCat::Type,
                            "UnsupportedOracleLowering: only sums and "
                            "constant multiples of registers lower to gates",
                            line, col);
              }
            }},
        e->node);
  }

  void kick_range(GateProgram& dst, const std::vector<int>& ws, const Range& r,
                  std::int64_t mul) {
    const int w = static_cast<int>(ws.size());
    for (int j = 0; j < w; ++j)
      for (int m = 0; m + r.lo < r.hi; ++m) {
        const int den = w - j - m;
        if (den <= 0) continue;  // whole turns
        Gate rz = g_rz(mul, den, ws[j]);
        if (rz.num == 0) continue;
        const int cw = lay.wire({r.var, r.lo + m});
        push(dst, g_ctrl(cw, GateProgram{out.d, {rz}}));
      }
  }

  void oracle(GateProgram& dst, const Locus& target, const Oracle& o, int line,
              int col) {
    const auto ps = target.positions();
    const int w = static_cast<int>(ps.size());
    switch (o.kind) {
      case Oracle::Kind::AddConst: {
        const KindOut k = kind_of(omega, o.a);
        if (k.tag == Kind::Tag::M)
          throw Error(ErrCat::Type,
                      "UnsupportedOracleLowering: operand depends on a "
                      "measurement outcome",
                      line, col);
        if (k.tag == Kind::Tag::C) {
          std::uint64_t add = eval_closed_aexp(o.a);
          add &= w >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << w) - 1;
          const auto ws = wires_of(ps);
          for (int m = 0; m < w; ++m)
            if ((add >> m) & 1) add_power(dst, ws, m);
        } else {
          if (!target.disjoint(k.locus))
            throw Error(ErrCat::Kind,
                        "OverlappingQuantumOperands: " + target.str() +
                            " also feeds the oracle",
                        line, col);
          qft(dst, ps, false);
          kick(dst, wires_of(ps), o.a, 1, line, col);
          qft(dst, ps, true);
        }
        break;
      }
      case Oracle::Kind::MulMod:
      case Oracle::Kind::PowMod: {
        const std::uint64_t a = eval_closed_aexp(o.a);
        const std::uint64_t n = eval_closed_aexp(o.modn);
        if (n == 0) throw Error(ErrCat::Runtime, "DivisionByZero", line, col);
        if (w < 64 && n > (std::uint64_t{1} << w))
          throw Error(ErrCat::Runtime,
                      "WidthMismatch: modulus " + std::to_string(n) +
                          " exceeds a " + std::to_string(w) + "-bit register",
                      line, col);
        if (w > kEnumWidth)
          throw Error(ErrCat::Type,
                      "UnsupportedOracleLowering: " + std::to_string(w) +
                          "-bit arithmetic is too wide to tabulate",
                      line, col);
        const std::uint64_t slots = std::uint64_t{1} << w;
        std::vector<std::uint64_t> table(slots);
        for (std::uint64_t v = 0; v < slots; ++v) {
          if (o.kind == Oracle::Kind::MulMod) {
            table[v] = v < n ? a % n * v % n : v;
          } else {
            std::uint64_t r = 1 % n, base = a % n, e = v;
            for (; e; e >>= 1, base = base * base % n)
              if (e & 1) r = r * base % n;
            table[v] = r;
          }
        }
        std::vector<bool> hit(slots, false);
        for (std::uint64_t v : table) {
          if (hit[v])
            throw Error(ErrCat::Type,
                        "UnsupportedOracleLowering: oracle is not a "
                        "permutation of the register values",
                        line, col);
          hit[v] = true;
        }
        perm(dst, wires_of(ps), table);
        break;
      }
      case Oracle::Kind::Raw:
        oq_block(dst, ps, o.body);
        break;
    }
  }

  // Basis permutation as cycles of transpositions.
  void perm(GateProgram& dst, const std::vector<int>& ws,
            const std::vector<std::uint64_t>& table) {
    std::vector<bool> done(table.size(), false);
    for (std::uint64_t v = 0; v < table.size(); ++v) {
      if (done[v] || table[v] == v) {
        done[v] = true;
        continue;
      }
      std::vector<std::uint64_t> cycle{v};
      for (std::uint64_t u = table[v]; u != v; u = table[u]) {
        cycle.push_back(u);
        done[u] = true;
      }
      done[v] = true;
      for (std::size_t i = cycle.size() - 1; i >= 1; --i)
        transpose(dst, ws, cycle[i - 1], cycle[i]);
    }
  }

  // |u> <-> |v>: rotate the difference onto one pivot bit with CX fans, flip
  // the pivot under a full-pattern control, and undo the fans.
  void transpose(GateProgram& dst, const std::vector<int>& ws, std::uint64_t u,
                 std::uint64_t v) {
    const int w = static_cast<int>(ws.size());
    const std::uint64_t diff = u ^ v;
    const int t = std::countr_zero(diff);
    if ((u >> t) & 1) std::swap(u, v);
    std::vector<Gate> fan;
    for (int b = 0; b < w; ++b)
      if (b != t && ((diff >> b) & 1)) fan.push_back(g_cx(ws[t], ws[b]));
    for (const auto& g : fan) push(dst, g);
    std::vector<std::pair<int, bool>> controls;
    for (int b = 0; b < w; ++b)
      if (b != t) controls.emplace_back(ws[b], ((u >> b) & 1) != 0);
    mcx(dst, controls, ws[t]);
    for (const auto& g : fan) push(dst, g);
  }

  void qif(GateProgram& dst, const SQIf& q, int line, int col) {
    if (kind_of(omega, q.guard).tag != Kind::Tag::Q)
      throw Error(ErrCat::Kind,
                  "KindError: classical guard in a quantum conditional", line,
                  col);
    const Locus kguard = fv(omega, q.guard);
    if (!kguard.disjoint(fv(omega, q.body)))
      throw Error(ErrCat::Type,
                  "CloneViolation: guard " + kguard.str() +
                      " is also touched by the conditional body",
                  line, col);
    int ctrl = -1;
    if (const auto* b = std::get_if<BBare>(&q.guard.node)) {
      const Range r = eval_range(b->qubit);
      ctrl = lay.wire({r.var, r.lo});
    } else {
      const auto& c = std::get<BCmp>(q.guard.node);
      if (!c.result)
        throw Error(
            ErrCat::Kind,
            "KindError: quantum comparison guard needs an '@' result qubit",
            line, col);
      const Range res = eval_range(*c.result);
      const Pos rpos{res.var, res.lo};
      std::vector<Pos> ops;
      for (const auto& p : kguard.positions())
        if (!(p == rpos)) ops.push_back(p);
      if (static_cast<int>(ops.size()) > kEnumWidth)
        throw Error(ErrCat::Type,
                    "UnsupportedOracleLowering: comparison operands too wide "
                    "to tabulate",
                    line, col);
      const int rw = lay.wire(rpos);
      const auto ows = wires_of(ops);
      for (std::uint64_t v = 0; v < (std::uint64_t{1} << ops.size()); ++v) {
        Bits bits(ops.size(), '0');
        for (std::size_t i = 0; i < ops.size(); ++i)
          if ((v >> i) & 1) bits[i] = '1';
        if (cmp_values(c.op, aexp_on_ket(omega, c.l, ops, bits),
                       aexp_on_ket(omega, c.r, ops, bits))) {
          std::vector<std::pair<int, bool>> controls;
          for (std::size_t i = 0; i < ops.size(); ++i)
            controls.emplace_back(ows[i], bits[i] == '1');
          mcx(dst, controls, rw);
        }
      }
      ctrl = rw;
    }

    Layout entry = lay;
    GateProgram body;
    body.d = out.d;
    block(body, q.body);
    restore_layout(body, entry);
    push(dst, g_ctrl(ctrl, std::move(body)));
  }

  // Swap wire contents until the layout matches the entry map again; the
  // swaps live inside the conditional body, so they are controlled too.
  void restore_layout(GateProgram& body, const Layout& entry) {
    std::map<int, int> move;  // current wire -> wire it must end on
    for (const auto& [pos, w] : entry.wire_of) {
      const int cur = lay.wire(pos);
      if (cur != w) move[cur] = w;
    }
    std::set<int> seen;
    for (const auto& kv : move) {
      const int start = kv.first;
      if (seen.count(start)) continue;
      std::vector<int> cycle{start};
      seen.insert(start);
      for (int nxt = move.at(start); nxt != start; nxt = move.at(nxt)) {
        cycle.push_back(nxt);
        seen.insert(nxt);
      }
      for (std::size_t i = 1; i < cycle.size(); ++i) {
        body.gates.push_back(g_cx(cycle[0], cycle[i]));
        body.gates.push_back(g_cx(cycle[i], cycle[0]));
        body.gates.push_back(g_cx(cycle[0], cycle[i]));
      }
    }
    lay = entry;
  }
};

}  // namespace detail

inline CompileResult compile(const Program& p) {
  typecheck(kind_env_of(p), initial_env(p), Mode::C, p.body);
  detail::Compiler c(p);
  c.block(c.out, p.body);
  GateProgram flat = flatten(c.out, c.pool);
  return {std::move(flat), std::move(c.lay), std::move(c.measure_wires)};
}

}  // namespace qafny
