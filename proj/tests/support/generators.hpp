#pragma once

// Random AST and program generators for round-trip and property fuzzing.

#include <map>
#include <random>
#include <string>
#include <vector>

#include "qafny/ast.hpp"

namespace gen {

using Rng = std::mt19937_64;

inline int pick(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// ---- syntax-level generators (round-trip fuzz; not necessarily well-typed) ----

inline qafny::AExpPtr gen_aexp(Rng& rng, int depth) {
  using namespace qafny;
  if (depth <= 0 || pick(rng, 0, 2) == 0) {
    switch (pick(rng, 0, 2)) {
      case 0: return mk_num(static_cast<std::uint64_t>(pick(rng, 0, 9)));
      case 1: return mk_var(std::string(1, static_cast<char>('a' + pick(rng, 0, 3))));
      default: {
        ARange r;
        r.var = std::string(1, static_cast<char>('x' + pick(rng, 0, 2)));
        r.lo = mk_num(static_cast<std::uint64_t>(pick(rng, 0, 3)));
        if (pick(rng, 0, 1))
          r.hi = mk_num(static_cast<std::uint64_t>(pick(rng, 4, 7)));
        return std::make_shared<AExp>(AExp{r, 0, 0});
      }
    }
  }
  static const char ops[] = {'+', '-', '*', '/', '%', '^'};
  return qafny::mk_bin(ops[pick(rng, 0, 5)], gen_aexp(rng, depth - 1),
                       gen_aexp(rng, depth - 1));
}

inline qafny::ARange gen_range(Rng& rng, bool singleton) {
  qafny::ARange r;
  r.var = std::string(1, static_cast<char>('x' + pick(rng, 0, 2)));
  r.lo = gen_aexp(rng, 1);
  if (!singleton) r.hi = gen_aexp(rng, 1);
  return r;
}

inline qafny::BExp gen_bexp(Rng& rng) {
  using namespace qafny;
  if (pick(rng, 0, 2) == 0) return BExp{BBare{gen_range(rng, true)}, 0, 0};
  static const char* ops[] = {"<", "<=", "==", "!=", ">=", ">"};
  BCmp c;
  c.op = ops[pick(rng, 0, 5)];
  c.l = gen_aexp(rng, 2);
  c.r = gen_aexp(rng, 2);
  if (pick(rng, 0, 1)) {
    c.result = gen_range(rng, true);
  } else {
    // keep the guard recognizably quantum: mention a range on the left
    c.l = std::make_shared<qafny::AExp>(qafny::AExp{gen_range(rng, false), 0, 0});
  }
  return BExp{c, 0, 0};
}

inline qafny::LocusExpr gen_locusexpr(Rng& rng) {
  qafny::LocusExpr l;
  const int n = pick(rng, 1, 3);
  for (int i = 0; i < n; ++i) l.ranges.push_back(gen_range(rng, pick(rng, 0, 1)));
  return l;
}

inline qafny::OqProgram gen_oq_block(Rng& rng, int len, int width, int depth = 1);

inline qafny::OqInst gen_oq_inst(Rng& rng, int width, int depth) {
  using qafny::OqInst;
  OqInst i;
  switch (pick(rng, 0, depth > 0 ? 11 : 10)) {
    case 0: i.op = OqInst::Op::Id; i.q = pick(rng, 0, width - 1); break;
    case 1: i.op = OqInst::Op::X; i.q = pick(rng, 0, width - 1); break;
    case 2: i.op = OqInst::Op::Rz; i.m = pick(rng, 0, width); i.q = pick(rng, 0, width - 1); break;
    case 3: i.op = OqInst::Op::Rzinv; i.m = pick(rng, 0, width); i.q = pick(rng, 0, width - 1); break;
    case 4: i.op = OqInst::Op::Sr; i.m = pick(rng, 0, width - 1); break;
    case 5: i.op = OqInst::Op::Srinv; i.m = pick(rng, 0, width - 1); break;
    case 6: i.op = OqInst::Op::Qft; i.m = width; break;
    case 7: i.op = OqInst::Op::Rqft; i.m = width; break;
    case 8: i.op = OqInst::Op::Lshift; break;
    case 9: i.op = OqInst::Op::Rshift; break;
    case 10: i.op = OqInst::Op::Rev; break;
    default:
      i.op = OqInst::Op::Cu;
      i.q = pick(rng, 0, width - 1);
      i.body = gen_oq_block(rng, pick(rng, 1, 2), width, depth - 1);
      break;
  }
  return i;
}

inline qafny::OqProgram gen_oq_block(Rng& rng, int len, int width, int depth) {
  qafny::OqProgram p;
  for (int i = 0; i < len; ++i) p.push_back(gen_oq_inst(rng, width, depth));
  return p;
}

inline qafny::Unitary gen_unitary(Rng& rng) {
  using namespace qafny;
  Unitary u;
  switch (pick(rng, 0, 7)) {
    case 0: u.kind = Unitary::Kind::H; break;
    case 1: u.kind = Unitary::Kind::QFT; break;
    case 2: u.kind = Unitary::Kind::RQFT; break;
    case 3: u.kind = Unitary::Kind::Dis; break;
    case 4:
      u.kind = Unitary::Kind::Reduce;
      u.reduce_bits = pick(rng, 0, 1) ? "10" : "1";
      u.reduce_n = static_cast<std::uint64_t>(pick(rng, 1, 4));
      break;
    case 5:
      u.kind = Unitary::Kind::Oracle;
      u.oracle.kind = Oracle::Kind::AddConst;
      u.oracle.a = gen_aexp(rng, 1);
      break;
    case 6:
      u.kind = Unitary::Kind::Oracle;
      u.oracle.kind = pick(rng, 0, 1) ? Oracle::Kind::MulMod : Oracle::Kind::PowMod;
      u.oracle.a = gen_aexp(rng, 1);
      u.oracle.modn = gen_aexp(rng, 1);
      break;
    default:
      u.kind = Unitary::Kind::Oracle;
      u.oracle.kind = Oracle::Kind::Raw;
      u.oracle.body = gen_oq_block(rng, pick(rng, 1, 3), 3);
      break;
  }
  return u;
}

inline qafny::Block gen_block(Rng& rng, int depth);

inline qafny::Stmt gen_stmt(Rng& rng, int depth) {
  using namespace qafny;
  const int top = depth > 0 ? 6 : 2;
  switch (pick(rng, 0, top)) {
    case 0: return Stmt{SSkip{}, 0, 0};
    case 1:
    case 2: {
      SApply a;
      a.target = gen_locusexpr(rng);
      a.u = gen_unitary(rng);
      return Stmt{a, 0, 0};
    }
    case 3: {
      SQIf q;
      q.guard = gen_bexp(rng);
      q.body = gen_block(rng, depth - 1);
      return Stmt{q, 0, 0};
    }
    case 4: {
      SCIf c;
      BCmp cmp;
      cmp.op = "==";
      cmp.l = mk_var("a");
      cmp.r = mk_num(static_cast<std::uint64_t>(pick(rng, 0, 9)));
      c.cond = BExp{cmp, 0, 0};
      c.thn = gen_block(rng, depth - 1);
      if (pick(rng, 0, 1)) c.els = gen_block(rng, depth - 1);
      return Stmt{c, 0, 0};
    }
    case 5: {
      SFor f;
      f.x = "j";
      f.lo = gen_aexp(rng, 0);
      f.hi = gen_aexp(rng, 0);
      if (pick(rng, 0, 1)) f.guard = gen_bexp(rng);
      f.body = gen_block(rng, depth - 1);
      return Stmt{f, 0, 0};
    }
    default: {
      if (pick(rng, 0, 1)) {
        SLetC l;
        l.x = "c";
        l.rhs = gen_aexp(rng, 1);
        l.body = gen_block(rng, depth - 1);
        return Stmt{l, 0, 0};
      }
      SLetM l;
      l.x = "m";
      l.measured = "y";
      l.body = gen_block(rng, depth - 1);
      return Stmt{l, 0, 0};
    }
  }
}

inline qafny::Block gen_block(Rng& rng, int depth) {
  qafny::Block b;
  const int n = pick(rng, 1, 3);
  for (int i = 0; i < n; ++i) b.push_back(gen_stmt(rng, depth));
  return b;
}

inline qafny::Program gen_program(Rng& rng) {
  qafny::Program p;
  const int nd = pick(rng, 1, 3);
  for (int i = 0; i < nd; ++i)
    p.decls.push_back(qafny::QubitDecl{std::string(1, static_cast<char>('x' + i)),
                                       static_cast<std::uint64_t>(pick(rng, 1, 8)),
                                       0, 0});
  p.body = gen_block(rng, 2);
  return p;
}

// ---- well-typed oqasm generator ----

// Programs that satisfy the oqasm basis machine by construction and end with
// every register back in the Nor basis. `full_qft_only` restricts to
// full-precision QFTs so the program is exactly invertible.
inline qafny::OqProgram gen_oq_typed(Rng& rng, const std::map<std::string, int>& sz,
                                     int len, bool full_qft_only) {
  using namespace qafny;
  std::vector<std::string> vars;
  for (const auto& [k, v] : sz) vars.push_back(k);
  std::map<std::string, int> phi;  // precision, 0 = Nor
  auto inst = [](OqInst::Op op, const std::string& v, int m = 0, int q = 0) {
    OqInst i;
    i.op = op;
    i.var = v;
    i.m = m;
    i.q = q;
    return i;
  };
  OqProgram p;
  for (int step = 0; step < len; ++step) {
    const std::string& x = vars[static_cast<std::size_t>(
        pick(rng, 0, static_cast<int>(vars.size()) - 1))];
    const int n = sz.at(x);
    if (phi[x] > 0) {
      switch (pick(rng, 0, 2)) {
        case 0: p.push_back(inst(OqInst::Op::Sr, x, pick(rng, 0, phi[x] - 1))); break;
        case 1: p.push_back(inst(OqInst::Op::Srinv, x, pick(rng, 0, phi[x] - 1))); break;
        default:
          p.push_back(inst(OqInst::Op::Rqft, x, phi[x]));
          phi[x] = 0;
      }
      continue;
    }
    switch (pick(rng, 0, 7)) {
      case 0: p.push_back(inst(OqInst::Op::X, x, 0, pick(rng, 0, n - 1))); break;
      case 1:
        p.push_back(inst(OqInst::Op::Rz, x, pick(rng, 0, 4), pick(rng, 0, n - 1)));
        break;
      case 2:
        p.push_back(inst(OqInst::Op::Rzinv, x, pick(rng, 0, 4), pick(rng, 0, n - 1)));
        break;
      case 3: p.push_back(inst(OqInst::Op::Lshift, x)); break;
      case 4: p.push_back(inst(OqInst::Op::Rshift, x)); break;
      case 5: p.push_back(inst(OqInst::Op::Rev, x)); break;
      case 6: {
        const int prec = full_qft_only ? n : pick(rng, 1, n);
        p.push_back(inst(OqInst::Op::Qft, x, prec));
        phi[x] = prec;
        break;
      }
      default: {
        // a control on x with a basis-preserving, shift-neutral body
        std::string y;
        for (const auto& cand : vars)
          if (cand != x && phi[cand] == 0) y = cand;
        const int qc = pick(rng, 0, n - 1);
        OqInst cu = inst(OqInst::Op::Cu, x, 0, qc);
        if (y.empty()) {
          if (n < 2) { p.push_back(inst(OqInst::Op::X, x, 0, qc)); break; }
          const int qt = (qc + 1 + pick(rng, 0, n - 2)) % n;
          cu.body.push_back(inst(pick(rng, 0, 1) ? OqInst::Op::X : OqInst::Op::Rz, x,
                                 pick(rng, 0, 3), qt));
        } else {
          const int m = sz.at(y);
          switch (pick(rng, 0, 3)) {
            case 0: cu.body.push_back(inst(OqInst::Op::X, y, 0, pick(rng, 0, m - 1))); break;
            case 1:
              cu.body.push_back(inst(OqInst::Op::Rz, y, pick(rng, 0, 3), pick(rng, 0, m - 1)));
              break;
            case 2:
              cu.body.push_back(inst(OqInst::Op::Qft, y, m));
              cu.body.push_back(inst(OqInst::Op::Sr, y, pick(rng, 0, m - 1)));
              cu.body.push_back(inst(OqInst::Op::Rqft, y, m));
              break;
            default:
              cu.body.push_back(inst(OqInst::Op::Lshift, y));
              cu.body.push_back(inst(OqInst::Op::X, y, 0, pick(rng, 0, m - 1)));
              cu.body.push_back(inst(OqInst::Op::Rshift, y));
          }
        }
        p.push_back(std::move(cu));
      }
    }
  }
  for (const auto& [x, prec] : phi)
    if (prec > 0) p.push_back(inst(OqInst::Op::Rqft, x, prec));
  return p;
}

}  // namespace gen
