#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace qafny {

// ---- arithmetic expressions ----

struct AExp;
using AExpPtr = std::shared_ptr<AExp>;

struct ANum {
  std::uint64_t v = 0;
};
struct AVar {
  std::string name;
};
// x[lo] (singleton) or x[lo,hi) when hi is present.
struct ARange {
  std::string var;
  AExpPtr lo;
  AExpPtr hi;
};
struct ABin {
  char op = '+';  // + - * / % ^
  AExpPtr l, r;
};

struct AExp {
  std::variant<ANum, AVar, ARange, ABin> node;
  int line = 0, col = 0;
};

inline AExpPtr mk_num(std::uint64_t v) {
  return std::make_shared<AExp>(AExp{ANum{v}, 0, 0});
}
inline AExpPtr mk_var(std::string n) {
  return std::make_shared<AExp>(AExp{AVar{std::move(n)}, 0, 0});
}
inline AExpPtr mk_bin(char op, AExpPtr l, AExpPtr r) {
  return std::make_shared<AExp>(AExp{ABin{op, std::move(l), std::move(r)}, 0, 0});
}

// ---- boolean expressions ----

// Bare qubit guard x[i], or comparison a1 op a2 with optional result qubit
// `@ x[i]` holding the outcome.
struct BBare {
  ARange qubit;
};
struct BCmp {
  std::string op;  // < <= == != >= >
  AExpPtr l, r;
  std::optional<ARange> result;
};
struct BExp {
  std::variant<BBare, BCmp> node;
  int line = 0, col = 0;
};

// ---- loci (surface form, index expressions unevaluated) ----

struct LocusExpr {
  std::vector<ARange> ranges;
};

// ---- OQASM instructions ----

struct OqInst;
using OqProgram = std::vector<OqInst>;

struct OqInst {
  enum class Op { Id, X, Rz, Rzinv, Sr, Srinv, Qft, Rqft, Lshift, Rshift, Rev, Cu };
  Op op = Op::Id;
  std::string var;   // register name; surface blocks use the implicit ""
  int m = 0;         // Rz/Sr precision; Qft/Rqft width
  int q = 0;         // qubit position (Id/X/Rz/Cu control)
  OqProgram body;    // Cu
  int line = 0, col = 0;
};

// ---- unitaries ----

struct Oracle {
  enum class Kind { AddConst, MulMod, PowMod, Raw };
  Kind kind = Kind::AddConst;
  AExpPtr a;      // AddConst addend / MulMod/PowMod multiplier base
  AExpPtr modn;   // MulMod/PowMod modulus
  OqProgram body; // Raw
};

struct Unitary {
  enum class Kind { H, QFT, RQFT, Dis, Reduce, Oracle };
  Kind kind = Kind::H;
  std::string reduce_bits;   // Reduce target c
  std::uint64_t reduce_n = 0;
  struct Oracle oracle;
};

// ---- predicates ----

// Locus position of a predicate: a plain locus or one of the transformer
// forms F(b;κ;κ'), U(b;κ;κ'), M(x,a;κ).
struct PredLocus {
  enum class Form { Plain, F, U, M };
  Form form = Form::Plain;
  LocusExpr locus;       // Plain: the locus; F/U: κ (guard part); M: κ
  LocusExpr locus2;      // F/U: κ' (body part)
  std::optional<BExp> guard;  // F/U: b
  std::string mvar;      // M: x
  AExpPtr marg;          // M: a
};

struct KetAtom {
  enum class Kind { BitLiteral, Rep, Value };
  Kind kind = Kind::BitLiteral;
  std::string bits;  // BitLiteral
  AExpPtr a;         // Rep: bit expr; Value: integer expr
  AExpPtr n;         // Rep/Value: width
};

struct AmpFactor {
  enum class Kind { Ratio, Sqrt, Alpha };
  Kind kind = Kind::Ratio;
  AExpPtr num, den;   // Ratio: num alone; Alpha: turns num/den
  bool inverted = false;  // factor preceded by '/'
  bool negate = false;    // leading '-' on the term
};

struct KetTerm {
  std::vector<AmpFactor> amp;  // product; empty = 1
  std::vector<KetAtom> atoms;  // concatenated basis fragments
};

struct KetExpr {
  std::optional<std::string> sum_idx;  // sum d in [lo,hi): ...
  AExpPtr sum_lo, sum_hi;
  std::vector<KetTerm> terms;
};

struct Pred;
using PredPtr = std::shared_ptr<Pred>;

struct PMaps {
  PredLocus where;
  KetExpr ket;
};
struct PCmp {
  std::string op;
  AExpPtr l, r;
};
struct PAnd {
  PredPtr l, r;
};
struct PSep {
  PredPtr l, r;
};

struct Pred {
  std::variant<PMaps, PCmp, PAnd, PSep> node;
  int line = 0, col = 0;
};

// ---- statements ----

struct Stmt;
using Block = std::vector<Stmt>;

struct SSkip {};
struct SLetC {
  std::string x;
  AExpPtr rhs;
  Block body;
};
struct SLetM {
  std::string x;
  std::string measured;
  Block body;
};
struct SApply {
  LocusExpr target;
  Unitary u;
};
struct SQIf {
  BExp guard;
  Block body;
};
struct SCIf {
  BExp cond;
  Block thn;
  Block els;
};
struct SFor {
  std::string x;
  AExpPtr lo, hi;
  std::optional<BExp> guard;  // per-iteration quantum conditional
  Block body;
};
struct SAssert {
  PredPtr pred;
};
struct SCall {
  std::string name;
  std::vector<std::string> args;
};

struct Stmt {
  std::variant<SSkip, SLetC, SLetM, SApply, SQIf, SCIf, SFor, SAssert, SCall> node;
  int line = 0, col = 0;
};

// ---- program ----

struct QubitDecl {
  std::string name;
  std::uint64_t count = 0;
  int line = 0, col = 0;
};

struct ProcDef {
  std::string name;
  std::vector<std::string> params;
  Block body;
};

struct Program {
  std::vector<QubitDecl> decls;
  std::vector<ProcDef> procs;
  Block body;
};

// ---- structural equality (positions ignored) ----

bool aexp_equal(const AExpPtr& a, const AExpPtr& b);

inline bool arange_equal(const ARange& a, const ARange& b) {
  return a.var == b.var && aexp_equal(a.lo, b.lo) &&
         (a.hi == nullptr) == (b.hi == nullptr) &&
         (a.hi == nullptr || aexp_equal(a.hi, b.hi));
}

inline bool aexp_equal(const AExpPtr& a, const AExpPtr& b) {
  if (!a || !b) return a == b;
  if (a->node.index() != b->node.index()) return false;
  if (auto* n = std::get_if<ANum>(&a->node)) return n->v == std::get<ANum>(b->node).v;
  if (auto* v = std::get_if<AVar>(&a->node))
    return v->name == std::get<AVar>(b->node).name;
  if (auto* r = std::get_if<ARange>(&a->node))
    return arange_equal(*r, std::get<ARange>(b->node));
  const auto& x = std::get<ABin>(a->node);
  const auto& y = std::get<ABin>(b->node);
  return x.op == y.op && aexp_equal(x.l, y.l) && aexp_equal(x.r, y.r);
}

inline bool bexp_equal(const BExp& a, const BExp& b) {
  if (a.node.index() != b.node.index()) return false;
  if (auto* g = std::get_if<BBare>(&a.node))
    return arange_equal(g->qubit, std::get<BBare>(b.node).qubit);
  const auto& x = std::get<BCmp>(a.node);
  const auto& y = std::get<BCmp>(b.node);
  if (x.op != y.op || !aexp_equal(x.l, y.l) || !aexp_equal(x.r, y.r)) return false;
  if (x.result.has_value() != y.result.has_value()) return false;
  return !x.result || arange_equal(*x.result, *y.result);
}

inline bool locusexpr_equal(const LocusExpr& a, const LocusExpr& b) {
  if (a.ranges.size() != b.ranges.size()) return false;
  for (std::size_t i = 0; i < a.ranges.size(); ++i)
    if (!arange_equal(a.ranges[i], b.ranges[i])) return false;
  return true;
}

inline bool oq_equal(const OqProgram& a, const OqProgram& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].op != b[i].op || a[i].var != b[i].var || a[i].m != b[i].m ||
        a[i].q != b[i].q || !oq_equal(a[i].body, b[i].body))
      return false;
  }
  return true;
}

bool stmt_equal(const Stmt& a, const Stmt& b);
bool pred_equal(const PredPtr& a, const PredPtr& b);

inline bool block_equal(const Block& a, const Block& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!stmt_equal(a[i], b[i])) return false;
  return true;
}

inline bool unitary_equal(const Unitary& a, const Unitary& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Unitary::Kind::Reduce:
      return a.reduce_bits == b.reduce_bits && a.reduce_n == b.reduce_n;
    case Unitary::Kind::Oracle: {
      if (a.oracle.kind != b.oracle.kind) return false;
      switch (a.oracle.kind) {
        case Oracle::Kind::AddConst: return aexp_equal(a.oracle.a, b.oracle.a);
        case Oracle::Kind::Raw: return oq_equal(a.oracle.body, b.oracle.body);
        default:
          return aexp_equal(a.oracle.a, b.oracle.a) &&
                 aexp_equal(a.oracle.modn, b.oracle.modn);
      }
    }
    default: return true;
  }
}

inline bool ketexpr_equal(const KetExpr& a, const KetExpr& b) {
  if (a.sum_idx != b.sum_idx) return false;
  if (a.sum_idx && (!aexp_equal(a.sum_lo, b.sum_lo) || !aexp_equal(a.sum_hi, b.sum_hi)))
    return false;
  if (a.terms.size() != b.terms.size()) return false;
  for (std::size_t t = 0; t < a.terms.size(); ++t) {
    const auto& x = a.terms[t];
    const auto& y = b.terms[t];
    if (x.amp.size() != y.amp.size() || x.atoms.size() != y.atoms.size())
      return false;
    for (std::size_t i = 0; i < x.amp.size(); ++i) {
      if (x.amp[i].kind != y.amp[i].kind || x.amp[i].negate != y.amp[i].negate ||
          x.amp[i].inverted != y.amp[i].inverted)
        return false;
      if (!aexp_equal(x.amp[i].num, y.amp[i].num)) return false;
      if ((x.amp[i].den == nullptr) != (y.amp[i].den == nullptr)) return false;
      if (x.amp[i].den && !aexp_equal(x.amp[i].den, y.amp[i].den)) return false;
    }
    for (std::size_t i = 0; i < x.atoms.size(); ++i) {
      if (x.atoms[i].kind != y.atoms[i].kind) return false;
      if (x.atoms[i].kind == KetAtom::Kind::BitLiteral) {
        if (x.atoms[i].bits != y.atoms[i].bits) return false;
      } else if (!aexp_equal(x.atoms[i].a, y.atoms[i].a) ||
                 !aexp_equal(x.atoms[i].n, y.atoms[i].n)) {
        return false;
      }
    }
  }
  return true;
}

inline bool predlocus_equal(const PredLocus& a, const PredLocus& b) {
  if (a.form != b.form) return false;
  if (!locusexpr_equal(a.locus, b.locus)) return false;
  switch (a.form) {
    case PredLocus::Form::Plain: return true;
    case PredLocus::Form::M:
      return a.mvar == b.mvar && aexp_equal(a.marg, b.marg);
    default:
      return locusexpr_equal(a.locus2, b.locus2) && a.guard && b.guard &&
             bexp_equal(*a.guard, *b.guard);
  }
}

inline bool pred_equal(const PredPtr& a, const PredPtr& b) {
  if (!a || !b) return a == b;
  if (a->node.index() != b->node.index()) return false;
  if (auto* m = std::get_if<PMaps>(&a->node)) {
    const auto& o = std::get<PMaps>(b->node);
    return predlocus_equal(m->where, o.where) && ketexpr_equal(m->ket, o.ket);
  }
  if (auto* c = std::get_if<PCmp>(&a->node)) {
    const auto& o = std::get<PCmp>(b->node);
    return c->op == o.op && aexp_equal(c->l, o.l) && aexp_equal(c->r, o.r);
  }
  if (auto* n = std::get_if<PAnd>(&a->node)) {
    const auto& o = std::get<PAnd>(b->node);
    return pred_equal(n->l, o.l) && pred_equal(n->r, o.r);
  }
  const auto& s = std::get<PSep>(a->node);
  const auto& o = std::get<PSep>(b->node);
  return pred_equal(s.l, o.l) && pred_equal(s.r, o.r);
}

inline bool stmt_equal(const Stmt& a, const Stmt& b) {
  if (a.node.index() != b.node.index()) return false;
  if (std::holds_alternative<SSkip>(a.node)) return true;
  if (auto* l = std::get_if<SLetC>(&a.node)) {
    const auto& o = std::get<SLetC>(b.node);
    return l->x == o.x && aexp_equal(l->rhs, o.rhs) && block_equal(l->body, o.body);
  }
  if (auto* l = std::get_if<SLetM>(&a.node)) {
    const auto& o = std::get<SLetM>(b.node);
    return l->x == o.x && l->measured == o.measured && block_equal(l->body, o.body);
  }
  if (auto* s = std::get_if<SApply>(&a.node)) {
    const auto& o = std::get<SApply>(b.node);
    return locusexpr_equal(s->target, o.target) && unitary_equal(s->u, o.u);
  }
  if (auto* s = std::get_if<SQIf>(&a.node)) {
    const auto& o = std::get<SQIf>(b.node);
    return bexp_equal(s->guard, o.guard) && block_equal(s->body, o.body);
  }
  if (auto* s = std::get_if<SCIf>(&a.node)) {
    const auto& o = std::get<SCIf>(b.node);
    return bexp_equal(s->cond, o.cond) && block_equal(s->thn, o.thn) &&
           block_equal(s->els, o.els);
  }
  if (auto* s = std::get_if<SFor>(&a.node)) {
    const auto& o = std::get<SFor>(b.node);
    if (s->x != o.x || !aexp_equal(s->lo, o.lo) || !aexp_equal(s->hi, o.hi))
      return false;
    if (s->guard.has_value() != o.guard.has_value()) return false;
    if (s->guard && !bexp_equal(*s->guard, *o.guard)) return false;
    return block_equal(s->body, o.body);
  }
  if (auto* s = std::get_if<SAssert>(&a.node))
    return pred_equal(s->pred, std::get<SAssert>(b.node).pred);
  const auto& c = std::get<SCall>(a.node);
  const auto& o = std::get<SCall>(b.node);
  return c.name == o.name && c.args == o.args;
}

inline bool program_equal(const Program& a, const Program& b) {
  if (a.decls.size() != b.decls.size()) return false;
  for (std::size_t i = 0; i < a.decls.size(); ++i)
    if (a.decls[i].name != b.decls[i].name || a.decls[i].count != b.decls[i].count)
      return false;
  if (a.procs.size() != b.procs.size()) return false;
  for (std::size_t i = 0; i < a.procs.size(); ++i)
    if (a.procs[i].name != b.procs[i].name || a.procs[i].params != b.procs[i].params ||
        !block_equal(a.procs[i].body, b.procs[i].body))
      return false;
  return block_equal(a.body, b.body);
}

}  // namespace qafny
