#pragma once

#include <sstream>
#include <string>

#include "qafny/ast.hpp"
#include "qafny/diag.hpp"

namespace qafny {

namespace detail {

// Precedence levels: 1 additive, 2 multiplicative, 3 power, 4 atom.
inline int aexp_level(const AExp& e) {
  if (auto* b = std::get_if<ABin>(&e.node)) {
    switch (b->op) {
      case '+': case '-': return 1;
      case '*': case '/': case '%': return 2;
      default: return 3;
    }
  }
  return 4;
}

inline void print_aexp(std::ostream& os, const AExpPtr& e, int min_level = 1);

inline void print_arange(std::ostream& os, const ARange& r) {
  os << r.var << '[';
  print_aexp(os, r.lo);
  if (r.hi) {
    os << ',';
    print_aexp(os, r.hi);
    os << ')';
  } else {
    os << ']';
  }
}

inline void print_aexp(std::ostream& os, const AExpPtr& e, int min_level) {
  const int lvl = aexp_level(*e);
  const bool paren = lvl < min_level;
  if (paren) os << '(';
  std::visit(overloaded{[&](const ANum& n) { os << n.v; },
                        [&](const AVar& v) { os << v.name; },
                        [&](const ARange& r) { print_arange(os, r); },
                        [&](const ABin& b) {
                          // Left child keeps this level; right child needs one
                          // tighter (all our operators are left-associative
                          // except ^, which is right-associative).
                          if (b.op == '^') {
                            print_aexp(os, b.l, 4);
                            os << '^';
                            print_aexp(os, b.r, 3);
                          } else {
                            print_aexp(os, b.l, lvl);
                            os << ' ' << b.op << ' ';
                            print_aexp(os, b.r, lvl + 1);
                          }
                        }},
             e->node);
  if (paren) os << ')';
}

inline void print_bexp(std::ostream& os, const BExp& b) {
  std::visit(overloaded{[&](const BBare& g) { print_arange(os, g.qubit); },
                        [&](const BCmp& c) {
                          print_aexp(os, c.l);
                          os << ' ' << c.op << ' ';
                          print_aexp(os, c.r);
                          if (c.result) {
                            os << " @ ";
                            print_arange(os, *c.result);
                          }
                        }},
             b.node);
}

inline void print_locus(std::ostream& os, const LocusExpr& l) {
  for (std::size_t i = 0; i < l.ranges.size(); ++i) {
    if (i) os << " ++ ";
    print_arange(os, l.ranges[i]);
  }
}

inline void print_oq(std::ostream& os, const OqProgram& body) {
  for (const auto& i : body) {
    switch (i.op) {
      case OqInst::Op::Id: os << "ID " << i.q; break;
      case OqInst::Op::X: os << "X " << i.q; break;
      case OqInst::Op::Rz: os << "RZ " << i.m << ' ' << i.q; break;
      case OqInst::Op::Rzinv: os << "RZinv " << i.m << ' ' << i.q; break;
      case OqInst::Op::Sr: os << "SR " << i.m; break;
      case OqInst::Op::Srinv: os << "SRinv " << i.m; break;
      case OqInst::Op::Qft: os << "QFT " << i.m; break;
      case OqInst::Op::Rqft: os << "RQFT " << i.m; break;
      case OqInst::Op::Lshift: os << "Lshift"; break;
      case OqInst::Op::Rshift: os << "Rshift"; break;
      case OqInst::Op::Rev: os << "Rev"; break;
      case OqInst::Op::Cu:
        os << "CU " << i.q << " { ";
        print_oq(os, i.body);
        os << "}";
        break;
    }
    os << "; ";
  }
}

inline void print_unitary(std::ostream& os, const Unitary& u) {
  switch (u.kind) {
    case Unitary::Kind::H: os << "H"; return;
    case Unitary::Kind::QFT: os << "QFT"; return;
    case Unitary::Kind::RQFT: os << "RQFT"; return;
    case Unitary::Kind::Dis: os << "dis"; return;
    case Unitary::Kind::Reduce:
      os << "reduce(" << u.reduce_bits << ", " << u.reduce_n << ')';
      return;
    case Unitary::Kind::Oracle: break;
  }
  switch (u.oracle.kind) {
    case Oracle::Kind::AddConst:
      // printed via += in print_stmt
      os << "+ ";
      print_aexp(os, u.oracle.a);
      return;
    case Oracle::Kind::MulMod:
    case Oracle::Kind::PowMod:
      os << (u.oracle.kind == Oracle::Kind::MulMod ? "mulmod(" : "powmod(");
      print_aexp(os, u.oracle.a);
      os << ", ";
      print_aexp(os, u.oracle.modn);
      os << ')';
      return;
    case Oracle::Kind::Raw:
      os << "oqasm { ";
      print_oq(os, u.oracle.body);
      os << '}';
      return;
  }
}

inline void print_ketexpr(std::ostream& os, const KetExpr& k) {
  if (k.sum_idx) {
    os << "sum " << *k.sum_idx << " in [";
    print_aexp(os, k.sum_lo);
    os << ',';
    print_aexp(os, k.sum_hi);
    os << "): ";
  }
  for (std::size_t t = 0; t < k.terms.size(); ++t) {
    if (t) os << " + ";
    const auto& term = k.terms[t];
    for (std::size_t i = 0; i < term.amp.size(); ++i) {
      const auto& f = term.amp[i];
      if (i == 0 && f.negate) os << '-';
      if (i) os << (f.inverted ? '/' : '*');
      switch (f.kind) {
        case AmpFactor::Kind::Ratio: print_aexp(os, f.num, 4); break;
        case AmpFactor::Kind::Sqrt:
          os << "sqrt(";
          print_aexp(os, f.num);
          os << ')';
          break;
        case AmpFactor::Kind::Alpha:
          os << "alpha(";
          print_aexp(os, f.num, f.den ? 2 : 1);
          if (f.den) {
            os << '/';
            print_aexp(os, f.den, 3);
          }
          os << ')';
          break;
      }
    }
    if (!term.amp.empty()) os << ' ';
    for (const auto& a : term.atoms) {
      os << '|';
      switch (a.kind) {
        case KetAtom::Kind::BitLiteral: os << a.bits; break;
        case KetAtom::Kind::Rep:
          os << "rep(";
          print_aexp(os, a.a);
          os << ',';
          print_aexp(os, a.n);
          os << ')';
          break;
        case KetAtom::Kind::Value:
          os << "bits(";
          print_aexp(os, a.a);
          os << ',';
          print_aexp(os, a.n);
          os << ')';
          break;
      }
      os << '>';
    }
  }
}

inline void print_pred(std::ostream& os, const PredPtr& p) {
  std::visit(
      overloaded{[&](const PMaps& m) {
                   switch (m.where.form) {
                     case PredLocus::Form::Plain:
                       print_locus(os, m.where.locus);
                       break;
                     case PredLocus::Form::F:
                     case PredLocus::Form::U:
                       os << (m.where.form == PredLocus::Form::F ? "F(" : "U(");
                       print_bexp(os, *m.where.guard);
                       os << "; ";
                       print_locus(os, m.where.locus);
                       os << "; ";
                       print_locus(os, m.where.locus2);
                       os << ')';
                       break;
                     case PredLocus::Form::M:
                       os << "M(" << m.where.mvar << ", ";
                       print_aexp(os, m.where.marg);
                       os << "; ";
                       print_locus(os, m.where.locus);
                       os << ')';
                       break;
                   }
                   os << " |-> ";
                   print_ketexpr(os, m.ket);
                 },
                 [&](const PCmp& c) {
                   print_aexp(os, c.l);
                   os << ' ' << c.op << ' ';
                   print_aexp(os, c.r);
                 },
                 [&](const PAnd& a) {
                   print_pred(os, a.l);
                   os << " && ";
                   print_pred(os, a.r);
                 },
                 [&](const PSep& s) {
                   print_pred(os, s.l);
                   os << " * ";
                   print_pred(os, s.r);
                 }},
      p->node);
}

inline void print_block(std::ostream& os, const Block& b, int indent);

inline void print_stmt(std::ostream& os, const Stmt& s, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  os << pad;
  std::visit(
      overloaded{
          [&](const SSkip&) { os << "skip;\n"; },
          [&](const SLetC& l) {
            os << "let " << l.x << " = ";
            print_aexp(os, l.rhs);
            os << " in {\n";
            print_block(os, l.body, indent + 1);
            os << pad << "}\n";
          },
          [&](const SLetM& l) {
            os << "let " << l.x << " = measure(" << l.measured << ") in {\n";
            print_block(os, l.body, indent + 1);
            os << pad << "}\n";
          },
          [&](const SApply& a) {
            print_locus(os, a.target);
            if (a.u.kind == Unitary::Kind::Oracle &&
                a.u.oracle.kind == Oracle::Kind::AddConst) {
              os << " += ";
              print_aexp(os, a.u.oracle.a);
            } else if (a.u.kind == Unitary::Kind::Oracle &&
                       (a.u.oracle.kind == Oracle::Kind::MulMod ||
                        a.u.oracle.kind == Oracle::Kind::PowMod)) {
              os << " := ";
              print_unitary(os, a.u);
            } else {
              os << " *= ";
              print_unitary(os, a.u);
            }
            os << ";\n";
          },
          [&](const SQIf& q) {
            os << "if (";
            print_bexp(os, q.guard);
            os << ") {\n";
            print_block(os, q.body, indent + 1);
            os << pad << "}\n";
          },
          [&](const SCIf& c) {
            os << "if (";
            print_bexp(os, c.cond);
            os << ") {\n";
            print_block(os, c.thn, indent + 1);
            os << pad << "}";
            if (!c.els.empty()) {
              os << " else {\n";
              print_block(os, c.els, indent + 1);
              os << pad << "}";
            }
            os << "\n";
          },
          [&](const SFor& f) {
            os << "for " << f.x << " in [";
            print_aexp(os, f.lo);
            os << ',';
            print_aexp(os, f.hi);
            os << ')';
            if (f.guard) {
              os << " && ";
              print_bexp(os, *f.guard);
            }
            os << " {\n";
            print_block(os, f.body, indent + 1);
            os << pad << "}\n";
          },
          [&](const SAssert& a) {
            os << "assert { ";
            print_pred(os, a.pred);
            os << " };\n";
          },
          [&](const SCall& c) {
            os << c.name << '(';
            for (std::size_t i = 0; i < c.args.size(); ++i) {
              if (i) os << ", ";
              os << c.args[i];
            }
            os << ");\n";
          }},
      s.node);
}

inline void print_block(std::ostream& os, const Block& b, int indent) {
  for (const auto& s : b) print_stmt(os, s, indent);
}

}  // namespace detail

inline std::string print_program(const Program& p) {
  std::ostringstream os;
  for (const auto& d : p.decls)
    os << "qubit " << d.name << '[' << d.count << "];\n";
  for (const auto& pr : p.procs) {
    os << "def " << pr.name << '(';
    for (std::size_t i = 0; i < pr.params.size(); ++i) {
      if (i) os << ", ";
      os << pr.params[i];
    }
    os << ") {\n";
    detail::print_block(os, pr.body, 1);
    os << "}\n";
  }
  detail::print_block(os, p.body, 0);
  return os.str();
}

inline std::string print_predicate(const PredPtr& p) {
  std::ostringstream os;
  detail::print_pred(os, p);
  return os.str();
}

inline std::string print_stmt(const Stmt& s) {
  std::ostringstream os;
  detail::print_stmt(os, s, 0);
  return os.str();
}

}  // namespace qafny
