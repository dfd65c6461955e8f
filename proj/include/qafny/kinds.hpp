#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "qafny/ast.hpp"
#include "qafny/locus.hpp"

namespace qafny {

inline PredPtr subst_pred(const PredPtr& p, const std::string& x, std::uint64_t v);

struct Kind {
  enum class Tag { C, M, Q };
  Tag tag = Tag::C;
  std::uint64_t n = 0;  // Q width
};

using KindEnv = std::map<std::string, Kind>;

struct MVal {
  double prob = 1.0;
  std::uint64_t outcome = 0;
};

inline KindEnv kind_env_of(const Program& p) {
  KindEnv env;
  for (const auto& d : p.decls) {
    if (d.count == 0)
      throw Error(ErrCat::Kind, "KindError: qubit array " + d.name + " has size 0",
                  d.line, d.col);
    env[d.name] = Kind{Kind::Tag::Q, d.count};
  }
  return env;
}

// ---- substitution of classical binders (rules T-ExpC / S-ExpC) ----

inline AExpPtr subst_aexp(const AExpPtr& e, const std::string& x, std::uint64_t v) {
  if (!e) return e;
  auto copy = std::make_shared<AExp>(*e);
  if (auto* var = std::get_if<AVar>(&copy->node)) {
    if (var->name == x) copy->node = ANum{v};
  } else if (auto* r = std::get_if<ARange>(&copy->node)) {
    r->lo = subst_aexp(r->lo, x, v);
    if (r->hi) r->hi = subst_aexp(r->hi, x, v);
  } else if (auto* b = std::get_if<ABin>(&copy->node)) {
    b->l = subst_aexp(b->l, x, v);
    b->r = subst_aexp(b->r, x, v);
  }
  return copy;
}

inline ARange subst_arange(ARange r, const std::string& x, std::uint64_t v) {
  r.lo = subst_aexp(r.lo, x, v);
  if (r.hi) r.hi = subst_aexp(r.hi, x, v);
  return r;
}

inline BExp subst_bexp(BExp b, const std::string& x, std::uint64_t v) {
  if (auto* g = std::get_if<BBare>(&b.node)) {
    g->qubit = subst_arange(g->qubit, x, v);
    return b;
  }
  auto& c = std::get<BCmp>(b.node);
  c.l = subst_aexp(c.l, x, v);
  c.r = subst_aexp(c.r, x, v);
  if (c.result) c.result = subst_arange(*c.result, x, v);
  return b;
}

inline Block subst_block(const Block& b, const std::string& x, std::uint64_t v);

inline Stmt subst_stmt(Stmt s, const std::string& x, std::uint64_t v) {
  std::visit(overloaded{
                 [](SSkip&) {},
                 [&](SLetC& l) {
                   l.rhs = subst_aexp(l.rhs, x, v);
                   if (l.x != x) l.body = subst_block(l.body, x, v);
                 },
                 [&](SLetM& l) {
                   if (l.x != x) l.body = subst_block(l.body, x, v);
                 },
                 [&](SApply& a) {
                   for (auto& r : a.target.ranges) r = subst_arange(r, x, v);
                   if (a.u.kind == Unitary::Kind::Oracle) {
                     a.u.oracle.a = subst_aexp(a.u.oracle.a, x, v);
                     a.u.oracle.modn = subst_aexp(a.u.oracle.modn, x, v);
                   }
                 },
                 [&](SQIf& q) {
                   q.guard = subst_bexp(q.guard, x, v);
                   q.body = subst_block(q.body, x, v);
                 },
                 [&](SCIf& c) {
                   c.cond = subst_bexp(c.cond, x, v);
                   c.thn = subst_block(c.thn, x, v);
                   c.els = subst_block(c.els, x, v);
                 },
                 [&](SFor& f) {
                   f.lo = subst_aexp(f.lo, x, v);
                   f.hi = subst_aexp(f.hi, x, v);
                   if (f.x != x) {
                     if (f.guard) f.guard = subst_bexp(*f.guard, x, v);
                     f.body = subst_block(f.body, x, v);
                   }
                 },
                 [&](SAssert& a) { a.pred = subst_pred(a.pred, x, v); },
                 [](SCall&) {}},
             s.node);
  return s;
}

inline Block subst_block(const Block& b, const std::string& x, std::uint64_t v) {
  Block out;
  out.reserve(b.size());
  for (const auto& s : b) out.push_back(subst_stmt(s, x, v));
  return out;
}

inline LocusExpr subst_locusexpr(LocusExpr l, const std::string& x, std::uint64_t v) {
  for (auto& r : l.ranges) r = subst_arange(r, x, v);
  return l;
}

inline KetExpr subst_ketexpr(KetExpr k, const std::string& x, std::uint64_t v) {
  if (k.sum_idx) {
    k.sum_lo = subst_aexp(k.sum_lo, x, v);
    k.sum_hi = subst_aexp(k.sum_hi, x, v);
    if (*k.sum_idx == x) return k;  // shadowed below
  }
  for (auto& t : k.terms) {
    for (auto& f : t.amp) {
      f.num = subst_aexp(f.num, x, v);
      if (f.den) f.den = subst_aexp(f.den, x, v);
    }
    for (auto& a : t.atoms) {
      a.a = subst_aexp(a.a, x, v);
      a.n = subst_aexp(a.n, x, v);
    }
  }
  return k;
}

inline PredPtr subst_pred(const PredPtr& p, const std::string& x, std::uint64_t v) {
  if (!p) return p;
  auto copy = std::make_shared<Pred>(*p);
  std::visit(overloaded{[&](PMaps& m) {
                          m.where.locus = subst_locusexpr(m.where.locus, x, v);
                          m.where.locus2 = subst_locusexpr(m.where.locus2, x, v);
                          if (m.where.guard)
                            m.where.guard = subst_bexp(*m.where.guard, x, v);
                          if (m.where.marg)
                            m.where.marg = subst_aexp(m.where.marg, x, v);
                          m.ket = subst_ketexpr(m.ket, x, v);
                        },
                        [&](PCmp& c) {
                          c.l = subst_aexp(c.l, x, v);
                          c.r = subst_aexp(c.r, x, v);
                        },
                        [&](PAnd& a) {
                          a.l = subst_pred(a.l, x, v);
                          a.r = subst_pred(a.r, x, v);
                        },
                        [&](PSep& s) {
                          s.l = subst_pred(s.l, x, v);
                          s.r = subst_pred(s.r, x, v);
                        }},
             copy->node);
  return copy;
}

// ---- closed classical evaluation ----

inline std::uint64_t eval_closed_aexp(const AExpPtr& e) {
  return std::visit(
      overloaded{
          [](const ANum& n) { return n.v; },
          [&](const AVar& v) -> std::uint64_t {
            throw Error(ErrCat::Kind, "UnboundVariable: " + v.name, e->line, e->col);
          },
          [&](const ARange&) -> std::uint64_t {
            throw Error(ErrCat::Kind,
                        "KindError: quantum range used as classical value", e->line,
                        e->col);
          },
          [&](const ABin& b) -> std::uint64_t {
            const std::uint64_t l = eval_closed_aexp(b.l);
            const std::uint64_t r = eval_closed_aexp(b.r);
            switch (b.op) {
              case '+': return l + r;
              case '-':
                if (l < r)
                  throw Error(ErrCat::Runtime, "NegativeResult: " +
                                                   std::to_string(l) + " - " +
                                                   std::to_string(r),
                              e->line, e->col);
                return l - r;
              case '*': return l * r;
              case '/':
                if (r == 0)
                  throw Error(ErrCat::Runtime, "DivisionByZero", e->line, e->col);
                return l / r;
              case '%':
                if (r == 0)
                  throw Error(ErrCat::Runtime, "DivisionByZero", e->line, e->col);
                return l % r;
              default: {  // '^'
                std::uint64_t acc = 1;
                for (std::uint64_t i = 0; i < r; ++i) acc *= l;
                return acc;
              }
            }
          }},
      e->node);
}

// Concrete range from a surface range with closed index expressions.
inline Range eval_range(const ARange& r) {
  const std::uint64_t lo = eval_closed_aexp(r.lo);
  const std::uint64_t hi = r.hi ? eval_closed_aexp(r.hi) : lo + 1;
  if (hi < lo)
    throw Error(ErrCat::Kind, "KindError: range " + r.var + " has hi < lo");
  return Range{r.var, static_cast<int>(lo), static_cast<int>(hi)};
}

inline Locus eval_locusexpr(const LocusExpr& l) {
  Locus out;
  for (const auto& r : l.ranges) out.ranges.push_back(eval_range(r));
  out = canon(out);
  if (!out.self_disjoint())
    throw Error(ErrCat::Kind, "OverlappingLoci: locus " + out.str() +
                                  " repeats a qubit");
  return out;
}

// ---- kind checking ----

struct KindOut {
  Kind::Tag tag = Kind::Tag::C;
  Locus locus;  // populated when tag == Q
};

namespace detail {

// Disjoint union of operand loci; overlap breaks reversibility.
inline Locus kind_join(const Locus& a, const Locus& b, int line, int col) {
  if (!a.disjoint(b))
    throw Error(ErrCat::Kind,
                "OverlappingQuantumOperands: " + a.str() + " vs " + b.str(), line,
                col);
  Locus out = a;
  for (const auto& r : b.ranges) out.ranges.push_back(r);
  return canon(out);
}

}  // namespace detail

inline void check_range_bounds(const KindEnv& env, const Range& r, int line,
                               int col) {
  auto it = env.find(r.var);
  if (it == env.end())
    throw Error(ErrCat::Kind, "UnboundVariable: " + r.var, line, col);
  if (it->second.tag != Kind::Tag::Q)
    throw Error(ErrCat::Kind, "KindError: " + r.var + " is not a qubit array",
                line, col);
  if (r.hi > static_cast<int>(it->second.n) || r.lo < 0)
    throw Error(ErrCat::Kind,
                "RangeOutOfBounds: " + r.str() + " exceeds " + r.var + "[0," +
                    std::to_string(it->second.n) + ")",
                line, col);
}

inline KindOut kind_of(const KindEnv& env, const AExpPtr& e) {
  return std::visit(
      overloaded{
          [](const ANum&) { return KindOut{}; },
          [&](const AVar& v) -> KindOut {
            auto it = env.find(v.name);
            if (it == env.end())
              throw Error(ErrCat::Kind, "UnboundVariable: " + v.name, e->line,
                          e->col);
            switch (it->second.tag) {
              case Kind::Tag::C: return KindOut{Kind::Tag::C, {}};
              case Kind::Tag::M: return KindOut{Kind::Tag::M, {}};
              default:
                // Bare quantum variable stands for its full range.
                return KindOut{Kind::Tag::Q,
                               Locus{{Range{v.name, 0,
                                            static_cast<int>(it->second.n)}}}};
            }
          },
          [&](const ARange& r) -> KindOut {
            Range cr = eval_range(r);
            check_range_bounds(env, cr, e->line, e->col);
            return KindOut{Kind::Tag::Q, Locus{{cr}}};
          },
          [&](const ABin& b) -> KindOut {
            KindOut l = kind_of(env, b.l);
            KindOut r = kind_of(env, b.r);
            KindOut out;
            out.tag = std::max(l.tag, r.tag);  // lattice C ≤ M ≤ Q
            if (out.tag == Kind::Tag::Q)
              out.locus = detail::kind_join(l.locus, r.locus, e->line, e->col);
            return out;
          }},
      e->node);
}

inline KindOut kind_of(const KindEnv& env, const BExp& b) {
  if (auto* g = std::get_if<BBare>(&b.node)) {
    Range r = eval_range(g->qubit);
    check_range_bounds(env, r, b.line, b.col);
    if (r.width() != 1)
      throw Error(ErrCat::Kind, "KindError: bare guard " + r.str() +
                                    " must be a single qubit",
                  b.line, b.col);
    return KindOut{Kind::Tag::Q, Locus{{r}}};
  }
  const auto& c = std::get<BCmp>(b.node);
  KindOut l = kind_of(env, c.l);
  KindOut r = kind_of(env, c.r);
  KindOut out;
  out.tag = std::max(l.tag, r.tag);
  if (out.tag == Kind::Tag::Q)
    out.locus = detail::kind_join(l.locus, r.locus, b.line, b.col);
  if (c.result) {
    Range res = eval_range(*c.result);
    check_range_bounds(env, res, b.line, b.col);
    if (res.width() != 1)
      throw Error(ErrCat::Kind, "KindError: result qubit " + res.str() +
                                    " must be a single qubit",
                  b.line, b.col);
    if (out.tag != Kind::Tag::Q)
      throw Error(ErrCat::Kind,
                  "KindError: '@' result qubit on a classical comparison", b.line,
                  b.col);
    out.locus = detail::kind_join(out.locus, Locus{{res}}, b.line, b.col);
  }
  return out;
}

// ---- free quantum variables, in first-mention order ----

namespace detail {

struct FvCollector {
  const KindEnv& env;
  std::vector<Pos> order;

  void add_locus(const Locus& l) {
    for (const auto& p : l.positions())
      if (std::find(order.begin(), order.end(), p) == order.end())
        order.push_back(p);
  }
  void aexp(const AExpPtr& e) {
    if (!e) return;
    if (std::holds_alternative<ARange>(e->node) ||
        std::holds_alternative<AVar>(e->node)) {
      KindOut k = kind_of(env, e);
      if (k.tag == Kind::Tag::Q) add_locus(k.locus);
      return;
    }
    if (auto* b = std::get_if<ABin>(&e->node)) {
      aexp(b->l);
      aexp(b->r);
    }
  }
  void bexp(const BExp& b) {
    if (auto* g = std::get_if<BBare>(&b.node)) {
      add_locus(Locus{{eval_range(g->qubit)}});
      return;
    }
    const auto& c = std::get<BCmp>(b.node);
    aexp(c.l);
    aexp(c.r);
    if (c.result) add_locus(Locus{{eval_range(*c.result)}});
  }
  void stmt(const Stmt& s) {
    std::visit(overloaded{[](const SSkip&) {},
                          [&](const SLetC& l) {
                            block(subst_block(l.body, l.x, eval_closed_aexp(l.rhs)));
                          },
                          [&](const SLetM& l) {
                            auto it = env.find(l.measured);
                            if (it != env.end() && it->second.tag == Kind::Tag::Q)
                              add_locus(Locus{{Range{
                                  l.measured, 0, static_cast<int>(it->second.n)}}});
                            block(l.body);
                          },
                          [&](const SApply& a) {
                            add_locus(eval_locusexpr(a.target));
                            if (a.u.kind == Unitary::Kind::Oracle) {
                              aexp(a.u.oracle.a);
                              aexp(a.u.oracle.modn);
                            }
                          },
                          [&](const SQIf& q) {
                            bexp(q.guard);
                            block(q.body);
                          },
                          [&](const SCIf& c) {
                            block(c.thn);
                            block(c.els);
                          },
                          [&](const SFor& f) {
                            // Loop bodies are collected after unrolling the
                            // counter; a symbolic body cannot be evaluated here.
                            const std::uint64_t lo = eval_closed_aexp(f.lo);
                            const std::uint64_t hi = eval_closed_aexp(f.hi);
                            for (std::uint64_t j = lo; j < hi; ++j) {
                              if (f.guard) bexp(subst_bexp(*f.guard, f.x, j));
                              block(subst_block(f.body, f.x, j));
                            }
                          },
                          [](const SAssert&) {},
                          [](const SCall&) {}},
               s.node);
  }
  void block(const Block& b) {
    for (const auto& s : b) stmt(s);
  }
};

}  // namespace detail

inline Locus fv(const KindEnv& env, const AExpPtr& e) {
  detail::FvCollector c{env, {}};
  c.aexp(e);
  return locus_from_positions(c.order);
}

inline Locus fv(const KindEnv& env, const BExp& b) {
  detail::FvCollector c{env, {}};
  c.bexp(b);
  return locus_from_positions(c.order);
}

inline Locus fv(const KindEnv& env, const Stmt& s) {
  detail::FvCollector c{env, {}};
  c.stmt(s);
  return locus_from_positions(c.order);
}

inline Locus fv(const KindEnv& env, const Block& b) {
  detail::FvCollector c{env, {}};
  c.block(b);
  return locus_from_positions(c.order);
}

inline void wf_locus_domain(const KindEnv& env, const std::vector<Locus>& loci) {
  for (const auto& l : loci) {
    for (const auto& r : l.ranges) check_range_bounds(env, r, 0, 0);
    if (!l.self_disjoint())
      throw Error(ErrCat::Kind, "OverlappingLoci: " + l.str() + " overlaps itself");
  }
  for (std::size_t i = 0; i < loci.size(); ++i)
    for (std::size_t j = i + 1; j < loci.size(); ++j)
      if (!loci[i].disjoint(loci[j]))
        throw Error(ErrCat::Kind, "OverlappingLoci: " + loci[i].str() + " vs " +
                                      loci[j].str());
}

}  // namespace qafny
