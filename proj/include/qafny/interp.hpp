#pragma once

// Big-step symbolic interpreter.  Every operation site re-derives its rewrite
// plan from the state's own type view through plan_prefix, so the heap walks
// through exactly the environments the checker saw; values then evolve by the
// locus-form rules: structural on Nor/Had where one applies, ketwise over the
// leading target bits of an entangled entry otherwise.

#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "qafny/ast.hpp"
#include "qafny/bits.hpp"
#include "qafny/kinds.hpp"
#include "qafny/locus.hpp"
#include "qafny/oqasm.hpp"
#include "qafny/state.hpp"
#include "qafny/typecheck.hpp"
#include "qafny/value.hpp"

namespace qafny {

using ClassicalStore = std::map<std::string, MVal>;

struct EvalOptions {
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> forced;  // one outcome per measurement, in order
  bool trace = false;
  std::ostream* trace_out = nullptr;
};

// One measurement as it happened, in execution order; width is the measured
// register's qubit count, prob the chance of this outcome given the earlier
// collapses.
struct MeasureEvent {
  double prob;
  std::uint64_t outcome;
  int width;
};

struct EvalResult {
  State state;
  ClassicalStore store;
  std::vector<MeasureEvent> measurements;
};

// ---- ket-level primitives ----

// Basis map of a reversible oracle: leading bits -> (new bits, phase turns).
using KetMap = std::function<std::pair<Bits, double>(const Bits&)>;

inline EnVal apply_oracle_kets(EnVal v, int w, const KetMap& fn) {
  for (auto& k : v.kets) {
    auto [nb, turns] = fn(k.basis.substr(0, static_cast<std::size_t>(w)));
    if (static_cast<int>(nb.size()) != w)
      throw Error(ErrCat::Runtime, "WidthMismatch: oracle changed its arity");
    k.basis = nb + k.basis.substr(static_cast<std::size_t>(w));
    k.amp *= alpha(turns);
  }
  return merge_kets(std::move(v));
}

namespace detail {

inline double inv_sqrt_pow2(int w) { return std::sqrt(std::ldexp(1.0, -w)); }

// H tensor on the leading w bits of each ket.
inline EnVal h_kets(EnVal v, int w) {
  EnVal out;
  const double norm = inv_sqrt_pow2(w);
  const std::uint64_t slots = std::uint64_t{1} << w;
  out.kets.reserve(v.kets.size() * slots);
  for (const auto& k : v.kets) {
    const std::uint64_t c = bits_value(k.basis.substr(0, static_cast<std::size_t>(w)));
    const Bits rest = k.basis.substr(static_cast<std::size_t>(w));
    for (std::uint64_t d = 0; d < slots; ++d) {
      const bool minus = std::popcount(c & d) & 1;
      out.kets.push_back(
          {k.amp * (minus ? -norm : norm), bits_of(d, w) + rest, k.stack});
    }
  }
  return merge_kets(std::move(out));
}

}  // namespace detail

// SH rules on whole Nor/Had loci; ketwise expansion on anything else.
inline QuantumValue apply_h(QuantumValue q, int w) {
  if (auto* v = std::get_if<NorVal>(&q);
      v && amp_eq(v->amp, Amp{1.0, 0.0}) && v->stack.empty()) {
    if (static_cast<int>(v->bits.size()) != w)
      throw Error(ErrCat::Runtime, "WidthMismatch: H on a partial Nor locus");
    HadVal h;
    for (char b : v->bits) h.phases.push_back(b == '1' ? 0.5 : 0.0);
    return h;
  }
  if (auto* v = std::get_if<HadVal>(&q)) {
    if (static_cast<int>(v->phases.size()) != w)
      throw Error(ErrCat::Runtime, "WidthMismatch: H on a partial Had locus");
    NorVal out;
    for (double r : v->phases) {
      if (turn_eq(r, 0.0))
        out.bits += '0';
      else if (turn_eq(r, 0.5))
        out.bits += '1';
      else
        throw Error(ErrCat::Type,
                    "TypeMismatch: H on a superposed qubit with phase " +
                        std::to_string(r) + " turns (not 0 or 1/2)");
    }
    return out;
  }
  return detail::h_kets(to_en(q), w);
}

// |c> -> sum_d alpha(+-cd / 2^w) |d> / sqrt(2^w) over the leading bits,
// values read least-significant-bit-first like every register boundary here.
inline EnVal apply_qft_kets(EnVal v, int w, bool inverse) {
  EnVal out;
  const double norm = detail::inv_sqrt_pow2(w);
  const std::uint64_t slots = std::uint64_t{1} << w;
  out.kets.reserve(v.kets.size() * slots);
  for (const auto& k : v.kets) {
    const std::uint64_t c = bits_value(k.basis.substr(0, static_cast<std::size_t>(w)));
    const Bits rest = k.basis.substr(static_cast<std::size_t>(w));
    for (std::uint64_t d = 0; d < slots; ++d) {
      const std::uint64_t m = (c * d) & (slots - 1);
      const double turns = std::ldexp(static_cast<double>(m), -w);
      out.kets.push_back({k.amp * norm * alpha(inverse ? -turns : turns),
                          bits_of(d, w) + rest, k.stack});
    }
  }
  return merge_kets(std::move(out));
}

namespace detail {

using SuffixGroups =
    std::map<std::pair<Bits, std::vector<Bits>>, std::map<std::uint64_t, Amp>>;

inline SuffixGroups group_by_suffix(const EnVal& v, int w) {
  SuffixGroups g;
  for (const auto& k : v.kets)
    g[{k.basis.substr(static_cast<std::size_t>(w)), k.stack}]
     [bits_value(k.basis.substr(0, static_cast<std::size_t>(w)))] += k.amp;
  return g;
}

}  // namespace detail

// Mean reflection over the 2^w prefix slots of each suffix group; slots with
// no ket enter as amplitude zero.
inline EnVal apply_dis_kets(EnVal v, int w) {
  EnVal out;
  const std::uint64_t slots = std::uint64_t{1} << w;
  for (const auto& [key, amps] : detail::group_by_suffix(v, w)) {
    Amp sum{0.0, 0.0};
    for (const auto& [u, z] : amps) sum += z;
    const Amp twice_mean = std::ldexp(1.0, 1 - w) * sum;
    for (std::uint64_t u = 0; u < slots; ++u) {
      auto it = amps.find(u);
      const Amp z = it == amps.end() ? Amp{0.0, 0.0} : it->second;
      out.kets.push_back({twice_mean - z, bits_of(u, w) + key.first, key.second});
    }
  }
  return merge_kets(std::move(out));
}

// Weighted variant: the |c> slot carries weight 2^{-n/4}, every other slot
// sqrt(1 - 2^{-n/2}); the reflection then runs on the weighted amplitudes.
inline EnVal apply_reduce_kets(EnVal v, const Bits& c, std::uint64_t n) {
  const int w = static_cast<int>(c.size());
  if (value_width(EnVal{v}) < w)
    throw Error(ErrCat::Runtime, "WidthMismatch: reduce pattern wider than value");
  const double wc = std::exp2(-static_cast<double>(n) / 4.0);
  const double wo = std::sqrt(1.0 - std::exp2(-static_cast<double>(n) / 2.0));
  const std::uint64_t slots = std::uint64_t{1} << w;
  const std::uint64_t cval = bits_value(c);
  EnVal out;
  for (const auto& [key, amps] : detail::group_by_suffix(v, w)) {
    Amp sum{0.0, 0.0};
    for (const auto& [u, z] : amps) sum += (u == cval ? wc : wo) * z;
    for (std::uint64_t u = 0; u < slots; ++u) {
      auto it = amps.find(u);
      const Amp z = it == amps.end() ? Amp{0.0, 0.0} : it->second;
      out.kets.push_back({std::ldexp(1.0, 1 - w) * sum - (u == cval ? wc : wo) * z,
                          bits_of(u, w) + key.first, key.second});
    }
  }
  return merge_kets(std::move(out));
}

// ---- guard evaluation ----

namespace detail {

inline int pos_index(const std::vector<Pos>& order, const Pos& p) {
  for (std::size_t i = 0; i < order.size(); ++i)
    if (order[i] == p) return static_cast<int>(i);
  throw Error(ErrCat::Runtime, "IllFormedState: " + p.str() + " missing from prefix");
}

// Arithmetic over one ket: quantum ranges read their bits from the prefix.
inline std::uint64_t aexp_on_ket(const KindEnv& omega, const AExpPtr& e,
                                 const std::vector<Pos>& order, const Bits& bits) {
  auto range_value = [&](const Range& r) {
    std::uint64_t v = 0;
    for (int i = r.lo; i < r.hi; ++i)
      if (bits[static_cast<std::size_t>(pos_index(order, Pos{r.var, i}))] == '1')
        v |= std::uint64_t{1} << (i - r.lo);
    return v;
  };
  return std::visit(
      overloaded{
          [](const ANum& n) { return n.v; },
          [&](const AVar& a) -> std::uint64_t {
            auto it = omega.find(a.name);
            if (it == omega.end() || it->second.tag != Kind::Tag::Q)
              throw Error(ErrCat::Kind, "UnboundVariable: " + a.name, e->line,
                          e->col);
            return range_value(Range{a.name, 0, static_cast<int>(it->second.n)});
          },
          [&](const ARange& r) { return range_value(eval_range(r)); },
          [&](const ABin& b) -> std::uint64_t {
            const std::uint64_t l = aexp_on_ket(omega, b.l, order, bits);
            const std::uint64_t r = aexp_on_ket(omega, b.r, order, bits);
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

inline bool cmp_values(const std::string& op, std::uint64_t l, std::uint64_t r) {
  if (op == "<") return l < r;
  if (op == "<=") return l <= r;
  if (op == "==") return l == r;
  if (op == "!=") return l != r;
  if (op == ">=") return l >= r;
  if (op == ">") return l > r;
  throw Error(ErrCat::Parse, "SyntaxError: unknown comparison " + op);
}

}  // namespace detail

// XOR the comparison value into the result qubit of every ket.  The guard's
// footprint must already lead one entangled entry; bare-qubit guards change
// nothing (the qubit itself is the control).
inline State apply_guard(const KindEnv& omega, State st, const BExp& b) {
  if (std::holds_alternative<BBare>(b.node)) return st;
  const auto& c = std::get<BCmp>(b.node);
  if (!c.result)
    throw Error(ErrCat::Kind,
                "KindError: quantum comparison guard needs an '@' result qubit",
                b.line, b.col);
  const Locus kg = fv(omega, b);
  const int e = prefix_entry(type_env_of(st), kg);
  if (e < 0)
    throw Error(ErrCat::Runtime,
                "IllFormedState: guard locus " + kg.str() + " is not a prefix");
  auto& entry = st.entries[static_cast<std::size_t>(e)];
  auto* v = std::get_if<EnVal>(&entry.value);
  if (!v)
    throw Error(ErrCat::Runtime, "IllFormedState: guard entry is not entangled");
  const auto order = kg.positions();
  const Range res = eval_range(*c.result);
  const std::size_t ridx =
      static_cast<std::size_t>(detail::pos_index(order, Pos{res.var, res.lo}));
  for (auto& k : v->kets) {
    const Bits prefix = k.basis.substr(0, order.size());
    if (detail::cmp_values(c.op, detail::aexp_on_ket(omega, c.l, order, prefix),
                           detail::aexp_on_ket(omega, c.r, order, prefix)))
      k.basis[ridx] = k.basis[ridx] == '0' ? '1' : '0';
  }
  *v = merge_kets(std::move(*v));
  return st;
}

// ---- the statement walker ----

namespace detail {

struct Interp {
  KindEnv omega;
  ClassicalStore store;
  std::mt19937_64 rng;
  std::vector<std::uint64_t> forced;
  std::size_t next_forced = 0;
  bool use_forced = false;
  bool trace = false;
  std::ostream* out = nullptr;
  bool norm_relaxed = false;  // reduce shrinks amplitude volume for good
  std::vector<MeasureEvent> measurements;

  Interp(KindEnv om, const EvalOptions& opt)
      : omega(std::move(om)),
        rng(opt.seed),
        forced(opt.forced),
        use_forced(!opt.forced.empty()),
        trace(opt.trace),
        out(opt.trace_out) {}

  AExpPtr with_store(AExpPtr e) const {
    for (const auto& [x, m] : store) e = subst_aexp(e, x, m.outcome);
    return e;
  }
  BExp with_store(BExp b) const {
    for (const auto& [x, m] : store) b = subst_bexp(std::move(b), x, m.outcome);
    return b;
  }
  LocusExpr with_store(LocusExpr l) const {
    for (const auto& [x, m] : store) l = subst_locusexpr(std::move(l), x, m.outcome);
    return l;
  }

  int to_prefix(State& st, const Locus& target, CastPolicy cast) {
    PrefixOutcome o = plan_prefix(type_env_of(st), target, cast);
    st = apply_plan_state(std::move(st), o.plan);
    return o.entry;
  }

  State block(State st, Mode g, const Block& b) {
    for (const auto& s : b) st = stmt(std::move(st), g, s);
    return st;
  }

  State stmt(State st, Mode g, const Stmt& s) {
    std::visit(
        overloaded{
            [&](const SSkip&) {},
            [&](const SLetC& l) {
              KindOut k = kind_of(omega, l.rhs);
              if (k.tag == Kind::Tag::Q)
                throw Error(ErrCat::Kind,
                            "KindError: quantum expression bound to let " + l.x,
                            s.line, s.col);
              if (k.tag == Kind::Tag::C) {
                st = block(std::move(st), g,
                           subst_block(l.body, l.x, eval_closed_aexp(l.rhs)));
              } else {
                const std::uint64_t v = eval_closed_aexp(with_store(l.rhs));
                KindEnv saved = omega;
                omega[l.x] = Kind{Kind::Tag::M, 0};
                store[l.x] = MVal{1.0, v};
                st = block(std::move(st), g, l.body);
                omega = std::move(saved);
              }
            },
            [&](const SLetM& l) {
              if (g == Mode::M)
                throw Error(ErrCat::Type,
                            "MeasureInQuantumConditional: measure of " +
                                l.measured + " under a quantum guard",
                            s.line, s.col);
              MVal mv;
              st = measure(std::move(st), l.measured, mv, s.line, s.col);
              KindEnv saved = omega;
              omega[l.x] = Kind{Kind::Tag::M, 0};
              store[l.x] = mv;
              st = block(std::move(st), g, l.body);
              omega = std::move(saved);
            },
            [&](const SApply& a) { st = apply(std::move(st), a, s.line, s.col); },
            [&](const SQIf& q) { st = qif(std::move(st), q, s.line, s.col); },
            [&](const SCIf& c) {
              st = block(std::move(st), g,
                         eval_closed_bexp(with_store(c.cond)) ? c.thn : c.els);
            },
            [&](const SFor& f) {
              const std::uint64_t lo = eval_closed_aexp(with_store(f.lo));
              const std::uint64_t hi = eval_closed_aexp(with_store(f.hi));
              for (std::uint64_t j = lo; j < hi; ++j) {
                if (f.guard) {
                  Stmt iter{SQIf{subst_bexp(*f.guard, f.x, j),
                                 subst_block(f.body, f.x, j)},
                            s.line, s.col};
                  st = stmt(std::move(st), g, iter);
                } else {
                  st = block(std::move(st), g, subst_block(f.body, f.x, j));
                }
              }
            },
            [&](const SAssert&) {},  // checked by the triples layer
            [&](const SCall& c) {
              throw Error(ErrCat::Kind,
                          "KindError: unexpanded procedure call " + c.name,
                          s.line, s.col);
            }},
        s.node);
    check_wellformed(st, g == Mode::C && !norm_relaxed);
    if (trace && out)
      *out << s.line << ":" << s.col << " " << dump_json(st) << "\n";
    return st;
  }

  State apply(State st, const SApply& a, int line, int col) {
    const Locus target = eval_locusexpr(with_store(a.target));
    for (const auto& r : target.ranges) check_range_bounds(omega, r, line, col);
    switch (a.u.kind) {
      case Unitary::Kind::H: {
        const int e = to_prefix(st, target, CastPolicy::None);
        auto& en = st.entries[static_cast<std::size_t>(e)];
        en.value = apply_h(std::move(en.value), target.width());
        break;
      }
      case Unitary::Kind::QFT:
      case Unitary::Kind::RQFT: {
        const int e = to_prefix(st, target, CastPolicy::ToEN);
        auto& en = st.entries[static_cast<std::size_t>(e)];
        en.value = apply_qft_kets(std::get<EnVal>(std::move(en.value)),
                                  target.width(),
                                  a.u.kind == Unitary::Kind::RQFT);
        break;
      }
      case Unitary::Kind::Dis: {
        const int e = to_prefix(st, target, CastPolicy::ToEN);
        auto& en = st.entries[static_cast<std::size_t>(e)];
        en.value =
            apply_dis_kets(std::get<EnVal>(std::move(en.value)), target.width());
        break;
      }
      case Unitary::Kind::Reduce: {
        if (static_cast<int>(a.u.reduce_bits.size()) != target.width())
          throw Error(ErrCat::Type,
                      "WidthMismatch: reduce pattern " + a.u.reduce_bits +
                          " does not fit " + target.str(),
                      line, col);
        const int e = to_prefix(st, target, CastPolicy::ToEN);
        auto& en = st.entries[static_cast<std::size_t>(e)];
        en.value = apply_reduce_kets(std::get<EnVal>(std::move(en.value)),
                                     a.u.reduce_bits, a.u.reduce_n);
        norm_relaxed = true;
        break;
      }
      case Unitary::Kind::Oracle:
        st = oracle(std::move(st), target, a.u.oracle, line, col);
        break;
    }
    return st;
  }

  State oracle(State st, const Locus& target, const Oracle& o, int line,
               int col) {
    const int wt = target.width();
    Locus full = target;
    KetMap fn;
    switch (o.kind) {
      case Oracle::Kind::AddConst: {
        const AExpPtr ae = with_store(o.a);
        if (kind_of(omega, ae).tag == Kind::Tag::Q) {
          const Locus ops = fv(omega, ae);
          if (!target.disjoint(ops))
            throw Error(ErrCat::Kind,
                        "OverlappingQuantumOperands: " + target.str() +
                            " also feeds the oracle",
                        line, col);
          full = concat(target, ops);
          fn = [om = &omega, ae, wt, order = ops.positions()](const Bits& b) {
            const std::uint64_t add =
                aexp_on_ket(*om, ae, order, b.substr(static_cast<std::size_t>(wt)));
            const std::uint64_t v =
                bits_value(b.substr(0, static_cast<std::size_t>(wt))) + add;
            return std::pair{bits_of(v & ((std::uint64_t{1} << wt) - 1), wt) +
                                 b.substr(static_cast<std::size_t>(wt)),
                             0.0};
          };
        } else {
          const std::uint64_t add = eval_closed_aexp(ae);
          fn = [wt, add](const Bits& b) {
            return std::pair{
                bits_of((bits_value(b) + add) & ((std::uint64_t{1} << wt) - 1), wt),
                0.0};
          };
        }
        break;
      }
      case Oracle::Kind::MulMod:
      case Oracle::Kind::PowMod: {
        const std::uint64_t a = eval_closed_aexp(with_store(o.a));
        const std::uint64_t n = eval_closed_aexp(with_store(o.modn));
        if (n == 0) throw Error(ErrCat::Runtime, "DivisionByZero", line, col);
        if (wt < 64 && n > (std::uint64_t{1} << wt))
          throw Error(ErrCat::Runtime,
                      "WidthMismatch: modulus " + std::to_string(n) +
                          " exceeds a " + std::to_string(wt) + "-bit register",
                      line, col);
        const bool is_pow = o.kind == Oracle::Kind::PowMod;
        fn = [a, n, wt, is_pow](const Bits& b) {
          const std::uint64_t v = bits_value(b);
          std::uint64_t r = v;
          if (is_pow) {
            r = 1 % n;
            std::uint64_t base = a % n, e = v;
            for (; e; e >>= 1, base = base * base % n)
              if (e & 1) r = r * base % n;
          } else if (v < n) {
            r = a % n * v % n;
          }
          return std::pair{bits_of(r, wt), 0.0};
        };
        break;
      }
      case Oracle::Kind::Raw:
        fn = [body = &o.body](const Bits& b) { return oq_run_ket(*body, b); };
        break;
    }
    const int e = to_prefix(st, full, CastPolicy::ToENIfHad);
    auto& en = st.entries[static_cast<std::size_t>(e)];
    if (auto* nor = std::get_if<NorVal>(&en.value)) {
      auto [nb, turns] = fn(nor->bits);
      nor->bits = std::move(nb);
      nor->amp *= alpha(turns);
    } else {
      en.value = apply_oracle_kets(std::get<EnVal>(std::move(en.value)),
                                   full.width(), fn);
    }
    return st;
  }

  State qif(State st, const SQIf& q, int line, int col) {
    const BExp guard = with_store(q.guard);
    if (kind_of(omega, guard).tag != Kind::Tag::Q)
      throw Error(ErrCat::Kind,
                  "KindError: classical guard in a quantum conditional", line,
                  col);
    const Locus kguard = fv(omega, guard);
    const Locus kbody = fv(omega, q.body);
    if (!kguard.disjoint(kbody))
      throw Error(ErrCat::Type,
                  "CloneViolation: guard " + kguard.str() +
                      " is also touched by the conditional body",
                  line, col);
    const int e = to_prefix(st, concat(kguard, kbody), CastPolicy::ToEN);
    st = apply_guard(omega, std::move(st), guard);

    auto& en = st.entries[static_cast<std::size_t>(e)];
    const int gw = kguard.width();
    const auto ps = en.locus.positions();
    const std::vector<Pos> body_ps(ps.begin() + gw, ps.end());
    const Locus glocus = locus_from_positions({ps.begin(), ps.begin() + gw});

    if (body_ps.empty()) return block(std::move(st), Mode::M, q.body);

    // the control is the comparison's result bit, or the bare qubit itself
    std::size_t ctrl = 0;
    if (const auto* c = std::get_if<BCmp>(&guard.node)) {
      const Range res = eval_range(*c->result);
      ctrl = static_cast<std::size_t>(
          detail::pos_index(kguard.positions(), Pos{res.var, res.lo}));
    }

    EnVal v = std::get<EnVal>(std::move(en.value));
    auto [yes, no] = partition_kets(
        v, gw, [&](const Bits& b) { return b[ctrl] == '1'; });
    if (yes.kets.empty()) {
      en.value = std::move(v);
      return st;
    }

    en.locus = locus_from_positions(body_ps);
    en.value = push_frozen(std::move(yes), gw);
    st = block(std::move(st), Mode::M, q.body);

    int be = -1;
    for (std::size_t i = 0; i < st.entries.size(); ++i)
      if (st.entries[i].locus.contains(body_ps.front())) be = static_cast<int>(i);
    if (be < 0)
      throw Error(ErrCat::Runtime,
                  "IllFormedState: conditional body lost its locus", line, col);
    auto& bent = st.entries[static_cast<std::size_t>(be)];
    EnVal after = pop_frozen(std::get<EnVal>(std::move(bent.value)));

    // bodies may have reordered their bits; line the untouched kets up
    const auto final_ps = bent.locus.positions();
    for (auto& k : no.kets) {
      Bits suffix(final_ps.size(), '0');
      for (std::size_t i = 0; i < final_ps.size(); ++i)
        suffix[i] = k.basis[static_cast<std::size_t>(gw) +
                            detail::pos_index(body_ps, final_ps[i])];
      k.basis = k.basis.substr(0, static_cast<std::size_t>(gw)) + suffix;
      after.kets.push_back(std::move(k));
    }
    bent.locus = concat(glocus, bent.locus);
    bent.value = merge_kets(std::move(after));
    return st;
  }

  State measure(State st, const std::string& y, MVal& mv, int line, int col) {
    auto it = omega.find(y);
    if (it == omega.end() || it->second.tag != Kind::Tag::Q)
      throw Error(ErrCat::Kind, "KindError: measure of non-qubit " + y, line, col);
    const int n = static_cast<int>(it->second.n);
    const int e = to_prefix(st, Locus{{Range{y, 0, n}}}, CastPolicy::ToEN);
    auto& en = st.entries[static_cast<std::size_t>(e)];
    const EnVal v = std::get<EnVal>(std::move(en.value));

    std::map<std::uint64_t, double> probs;
    for (const auto& k : v.kets)
      probs[bits_value(k.basis.substr(0, static_cast<std::size_t>(n)))] +=
          std::norm(k.amp);

    std::uint64_t outcome = 0;
    if (use_forced) {
      if (next_forced >= forced.size())
        throw Error(ErrCat::Runtime,
                    "ForcedOutcomeImpossible: no forced outcome supplied for "
                    "this measurement",
                    line, col);
      outcome = forced[next_forced++];
      auto p = probs.find(outcome);
      if (p == probs.end() || p->second <= kZeroTol)
        throw Error(ErrCat::Runtime,
                    "ForcedOutcomeImpossible: outcome " +
                        std::to_string(outcome) + " has probability 0",
                    line, col);
    } else {
      double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      for (const auto& [c, p] : probs) {
        outcome = c;
        if ((u -= p) <= 0.0) break;
      }
    }
    const double r = probs[outcome];
    mv = MVal{r, outcome};
    measurements.push_back({r, outcome, n});

    const Bits c = bits_of(outcome, n);
    EnVal kept;
    for (const auto& k : v.kets)
      if (k.basis.substr(0, static_cast<std::size_t>(n)) == c)
        kept.kets.push_back({k.amp / std::sqrt(r),
                             k.basis.substr(static_cast<std::size_t>(n)),
                             k.stack});
    if (en.locus.width() == n) {
      st.entries.erase(st.entries.begin() + e);
    } else {
      const auto ps = en.locus.positions();
      en.locus = locus_from_positions({ps.begin() + n, ps.end()});
      en.value = merge_kets(std::move(kept));
    }
    return st;
  }
};

}  // namespace detail

inline State initial_state(const Program& p) {
  State st;
  for (const auto& d : p.decls)
    st.add(Locus{{Range{d.name, 0, static_cast<int>(d.count)}}},
           NorVal{Amp{1.0, 0.0}, Bits(d.count, '0'), {}});
  return st;
}

inline EvalResult eval_program(const Program& p, const EvalOptions& opts = {}) {
  detail::Interp it(kind_env_of(p), opts);
  State st = it.block(initial_state(p), Mode::C, p.body);
  return {std::move(st), std::move(it.store), std::move(it.measurements)};
}

}  // namespace qafny
