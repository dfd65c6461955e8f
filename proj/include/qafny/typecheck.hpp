#pragma once

// Flow-sensitive locus types over the quantum heap, and the rewrite planner
// that realizes the environment partial order: loci a statement is about to
// touch are rearranged into the prefix of a single entry by a replayable plan
// of primitive steps.  The same steps apply to type environments and to
// states, which keeps dom(sigma) = dom(phi) at every point.

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "qafny/ast.hpp"
#include "qafny/kinds.hpp"
#include "qafny/locus.hpp"
#include "qafny/oqasm.hpp"
#include "qafny/state.hpp"

namespace qafny {

enum class Mode { C, M };
enum class QType { Nor, Had, EN };

inline const char* qtype_name(QType t) {
  switch (t) {
    case QType::Nor: return "Nor";
    case QType::Had: return "Had";
    default: return "EN";
  }
}

// Nor and Had sit below EN; nothing else is related.
inline bool is_subtype(QType a, QType b) { return a == b || b == QType::EN; }

inline void subtype_cast(QType from, QType to) {
  if (!is_subtype(from, to))
    throw Error(ErrCat::Type, std::string("NotASubtype: ") + qtype_name(from) +
                                  " does not embed into " + qtype_name(to));
}

struct TypeEntry {
  Locus locus;
  QType type = QType::Nor;
};

struct TypeEnv {
  std::vector<TypeEntry> entries;

  int find(const Locus& l) const {
    for (std::size_t i = 0; i < entries.size(); ++i)
      if (entries[i].locus == l) return static_cast<int>(i);
    return -1;
  }

  int find_containing(const Pos& p) const {
    for (std::size_t i = 0; i < entries.size(); ++i)
      if (entries[i].locus.contains(p)) return static_cast<int>(i);
    return -1;
  }

  std::string str() const {
    if (entries.empty()) return "{}";
    std::string s;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (i) s += "; ";
      s += entries[i].locus.str() + " : " + qtype_name(entries[i].type);
    }
    return s;
  }

  bool operator==(const TypeEnv& o) const {
    if (entries.size() != o.entries.size()) return false;
    for (std::size_t i = 0; i < entries.size(); ++i)
      if (!(entries[i].locus == o.entries[i].locus) ||
          entries[i].type != o.entries[i].type)
        return false;
    return true;
  }
};

// The type view of a heap: value forms are exactly the locus types.
inline TypeEnv type_env_of(const State& st) {
  TypeEnv env;
  for (const auto& e : st.entries) {
    QType t = std::holds_alternative<NorVal>(e.value)   ? QType::Nor
              : std::holds_alternative<HadVal>(e.value) ? QType::Had
                                                        : QType::EN;
    env.entries.push_back({e.locus, t});
  }
  return env;
}

// ---- rewrite plans ----

struct RewriteStep {
  enum class Kind { SubtypeCast, Permute, Join, Split, DropEmpty };
  Kind kind = Kind::DropEmpty;
  Locus locus;  // subject entry (Join: left operand)
  Locus other;  // Join: right operand
  // Permute swaps position segments [n,n+i) and [n+i,n+i+k); Split cuts at n.
  int n = 0, i = 0, k = 0;

  std::string str() const {
    switch (kind) {
      case Kind::SubtypeCast: return "cast " + locus.str() + " to EN";
      case Kind::Permute:
        return "permute " + locus.str() + " (n=" + std::to_string(n) +
               ", i=" + std::to_string(i) + ", k=" + std::to_string(k) + ")";
      case Kind::Join: return "join " + locus.str() + " with " + other.str();
      case Kind::Split: return "split " + locus.str() + " at " + std::to_string(n);
      default: return "drop empty";
    }
  }
};

using RewritePlan = std::vector<RewriteStep>;

namespace detail {

inline std::vector<Pos> slice(const std::vector<Pos>& ps, std::size_t lo,
                              std::size_t hi) {
  return {ps.begin() + static_cast<long>(lo), ps.begin() + static_cast<long>(hi)};
}

inline Locus permute_locus(const Locus& l, int n, int i, int k) {
  auto ps = l.positions();
  if (n < 0 || i < 0 || k < 0 ||
      static_cast<std::size_t>(n + i + k) > ps.size())
    throw Error(ErrCat::Runtime, "WidthMismatch: permute segment out of range on " + l.str());
  std::vector<Pos> out;
  out.reserve(ps.size());
  auto sn = static_cast<std::size_t>(n), si = static_cast<std::size_t>(i),
       sk = static_cast<std::size_t>(k);
  for (std::size_t t = 0; t < sn; ++t) out.push_back(ps[t]);
  for (std::size_t t = 0; t < sk; ++t) out.push_back(ps[sn + si + t]);
  for (std::size_t t = 0; t < si; ++t) out.push_back(ps[sn + t]);
  for (std::size_t t = sn + si + sk; t < ps.size(); ++t) out.push_back(ps[t]);
  return locus_from_positions(out);
}

inline std::pair<Locus, Locus> split_locus(const Locus& l, int n) {
  auto ps = l.positions();
  if (n <= 0 || static_cast<std::size_t>(n) >= ps.size())
    throw Error(ErrCat::Runtime, "WidthMismatch: split point " + std::to_string(n) +
                                     " on " + l.str());
  return {locus_from_positions(slice(ps, 0, static_cast<std::size_t>(n))),
          locus_from_positions(slice(ps, static_cast<std::size_t>(n), ps.size()))};
}

}  // namespace detail

inline TypeEnv apply_step_env(TypeEnv env, const RewriteStep& s) {
  auto need = [&](const Locus& l) {
    int e = env.find(l);
    if (e < 0)
      throw Error(ErrCat::Type, "UnboundLocus: " + l.str() + " is not an environment entry");
    return e;
  };
  switch (s.kind) {
    case RewriteStep::Kind::SubtypeCast: {
      int e = need(s.locus);
      subtype_cast(env.entries[static_cast<std::size_t>(e)].type, QType::EN);
      env.entries[static_cast<std::size_t>(e)].type = QType::EN;
      break;
    }
    case RewriteStep::Kind::Permute: {
      int e = need(s.locus);
      env.entries[static_cast<std::size_t>(e)].locus =
          detail::permute_locus(s.locus, s.n, s.i, s.k);
      break;
    }
    case RewriteStep::Kind::Join: {
      int ia = need(s.locus);
      int ib = need(s.other);
      auto& ea = env.entries[static_cast<std::size_t>(ia)];
      auto& eb = env.entries[static_cast<std::size_t>(ib)];
      QType t = ea.type == QType::Nor && eb.type == QType::Nor ? QType::Nor
                : ea.type == QType::Had && eb.type == QType::Had
                    ? QType::Had
                    : QType::EN;
      ea = {concat(s.locus, s.other), t};
      env.entries.erase(env.entries.begin() + ib);
      break;
    }
    case RewriteStep::Kind::Split: {
      int e = need(s.locus);
      auto [l, r] = detail::split_locus(s.locus, s.n);
      QType t = env.entries[static_cast<std::size_t>(e)].type;
      // the EN suffix factor comes back as a plain basis vector
      env.entries[static_cast<std::size_t>(e)] = {l, t};
      env.entries.insert(env.entries.begin() + e + 1,
                         {r, t == QType::EN ? QType::Nor : t});
      break;
    }
    case RewriteStep::Kind::DropEmpty:
      env.entries.erase(std::remove_if(env.entries.begin(), env.entries.end(),
                                       [](const TypeEntry& e) {
                                         return e.locus.empty();
                                       }),
                        env.entries.end());
      break;
  }
  return env;
}

inline TypeEnv apply_plan_env(TypeEnv env, const RewritePlan& plan) {
  for (const auto& s : plan) env = apply_step_env(std::move(env), s);
  return env;
}

inline State apply_step_state(State st, const RewriteStep& s) {
  auto need = [&](const Locus& l) {
    int e = st.find(l);
    if (e < 0)
      throw Error(ErrCat::Runtime, "UnboundLocus: " + l.str() + " is not a heap entry");
    return e;
  };
  switch (s.kind) {
    case RewriteStep::Kind::SubtypeCast: {
      int e = need(s.locus);
      auto& en = st.entries[static_cast<std::size_t>(e)];
      en.value = to_en(en.value);
      break;
    }
    case RewriteStep::Kind::Permute: {
      int e = need(s.locus);
      auto& en = st.entries[static_cast<std::size_t>(e)];
      en.value = permute_value(en.value, s.n, s.i, s.k);
      en.locus = detail::permute_locus(s.locus, s.n, s.i, s.k);
      break;
    }
    case RewriteStep::Kind::Join: {
      int ia = need(s.locus);
      int ib = need(s.other);
      auto& ea = st.entries[static_cast<std::size_t>(ia)];
      ea.value = join_values(ea.value, st.entries[static_cast<std::size_t>(ib)].value);
      ea.locus = concat(s.locus, s.other);
      st.entries.erase(st.entries.begin() + ib);
      break;
    }
    case RewriteStep::Kind::Split: {
      int e = need(s.locus);
      auto [vl, vr] = split_value(st.entries[static_cast<std::size_t>(e)].value, s.n);
      auto [ll, lr] = detail::split_locus(s.locus, s.n);
      st.entries[static_cast<std::size_t>(e)] = {ll, std::move(vl)};
      st.entries.insert(st.entries.begin() + e + 1, {lr, std::move(vr)});
      break;
    }
    case RewriteStep::Kind::DropEmpty:
      st.entries.erase(std::remove_if(st.entries.begin(), st.entries.end(),
                                      [](const StateEntry& e) {
                                        return e.locus.empty();
                                      }),
                       st.entries.end());
      break;
  }
  return st;
}

inline State apply_plan_state(State st, const RewritePlan& plan) {
  for (const auto& s : plan) st = apply_step_state(std::move(st), s);
  return st;
}

// ---- the planner ----

// Index of the entry whose positions begin with target's, in order; -1 if none.
inline int prefix_entry(const TypeEnv& env, const Locus& target) {
  const auto T = target.positions();
  for (std::size_t e = 0; e < env.entries.size(); ++e) {
    const auto ps = env.entries[e].locus.positions();
    if (ps.size() < T.size()) continue;
    bool ok = true;
    for (std::size_t i = 0; i < T.size(); ++i)
      if (!(ps[i] == T[i])) {
        ok = false;
        break;
      }
    if (ok) return static_cast<int>(e);
  }
  return -1;
}

struct PrefixResult {
  TypeEnv env;
  RewritePlan plan;
};

// Deterministic greedy realization of the environment order: (1) split
// Nor/Had entries at target-membership boundaries (EN entries are never
// split; their extra qubits ride along), (2) join the pieces holding target
// qubits in first-appearance order, (3) permute the merged entry so the
// target is its prefix, longest matching run per step.
inline PrefixResult env_rewrite_to_prefix(TypeEnv env, const Locus& target) {
  const std::vector<Pos> T = target.positions();
  RewritePlan plan;
  for (const auto& p : T)
    if (env.find_containing(p) < 0)
      throw Error(ErrCat::Type,
                  "UnboundLocus: " + p.str() + " is not in the type environment");
  if (T.empty() || prefix_entry(env, target) >= 0)
    return {std::move(env), std::move(plan)};

  auto emit = [&](RewriteStep s) {
    env = apply_step_env(std::move(env), s);
    plan.push_back(std::move(s));
  };
  auto in_t = [&](const Pos& p) {
    return std::find(T.begin(), T.end(), p) != T.end();
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& e : env.entries) {
      if (e.type == QType::EN) continue;
      const auto ps = e.locus.positions();
      for (std::size_t i = 1; i < ps.size(); ++i)
        if (in_t(ps[i]) != in_t(ps[i - 1])) {
          emit({RewriteStep::Kind::Split, e.locus, {}, static_cast<int>(i), 0, 0});
          changed = true;
          break;
        }
      if (changed) break;
    }
  }

  std::vector<Locus> parts;
  for (const auto& p : T) {
    const Locus& l =
        env.entries[static_cast<std::size_t>(env.find_containing(p))].locus;
    if (std::find(parts.begin(), parts.end(), l) == parts.end()) parts.push_back(l);
  }
  Locus acc = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) {
    emit({RewriteStep::Kind::Join, acc, parts[i], 0, 0, 0});
    acc = env.entries[static_cast<std::size_t>(env.find_containing(T[0]))].locus;
  }

  while (true) {
    const auto ps = acc.positions();
    std::size_t i = 0;
    while (i < T.size() && ps[i] == T[i]) ++i;
    if (i == T.size()) break;
    std::size_t j = i + 1;
    while (!(ps[j] == T[i])) ++j;
    std::size_t len = 0;
    while (j + len < ps.size() && i + len < T.size() && ps[j + len] == T[i + len])
      ++len;
    emit({RewriteStep::Kind::Permute, acc, {}, static_cast<int>(i),
          static_cast<int>(j - i), static_cast<int>(len)});
    acc = env.entries[static_cast<std::size_t>(env.find_containing(T[0]))].locus;
  }
  return {std::move(env), std::move(plan)};
}

// How a consumer wants the prefix entry typed: ToEN for ops defined ketwise,
// ToENIfHad for basis maps that keep Nor structural but must expand a
// superposition before acting on basis bits.
enum class CastPolicy { None, ToEN, ToENIfHad };

struct PrefixOutcome {
  TypeEnv env;
  RewritePlan plan;
  int entry = -1;
};

// Full plan derivation for one operation site: rearrange target to a prefix,
// trim a wider Nor/Had entry at the target edge, apply the cast policy.  The
// checker and the interpreter both call this, which keeps the plans the
// checker records and the plans the interpreter replays identical.
inline PrefixOutcome plan_prefix(TypeEnv env, const Locus& target,
                                 CastPolicy cast) {
  PrefixResult pr = env_rewrite_to_prefix(std::move(env), target);
  env = std::move(pr.env);
  RewritePlan plan = std::move(pr.plan);
  const int e = prefix_entry(env, target);
  auto step = [&](RewriteStep s) {
    env = apply_step_env(std::move(env), s);
    plan.push_back(std::move(s));
  };
  const auto& ent = env.entries[static_cast<std::size_t>(e)];
  if (ent.type != QType::EN && ent.locus.width() > target.width())
    step({RewriteStep::Kind::Split, ent.locus, {}, target.width(), 0, 0});
  const QType t = env.entries[static_cast<std::size_t>(e)].type;
  const bool want =
      cast == CastPolicy::ToEN || (cast == CastPolicy::ToENIfHad && t == QType::Had);
  if (want && t != QType::EN)
    step({RewriteStep::Kind::SubtypeCast,
          env.entries[static_cast<std::size_t>(e)].locus,
          {},
          0,
          0,
          0});
  return {std::move(env), std::move(plan), e};
}

// ---- classical conditions ----

inline bool eval_closed_bexp(const BExp& b) {
  const auto* c = std::get_if<BCmp>(&b.node);
  if (!c)
    throw Error(ErrCat::Kind, "KindError: bare qubit guard in a classical position",
                b.line, b.col);
  if (c->result)
    throw Error(ErrCat::Kind, "KindError: '@' result qubit in a classical condition",
                b.line, b.col);
  const std::uint64_t l = eval_closed_aexp(c->l);
  const std::uint64_t r = eval_closed_aexp(c->r);
  if (c->op == "<") return l < r;
  if (c->op == "<=") return l <= r;
  if (c->op == "==") return l == r;
  if (c->op == "!=") return l != r;
  if (c->op == ">=") return l >= r;
  if (c->op == ">") return l > r;
  throw Error(ErrCat::Parse, "SyntaxError: unknown comparison " + c->op, b.line,
              b.col);
}

// ---- statement typing ----

struct SiteRecord {
  int line = 0, col = 0;
  RewritePlan plan;
  std::string env_after;
};

struct TypecheckResult {
  TypeEnv env;
  std::vector<SiteRecord> sites;
};

namespace detail {

struct Checker {
  KindEnv omega;
  std::vector<SiteRecord> sites;

  TypeEnv block(TypeEnv env, Mode g, const Block& b) {
    for (const auto& s : b) env = stmt(std::move(env), g, s);
    return env;
  }

  int to_prefix(TypeEnv& env, RewritePlan& plan, const Locus& target,
                CastPolicy cast) {
    PrefixOutcome out = plan_prefix(std::move(env), target, cast);
    env = std::move(out.env);
    plan.insert(plan.end(), out.plan.begin(), out.plan.end());
    return out.entry;
  }

  TypeEnv stmt(TypeEnv env, Mode g, const Stmt& s) {
    RewritePlan plan;
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
                env = block(std::move(env), g,
                            subst_block(l.body, l.x, eval_closed_aexp(l.rhs)));
              } else {
                KindEnv saved = omega;
                omega[l.x] = Kind{Kind::Tag::M, 0};
                env = block(std::move(env), g, l.body);
                omega = std::move(saved);
              }
            },
            [&](const SLetM& l) {
              if (g == Mode::M)
                throw Error(ErrCat::Type,
                            "MeasureInQuantumConditional: measure of " +
                                l.measured + " under a quantum guard",
                            s.line, s.col);
              auto it = omega.find(l.measured);
              if (it == omega.end())
                throw Error(ErrCat::Kind, "UnboundVariable: " + l.measured, s.line,
                            s.col);
              if (it->second.tag != Kind::Tag::Q)
                throw Error(ErrCat::Kind,
                            "KindError: measure of non-qubit " + l.measured,
                            s.line, s.col);
              Locus kx{Range{l.measured, 0, static_cast<int>(it->second.n)}};
              int e = to_prefix(env, plan, kx, CastPolicy::ToEN);
              auto ps = env.entries[static_cast<std::size_t>(e)].locus.positions();
              if (static_cast<int>(ps.size()) == kx.width())
                env.entries.erase(env.entries.begin() + e);
              else
                env.entries[static_cast<std::size_t>(e)] = {
                    locus_from_positions(detail::slice(
                        ps, static_cast<std::size_t>(kx.width()), ps.size())),
                    QType::EN};
              KindEnv saved = omega;
              omega[l.x] = Kind{Kind::Tag::M, 0};
              env = block(std::move(env), g, l.body);
              omega = std::move(saved);
            },
            [&](const SApply& a) { env = apply(std::move(env), plan, a, s); },
            [&](const SQIf& q) {
              KindOut kg = kind_of(omega, q.guard);
              if (kg.tag != Kind::Tag::Q)
                throw Error(ErrCat::Kind,
                            "KindError: classical guard in a quantum conditional",
                            s.line, s.col);
              // the result bit is what the body is conditioned on
              if (const auto* bc = std::get_if<BCmp>(&q.guard.node);
                  bc && !bc->result)
                throw Error(
                    ErrCat::Kind,
                    "KindError: quantum comparison guard needs an '@' result qubit",
                    s.line, s.col);
              Locus kguard = fv(omega, q.guard);
              Locus kbody = fv(omega, q.body);
              if (!kguard.disjoint(kbody))
                throw Error(ErrCat::Type,
                            "CloneViolation: guard " + kguard.str() +
                                " is also touched by the conditional body",
                            s.line, s.col);
              Locus target = concat(kguard, kbody);
              int e = to_prefix(env, plan, target, CastPolicy::ToEN);
              auto ps = env.entries[static_cast<std::size_t>(e)].locus.positions();
              auto body_ps = detail::slice(
                  ps, static_cast<std::size_t>(kguard.width()), ps.size());
              if (body_ps.empty()) {
                // guard-only conditional: the body touches no qubits
                env = block(std::move(env), Mode::M, q.body);
              } else {
                env.entries[static_cast<std::size_t>(e)] = {
                    locus_from_positions(body_ps), QType::EN};
                env = block(std::move(env), Mode::M, q.body);
                int be = env.find_containing(body_ps.front());
                if (be < 0)
                  throw Error(ErrCat::Type,
                              "UnboundLocus: conditional body lost its locus",
                              s.line, s.col);
                auto& bent = env.entries[static_cast<std::size_t>(be)];
                bent = {concat(kguard, bent.locus), QType::EN};
              }
            },
            [&](const SCIf& c) {
              KindOut kc = kind_of(omega, c.cond);
              if (kc.tag == Kind::Tag::Q)
                throw Error(ErrCat::Kind,
                            "KindError: quantum guard in a classical conditional",
                            s.line, s.col);
              if (kc.tag == Kind::Tag::C) {
                env = block(std::move(env), g,
                            eval_closed_bexp(c.cond) ? c.thn : c.els);
              } else {
                TypeEnv thn = block(env, g, c.thn);
                TypeEnv els = block(env, g, c.els);
                if (!(thn == els))
                  throw Error(ErrCat::Type,
                              "TypeMismatch: branches on a measured value end in "
                              "different environments (" +
                                  thn.str() + " vs " + els.str() + ")",
                              s.line, s.col);
                env = std::move(thn);
              }
            },
            [&](const SFor& f) {
              std::uint64_t lo = 0, hi = 0;
              try {
                lo = eval_closed_aexp(f.lo);
                hi = eval_closed_aexp(f.hi);
              } catch (const Error& e) {
                throw Error(ErrCat::Kind,
                            "KindError: loop bound is not a compile-time constant (" +
                                e.raw + ")",
                            s.line, s.col);
              }
              for (std::uint64_t j = lo; j < hi; ++j) {
                if (f.guard) {
                  Stmt iter{SQIf{subst_bexp(*f.guard, f.x, j),
                                 subst_block(f.body, f.x, j)},
                            s.line, s.col};
                  env = stmt(std::move(env), g, iter);
                } else {
                  env = block(std::move(env), g, subst_block(f.body, f.x, j));
                }
              }
            },
            [&](const SAssert&) {},
            [&](const SCall& c) {
              throw Error(ErrCat::Kind,
                          "KindError: unexpanded procedure call " + c.name, s.line,
                          s.col);
            }},
        s.node);
    sites.push_back({s.line, s.col, std::move(plan), env.str()});
    return env;
  }

  TypeEnv apply(TypeEnv env, RewritePlan& plan, const SApply& a, const Stmt& s) {
    Locus target = eval_locusexpr(a.target);
    for (const auto& r : target.ranges) check_range_bounds(omega, r, s.line, s.col);
    if (target.empty())
      throw Error(ErrCat::Kind, "KindError: empty target locus", s.line, s.col);
    switch (a.u.kind) {
      case Unitary::Kind::H: {
        int e = to_prefix(env, plan, target, CastPolicy::None);
        auto& en = env.entries[static_cast<std::size_t>(e)];
        // whole-locus Nor/Had flip; an entangled target stays EN (ketwise H)
        if (en.type != QType::EN)
          en.type = en.type == QType::Nor ? QType::Had : QType::Nor;
        break;
      }
      case Unitary::Kind::QFT:
      case Unitary::Kind::RQFT:
      case Unitary::Kind::Dis:
        to_prefix(env, plan, target, CastPolicy::ToEN);
        break;
      case Unitary::Kind::Reduce: {
        if (static_cast<int>(a.u.reduce_bits.size()) != target.width())
          throw Error(ErrCat::Type,
                      "WidthMismatch: reduce pattern " + a.u.reduce_bits +
                          " does not fit " + target.str(),
                      s.line, s.col);
        to_prefix(env, plan, target, CastPolicy::ToEN);
        break;
      }
      case Unitary::Kind::Oracle: {
        Locus full = target;
        switch (a.u.oracle.kind) {
          case Oracle::Kind::Raw:
            oq_check_block(a.u.oracle.body, target.width(), s.line, s.col);
            break;
          case Oracle::Kind::AddConst: {
            KindOut ka = kind_of(omega, a.u.oracle.a);
            if (ka.tag == Kind::Tag::Q) {
              Locus ops = fv(omega, a.u.oracle.a);
              if (!target.disjoint(ops))
                throw Error(ErrCat::Kind,
                            "OverlappingQuantumOperands: " + target.str() +
                                " also feeds the oracle",
                            s.line, s.col);
              full = concat(target, ops);
            }
            break;
          }
          case Oracle::Kind::MulMod:
          case Oracle::Kind::PowMod:
            if (kind_of(omega, a.u.oracle.a).tag == Kind::Tag::Q ||
                kind_of(omega, a.u.oracle.modn).tag == Kind::Tag::Q)
              throw Error(ErrCat::Kind,
                          "KindError: mulmod/powmod takes classical operands",
                          s.line, s.col);
            break;
        }
        // basis arithmetic keeps Nor loci structural; a Had target must be
        // expanded before the map can act on basis bits
        to_prefix(env, plan, full, CastPolicy::ToENIfHad);
        break;
      }
    }
    return env;
  }
};

}  // namespace detail

inline TypecheckResult typecheck(const KindEnv& omega, TypeEnv sigma, Mode g,
                                 const Block& b) {
  std::vector<Locus> dom;
  for (const auto& e : sigma.entries) dom.push_back(e.locus);
  wf_locus_domain(omega, dom);
  detail::Checker c{omega, {}};
  TypeEnv out = c.block(std::move(sigma), g, b);
  return {std::move(out), std::move(c.sites)};
}

// Starting environment of a program: one Nor locus per declaration.
inline TypeEnv initial_env(const Program& p) {
  TypeEnv env;
  for (const auto& d : p.decls)
    env.entries.push_back(
        {Locus{Range{d.name, 0, static_cast<int>(d.count)}}, QType::Nor});
  return env;
}

inline std::string dump_types(const TypecheckResult& r) {
  std::string out;
  for (const auto& site : r.sites) {
    out += std::to_string(site.line) + ":" + std::to_string(site.col) + "  " +
           site.env_after + "\n";
    for (const auto& step : site.plan) out += "    - " + step.str() + "\n";
  }
  return out;
}

}  // namespace qafny
