#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>
#include <vector>

#include "qafny/parser.hpp"
#include "qafny/typecheck.hpp"

using namespace qafny;

namespace {

TypecheckResult tc(const std::string& src) {
  Program p = parse_program(src);
  return typecheck(kind_env_of(p), initial_env(p), Mode::C, p.body);
}

template <typename F>
void check_error(F f, const std::string& prefix) {
  try {
    f();
    FAIL("expected error starting with: " << prefix);
  } catch (const Error& e) {
    CHECK(std::string(e.what()).substr(0, prefix.size()) == prefix);
  }
}

// one letter per step: Cast Permute Join Split Drop
std::string plan_kinds(const RewritePlan& plan) {
  std::string s;
  for (const auto& st : plan) switch (st.kind) {
      case RewriteStep::Kind::SubtypeCast: s += 'C'; break;
      case RewriteStep::Kind::Permute: s += 'P'; break;
      case RewriteStep::Kind::Join: s += 'J'; break;
      case RewriteStep::Kind::Split: s += 'S'; break;
      case RewriteStep::Kind::DropEmpty: s += 'D'; break;
    }
  return s;
}

Locus loc(std::vector<Range> rs) { return Locus{std::move(rs)}; }

EnVal bell_pair() {
  EnVal v;
  v.kets.push_back({std::sqrt(0.5), "00", {}});
  v.kets.push_back({std::sqrt(0.5), "11", {}});
  return v;
}

}  // namespace

TEST_CASE("subtype lattice") {
  CHECK(is_subtype(QType::Nor, QType::Nor));
  CHECK(is_subtype(QType::Had, QType::Had));
  CHECK(is_subtype(QType::EN, QType::EN));
  CHECK(is_subtype(QType::Nor, QType::EN));
  CHECK(is_subtype(QType::Had, QType::EN));
  CHECK_FALSE(is_subtype(QType::EN, QType::Nor));
  CHECK_FALSE(is_subtype(QType::EN, QType::Had));
  CHECK_FALSE(is_subtype(QType::Nor, QType::Had));
  CHECK_FALSE(is_subtype(QType::Had, QType::Nor));

  CHECK_NOTHROW(subtype_cast(QType::Nor, QType::EN));
  CHECK_NOTHROW(subtype_cast(QType::EN, QType::EN));
  check_error([] { subtype_cast(QType::EN, QType::Nor); }, "NotASubtype");
}

TEST_CASE("type_env_of mirrors value forms") {
  State st;
  st.add(loc({{"x", 0, 2}}), NorVal{1.0, "10", {}});
  st.add(loc({{"h", 0, 1}}), HadVal{{0.5}});
  st.add(loc({{"y", 0, 2}}), bell_pair());

  TypeEnv env = type_env_of(st);
  REQUIRE(env.entries.size() == 3);
  CHECK(env.entries[0].type == QType::Nor);
  CHECK(env.entries[1].type == QType::Had);
  CHECK(env.entries[2].type == QType::EN);
  CHECK(env.entries[0].locus.str() == "x[0,2)");
  CHECK(env.str() == "x[0,2) : Nor; h[0] : Had; y[0,2) : EN");
  CHECK(TypeEnv{}.str() == "{}");
}

TEST_CASE("plan replay keeps environment and state in lockstep") {
  State st;
  st.add(loc({{"x", 0, 2}}), bell_pair());
  st.add(loc({{"x", 2, 4}}), NorVal{1.0, "01", {}});
  TypeEnv env = type_env_of(st);

  Locus target = loc({{"x", 1, 2}, {"x", 0, 1}, {"x", 2, 3}});
  auto [env2, plan] = env_rewrite_to_prefix(env, target);
  CHECK(plan_kinds(plan) == "SJP");

  for (const auto& step : plan) {
    env = apply_step_env(env, step);
    st = apply_step_state(st, step);
    TypeEnv mirror = type_env_of(st);
    REQUIRE(mirror.entries.size() == env.entries.size());
    for (std::size_t i = 0; i < env.entries.size(); ++i) {
      CHECK(mirror.entries[i].locus == env.entries[i].locus);
      CHECK(mirror.entries[i].type == env.entries[i].type);
    }
    check_wellformed(st);
  }
  CHECK(env.str() == env2.str());
  CHECK(prefix_entry(env, target) == 0);

  // merged entry holds x[1] x[0] x[2]; the split leaves x[3] = |1> behind
  const auto& v = std::get<EnVal>(st.entries[0].value);
  REQUIRE(v.kets.size() == 2);
  CHECK(v.kets[0].basis == "000");
  CHECK(v.kets[1].basis == "110");
  CHECK(std::get<NorVal>(st.entries[1].value).bits == "1");
}

TEST_CASE("env_rewrite_to_prefix planning") {
  SECTION("target already a prefix: empty plan") {
    TypeEnv env{{{loc({{"x", 0, 4}}), QType::EN}}};
    auto [out, plan] = env_rewrite_to_prefix(env, loc({{"x", 0, 2}}));
    CHECK(plan.empty());
    CHECK(out.str() == "x[0,4) : EN");
  }

  SECTION("entangled pair step: split, join, permute") {
    TypeEnv env{{{loc({{"x", 0, 2}}), QType::EN}, {loc({{"x", 2, 4}}), QType::Nor}}};
    Locus target = loc({{"x", 1, 2}, {"x", 0, 1}, {"x", 2, 3}});
    auto [out, plan] = env_rewrite_to_prefix(env, target);
    CHECK(plan_kinds(plan) == "SJP");
    REQUIRE(out.entries.size() == 2);
    CHECK(out.entries[0].locus.str() == "x[1] ++ x[0] ++ x[2]");
    CHECK(out.entries[0].type == QType::EN);
    CHECK(out.entries[1].locus.str() == "x[3]");
    CHECK(out.entries[1].type == QType::Nor);
  }

  SECTION("register swap inside one entangled locus: single permute") {
    TypeEnv env{{{loc({{"x", 0, 2}, {"y", 0, 2}}), QType::EN}}};
    auto [out, plan] = env_rewrite_to_prefix(env, loc({{"y", 0, 2}}));
    REQUIRE(plan.size() == 1);
    CHECK(plan[0].kind == RewriteStep::Kind::Permute);
    CHECK(plan[0].n == 0);
    CHECK(plan[0].i == 2);
    CHECK(plan[0].k == 2);
    CHECK(out.entries[0].locus.str() == "y[0,2) ++ x[0,2)");
  }

  SECTION("entangled qubits ride along rather than split") {
    TypeEnv env{{{loc({{"x", 0, 3}}), QType::EN}}};
    auto [out, plan] = env_rewrite_to_prefix(env, loc({{"x", 1, 2}}));
    CHECK(plan_kinds(plan) == "P");
    CHECK(out.entries[0].locus.str() == "x[1] ++ x[0] ++ x[2]");
  }

  SECTION("basis loci fragment to the target footprint and stay Nor") {
    TypeEnv env{{{loc({{"x", 0, 4}}), QType::Nor}}};
    Locus target = loc({{"x", 2, 3}, {"x", 0, 1}});
    auto [out, plan] = env_rewrite_to_prefix(env, target);
    CHECK(plan_kinds(plan) == "SSSJ");
    REQUIRE(out.entries.size() == 3);
    CHECK(out.entries[0].locus.str() == "x[1]");
    CHECK(out.entries[1].locus.str() == "x[2] ++ x[0]");
    CHECK(out.entries[1].type == QType::Nor);
    CHECK(out.entries[2].locus.str() == "x[3]");
  }

  SECTION("two entangled sources merge with both riders") {
    TypeEnv env{{{loc({{"a", 0, 1}, {"b", 0, 1}}), QType::EN},
                 {loc({{"c", 0, 1}, {"d", 0, 1}}), QType::EN}}};
    Locus target = loc({{"b", 0, 1}, {"d", 0, 1}});
    auto [out, plan] = env_rewrite_to_prefix(env, target);
    CHECK(plan_kinds(plan) == "JPP");
    REQUIRE(out.entries.size() == 1);
    CHECK(out.entries[0].locus.str() == "b[0] ++ d[0] ++ a[0] ++ c[0]");
  }

  SECTION("unknown qubit") {
    TypeEnv env{{{loc({{"x", 0, 2}}), QType::Nor}}};
    check_error(
        [&] { env_rewrite_to_prefix(env, loc({{"w", 0, 1}})); },
        "UnboundLocus");
  }
}

TEST_CASE("statement typing end to end") {
  SECTION("cascading entanglement over a loop") {
    auto r = tc(
        "qubit x[3];"
        "x[0] *= H;"
        "for j in [1, 3) && x[j-1] { x[j] += 1; }");
    REQUIRE(r.env.entries.size() == 1);
    CHECK(r.env.entries[0].type == QType::EN);
    CHECK(r.env.entries[0].locus.set_equal(loc({{"x", 0, 3}})));
    CHECK(r.env.entries[0].locus.str() == "x[1,3) ++ x[0]");
  }

  SECTION("H splits a wider basis locus at the target edge") {
    auto r = tc("qubit x[3]; x[0,2) *= H;");
    REQUIRE(r.sites.size() == 1);
    CHECK(plan_kinds(r.sites[0].plan) == "S");
    CHECK(r.env.str() == "x[0,2) : Had; x[2] : Nor");
  }

  SECTION("H on an entangled locus keeps it entangled") {
    auto r = tc(
        "qubit x[2];"
        "x[0] *= H;"
        "if (x[0]) { x[1] += 1; }"
        "x[0] *= H;");
    CHECK(r.env.str() == "x[0,2) : EN");
    CHECK(r.sites.back().plan.empty());
  }

  SECTION("guard and body must not share qubits") {
    check_error([] { tc("qubit x[2]; x[1] *= H; if (x[1]) { x[1] += 1; }"); },
                "CloneViolation");
  }

  SECTION("no measurement under a quantum guard") {
    check_error(
        [] {
          tc("qubit x[2]; qubit y[2];"
             "x[0] *= H;"
             "for j in [0, 1) && x[j] { let u = measure(y) in { skip; } }");
        },
        "MeasureInQuantumConditional");
  }

  SECTION("measurement consumes the measured prefix") {
    auto r = tc(
        "qubit x[1]; qubit y[1];"
        "x[0] *= H;"
        "if (x[0]) { y[0] += 1; }"
        "let u = measure(y) in { skip; }");
    CHECK(r.env.str() == "x[0] : EN");
  }

  SECTION("measuring everything empties the environment") {
    auto r = tc("qubit y[2]; let u = measure(y) in { skip; }");
    CHECK(r.env.entries.empty());
  }

  SECTION("branches on a measured value must agree") {
    check_error(
        [] {
          tc("qubit x[1]; qubit y[1];"
             "let u = measure(y) in { if (u == 1) { x[0] *= H; } }");
        },
        "TypeMismatch");
    auto r = tc(
        "qubit x[1]; qubit y[1];"
        "let u = measure(y) in {"
        "  if (u == 1) { x[0] += 1; } else { x[0] += 2; }"
        "}");
    CHECK(r.env.str() == "x[0] : Nor");
  }

  SECTION("classical branch picks one side") {
    auto r = tc("qubit x[1]; if (1 < 2) { x[0] *= H; } else { x[0] += 1; }");
    CHECK(r.env.str() == "x[0] : Had");
  }

  SECTION("loop bounds must be compile-time constants") {
    check_error([] { tc("qubit x[2]; for j in [0, n) { x[0] += 1; }"); },
                "KindError: loop bound is not a compile-time constant");
  }

  SECTION("let of a quantum expression is rejected") {
    check_error([] { tc("qubit x[2]; let a = x[0] in { skip; }"); },
                "KindError: quantum expression bound");
  }

  SECTION("let substitutes into indices") {
    auto r = tc("qubit x[4]; let j = 2 in { x[j] *= H; }");
    CHECK(r.env.str() == "x[0,2) : Nor; x[2] : Had; x[3] : Nor");
  }

  SECTION("qft casts a basis locus") {
    auto r = tc("qubit x[2]; x[0,2) *= QFT;");
    REQUIRE(r.sites.size() == 1);
    CHECK(plan_kinds(r.sites[0].plan) == "C");
    CHECK(r.env.str() == "x[0,2) : EN");
  }

  SECTION("adding a quantum operand joins it behind the target") {
    auto r = tc("qubit x[4]; qubit y[2]; x[0,4) += y;");
    REQUIRE(r.env.entries.size() == 1);
    CHECK(r.env.entries[0].locus.str() == "x[0,4) ++ y[0,2)");
    CHECK(r.env.entries[0].type == QType::Nor);
  }

  SECTION("target overlapping its own operand") {
    check_error([] { tc("qubit x[4]; x[0,2) += x[1,3);"); },
                "OverlappingQuantumOperands");
  }

  SECTION("modular multiply leaves a basis locus alone") {
    auto r = tc("qubit y[3]; y[0,3) := mulmod(3, 7);");
    CHECK(r.sites[0].plan.empty());
    CHECK(r.env.str() == "y[0,3) : Nor");
  }

  SECTION("modular ops take classical operands only") {
    check_error([] { tc("qubit x[2]; qubit y[2]; y[0,2) := mulmod(x[0], 7);"); },
                "KindError: mulmod/powmod takes classical operands");
  }

  SECTION("oracle on a split superposition locus casts it") {
    auto r = tc("qubit x[2]; x[0,2) *= H; x[0] += 1;");
    CHECK(r.env.str() == "x[0] : EN; x[1] : Had");
    CHECK(plan_kinds(r.sites.back().plan) == "SC");
  }

  SECTION("reduce requires a pattern as wide as its target") {
    check_error([] { tc("qubit x[3]; x[0,3) *= reduce(01, 2);"); },
                "WidthMismatch");
    auto r = tc("qubit x[2]; x[0,2) *= reduce(01, 2);");
    CHECK(r.env.str() == "x[0,2) : EN");
  }

  SECTION("diffusion needs an entangled prefix") {
    auto r = tc("qubit x[2]; x[0,2) *= dis;");
    CHECK(r.env.str() == "x[0,2) : EN");
  }

  SECTION("raw blocks are checked against the target width") {
    CHECK_NOTHROW(tc("qubit x[2]; x[0,2) *= oqasm { X 0; X 1; };"));
    check_error([] { tc("qubit x[2]; x[0,2) *= oqasm { X 5; };"); },
                "RangeOutOfBounds");
  }

  SECTION("range bounds checked at apply sites") {
    check_error([] { tc("qubit x[2]; x[0,3) *= H;"); }, "RangeOutOfBounds");
  }
}

TEST_CASE("dump_types output") {
  auto r = tc("qubit x[2]; x[0] *= H; if (x[0]) { x[1] += 1; }");
  std::string text = dump_types(r);
  CHECK(text.find("x[0] : Had") != std::string::npos);
  CHECK(text.find("x[0,2) : EN") != std::string::npos);
  CHECK(text.find("join") != std::string::npos);
}
