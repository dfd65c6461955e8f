#include <catch2/catch_amalgamated.hpp>

#include <complex>
#include <map>
#include <sstream>

#include "qafny/interp.hpp"
#include "qafny/parser.hpp"
#include "support/oracles.hpp"

using namespace qafny;

namespace {

EvalResult run(const std::string& src, const EvalOptions& opts = {}) {
  return eval_program(parse_program(src), opts);
}

EvalOptions seeded(std::uint64_t s) {
  EvalOptions o;
  o.seed = s;
  return o;
}

EvalOptions forcing(std::vector<std::uint64_t> f) {
  EvalOptions o;
  o.forced = std::move(f);
  return o;
}

std::map<Bits, Amp> ket_map(const QuantumValue& q) {
  std::map<Bits, Amp> m;
  for (const auto& k : to_en(q).kets) m[k.basis] += k.amp;
  return m;
}

void expect_kets(const QuantumValue& q, const std::map<Bits, Amp>& want,
                 double tol = 1e-9) {
  const auto got = ket_map(q);
  REQUIRE(got.size() == want.size());
  for (const auto& [b, a] : want) {
    INFO("basis " << b);
    REQUIRE(got.count(b) == 1);
    REQUIRE(std::abs(got.at(b) - a) < tol);
  }
}

// Dense view of one heap entry: wire of q[i] is base[q] + i, wire 0 least
// significant, matching the reference helpers.
oracle::Vec dense_of(const StateEntry& e, int nq,
                     const std::map<std::string, int>& base) {
  oracle::Vec v(std::size_t{1} << nq, {0.0, 0.0});
  const auto ps = e.locus.positions();
  for (const auto& k : to_en(e.value).kets) {
    std::uint64_t idx = 0;
    for (std::size_t i = 0; i < ps.size(); ++i)
      if (k.basis[i] == '1')
        idx |= std::uint64_t{1} << (base.at(ps[i].var) + ps[i].idx);
    v[idx] += k.amp;
  }
  return v;
}

std::uint64_t var_value(const std::vector<Pos>& order, const Bits& basis,
                        const std::string& var) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < order.size(); ++i)
    if (order[i].var == var && basis[i] == '1')
      v |= std::uint64_t{1} << order[i].idx;
  return v;
}

template <typename F>
void check_error(F f, const std::string& prefix) {
  try {
    f();
    FAIL("expected an error starting with " << prefix);
  } catch (const Error& e) {
    INFO(e.what());
    REQUIRE(std::string(e.what()).substr(0, prefix.size()) == prefix);
  }
}

const double kInvSqrt2 = std::sqrt(0.5);

}  // namespace

TEST_CASE("hadamard keeps single-basis loci structural") {
  SECTION("fresh register becomes an even phase row") {
    auto r = run("qubit x[2]; x[0,2) *= H;");
    const auto& v = std::get<HadVal>(r.state.entries.at(0).value);
    REQUIRE(v.phases == std::vector<double>{0.0, 0.0});
  }
  SECTION("a set bit records a half turn") {
    auto r = run("qubit x[2]; x[0,2) += 2; x[0,2) *= H;");
    const auto& v = std::get<HadVal>(r.state.entries.at(0).value);
    REQUIRE(v.phases == std::vector<double>{0.0, 0.5});
  }
  SECTION("H twice reads the phases back into bits") {
    auto r = run("qubit x[2]; x[0,2) += 2; x[0,2) *= H; x[0,2) *= H;");
    const auto& v = std::get<NorVal>(r.state.entries.at(0).value);
    REQUIRE(v.bits == "01");
    REQUIRE(amp_eq(v.amp, Amp{1.0, 0.0}));
  }
  SECTION("reading back a quarter-turn phase is rejected") {
    check_error([] { apply_h(HadVal{{0.25}}, 1); }, "TypeMismatch");
  }
  SECTION("entangled entries expand ketwise instead") {
    auto r = run(
        "qubit x[2];"
        "x[0] *= H;"
        "if (x[0]) { x[1] += 1; }"
        "x[0] *= H;");
    REQUIRE(r.state.entries.size() == 1);
    oracle::Vec want = oracle::basis_state(2, 0);
    want = oracle::apply_1q(want, 0, oracle::gate_h());
    want = oracle::apply_controlled(want, {0}, 1, oracle::gate_x());
    want = oracle::apply_1q(want, 0, oracle::gate_h());
    const auto got = dense_of(r.state.entries.at(0), 2, {{"x", 0}});
    REQUIRE(oracle::l2_dist(got, want) < 1e-9);
  }
  SECTION("interference merges kets that land on one basis") {
    auto r = run("qubit x[2]; x[0,2) *= H; x[0] += 1; x[0] *= H;");
    REQUIRE(r.state.entries.size() == 2);
    expect_kets(r.state.entries.at(0).value, {{"0", Amp{1.0, 0.0}}});
    REQUIRE(std::holds_alternative<HadVal>(r.state.entries.at(1).value));
  }
}

TEST_CASE("fourier transforms match the reference transform") {
  SECTION("basis input") {
    auto r = run("qubit x[3]; x[0,3) += 5; x[0,3) *= QFT;");
    oracle::Vec want = oracle::apply_qft(oracle::basis_state(3, 5), {0, 1, 2});
    const auto got = dense_of(r.state.entries.at(0), 3, {{"x", 0}});
    REQUIRE(oracle::l2_dist(got, want) < 1e-9);
  }
  SECTION("RQFT undoes QFT") {
    auto r = run("qubit x[3]; x[0,3) += 5; x[0,3) *= QFT; x[0,3) *= RQFT;");
    expect_kets(r.state.entries.at(0).value, {{"101", Amp{1.0, 0.0}}});
  }
  SECTION("QFT of the uniform row collapses to zero") {
    auto r = run("qubit x[2]; x[0,2) *= H; x[0,2) *= QFT;");
    expect_kets(r.state.entries.at(0).value, {{"00", Amp{1.0, 0.0}}});
  }
}

TEST_CASE("comparison guards flip the tagged result qubit per ket") {
  const std::string ops[] = {"<", "<=", "==", "!=", ">=", ">"};
  for (const auto& op : ops) {
    DYNAMIC_SECTION("x " << op << " 2") {
      auto r = run("qubit x[2]; qubit r[1]; x[0,2) *= H;"
                   "if (x[0,2) " + op + " 2 @ r[0]) { }");
      const auto& e = r.state.entries.at(0);
      const auto order = e.locus.positions();
      const auto& v = std::get<EnVal>(e.value);
      REQUIRE(v.kets.size() == 4);
      for (const auto& k : v.kets) {
        const std::uint64_t x = var_value(order, k.basis, "x");
        const bool want = op == "<"    ? x < 2
                          : op == "<=" ? x <= 2
                          : op == "==" ? x == 2
                          : op == "!=" ? x != 2
                          : op == ">=" ? x >= 2
                                       : x > 2;
        REQUIRE(var_value(order, k.basis, "r") == (want ? 1u : 0u));
        REQUIRE(std::abs(k.amp - Amp{0.5, 0.0}) < 1e-9);
      }
    }
  }
  SECTION("both sides quantum") {
    auto r = run("qubit x[2]; qubit y[2]; qubit r[1];"
                 "x[0,2) *= H; y[0,2) *= H;"
                 "if (x[0,2) < y[0,2) @ r[0]) { }");
    const auto& e = r.state.entries.at(0);
    const auto order = e.locus.positions();
    for (const auto& k : std::get<EnVal>(e.value).kets) {
      const bool want =
          var_value(order, k.basis, "x") < var_value(order, k.basis, "y");
      REQUIRE(var_value(order, k.basis, "r") == (want ? 1u : 0u));
    }
  }
  SECTION("a comparison without a result qubit cannot run") {
    check_error(
        [] {
          run("qubit x[2]; qubit y[1]; x[0,2) *= H;"
              "if (x[0,2) == 2) { y[0] += 1; }");
        },
        "KindError");
  }
}

TEST_CASE("quantum conditionals act on the satisfying kets only") {
  SECTION("GHZ chain") {
    auto r = run("qubit x[3]; x[0] *= H;"
                 "for j in [0,2) && x[j] { x[j+1] += 1; }");
    REQUIRE(r.state.entries.size() == 1);
    expect_kets(r.state.entries.at(0).value,
                {{"000", Amp{kInvSqrt2, 0.0}}, {"111", Amp{kInvSqrt2, 0.0}}});
    REQUIRE(norm_sq(std::get<EnVal>(r.state.entries.at(0).value)) ==
            Catch::Approx(1.0).margin(1e-9));
  }
  SECTION("an unsatisfiable guard leaves the state untouched") {
    auto r = run("qubit x[1]; qubit y[1]; if (x[0]) { y[0] += 1; }");
    expect_kets(r.state.entries.at(0).value, {{"00", Amp{1.0, 0.0}}});
  }
  SECTION("a body that reorders its locus still lines up the other kets") {
    auto r = run("qubit x[1]; qubit y[2]; y[0] += 1; x[0] *= H;"
                 "if (x[0]) { y[0,2) += 1; y[1] += 1; }");
    const auto& e = r.state.entries.at(0);
    REQUIRE(e.locus.str() == "x[0] ++ y[1] ++ y[0]");
    expect_kets(e.value,
                {{"001", Amp{kInvSqrt2, 0.0}}, {"100", Amp{kInvSqrt2, 0.0}}});
  }
  SECTION("measurement is forbidden inside") {
    check_error(
        [] {
          run("qubit x[1]; qubit y[1]; x[0] *= H;"
              "if (x[0]) { let m = measure(y) in { } }");
        },
        "MeasureInQuantumConditional");
  }
  SECTION("guard and body may not overlap") {
    check_error([] { run("qubit x[2]; x[0] *= H; if (x[0]) { x[0] += 1; }"); },
                "CloneViolation");
  }
}

TEST_CASE("measurement collapses, rescales, and binds") {
  const std::string bell =
      "qubit x[1]; qubit y[1]; x[0] *= H;"
      "if (x[0]) { y[0] += 1; }"
      "let m = measure(x) in { y[0] += m; }";
  SECTION("forced outcomes pick each branch") {
    for (std::uint64_t out : {0, 1}) {
      auto r = run(bell, forcing({out}));
      REQUIRE(r.store.at("m").outcome == out);
      REQUIRE(r.store.at("m").prob == Catch::Approx(0.5).margin(1e-9));
      // y ends 0 either way: it matched x, then had x's outcome added
      expect_kets(r.state.entries.at(0).value, {{"0", Amp{1.0, 0.0}}});
    }
  }
  SECTION("the same seed reproduces the same outcome") {
    auto a = run(bell, seeded(7));
    auto b = run(bell, seeded(7));
    REQUIRE(a.store.at("m").outcome == b.store.at("m").outcome);
  }
  SECTION("outcomes are near-even over many seeds") {
    const Program p = parse_program(bell);
    int ones = 0;
    for (std::uint64_t s = 0; s < 10000; ++s)
      ones += static_cast<int>(
          eval_program(p, seeded(s)).store.at("m").outcome);
    REQUIRE(ones >= 4800);
    REQUIRE(ones <= 5200);
  }
  SECTION("impossible forced outcomes fail loudly") {
    check_error([&] { run(bell, forcing({3})); }, "ForcedOutcomeImpossible");
    check_error(
        [] {
          run("qubit x[1]; let m = measure(x) in { }", forcing({1}));
        },
        "ForcedOutcomeImpossible");
  }
  SECTION("running out of forced outcomes fails loudly") {
    check_error(
        [] {
          run("qubit x[1]; qubit y[1]; x[0] *= H; y[0] *= H;"
              "let a = measure(x) in { let b = measure(y) in { } }",
              forcing({0}));
        },
        "ForcedOutcomeImpossible");
  }
  SECTION("bound outcomes substitute in later arithmetic") {
    auto r = run("qubit x[2]; qubit y[2]; x[0,2) += 3;"
                 "let m = measure(x) in { let t = m + 1 in { y[0,2) += t; } }");
    REQUIRE(r.store.at("m").outcome == 3);
    REQUIRE(r.store.at("t").outcome == 4);
    const auto& v = std::get<NorVal>(r.state.entries.at(0).value);
    REQUIRE(v.bits == "00");  // 4 mod 4
  }
}

TEST_CASE("order finding for 7 mod 15") {
  const std::string setup =
      "qubit x[4]; qubit y[4];"
      "x[0,4) *= H; y[0,4) += 1;"
      "for j in [0,4) && x[j] { y[0,4) := mulmod(7 ^ (2 ^ j), 15); }";
  SECTION("the modular exponentiation table is exact") {
    auto r = run(setup);
    const auto& e = r.state.entries.at(0);
    const auto order = e.locus.positions();
    const auto& v = std::get<EnVal>(e.value);
    REQUIRE(v.kets.size() == 16);
    std::map<std::uint64_t, std::uint64_t> got;
    for (const auto& k : v.kets) {
      REQUIRE(std::abs(k.amp - Amp{0.25, 0.0}) < 1e-9);
      got[var_value(order, k.basis, "x")] = var_value(order, k.basis, "y");
    }
    for (const auto& [x, y] : oracle::shor15_pairs()) REQUIRE(got.at(x) == y);
  }
  SECTION("measuring y keeps exactly the preimages") {
    auto r = run(setup + "let m = measure(y) in { }", forcing({4}));
    REQUIRE(r.store.at("m").prob == Catch::Approx(0.25).margin(1e-9));
    const auto& e = r.state.entries.at(0);
    const auto order = e.locus.positions();
    std::map<Bits, Amp> want;
    for (std::uint64_t x : oracle::shor15_survivors_y4()) {
      Bits b(order.size(), '0');
      for (std::size_t i = 0; i < order.size(); ++i)
        if ((x >> order[i].idx) & 1) b[i] = '1';
      want[b] = Amp{0.5, 0.0};
    }
    expect_kets(e.value, want);
  }
  SECTION("the inverse transform shows the period") {
    auto r = run(setup + "let m = measure(y) in { x[0,4) *= RQFT; }",
                 forcing({4}));
    const auto& e = r.state.entries.at(0);
    const auto order = e.locus.positions();
    for (const auto& k : std::get<EnVal>(e.value).kets) {
      REQUIRE(var_value(order, k.basis, "x") % 4 == 0);
      REQUIRE(std::abs(std::abs(k.amp) - 0.5) < 1e-9);
    }
  }
}

TEST_CASE("amplitude diffusion reflects about the mean") {
  SECTION("matches the reference reflection") {
    auto r = run("qubit x[2]; x[1] *= H; x[0,2) *= dis;");
    oracle::Vec want = oracle::basis_state(2, 0);
    want = oracle::apply_1q(want, 1, oracle::gate_h());
    want = oracle::apply_diffusion(want, {0, 1});
    const auto got = dense_of(r.state.entries.at(0), 2, {{"x", 0}});
    REQUIRE(oracle::l2_dist(got, want) < 1e-9);
  }
  SECTION("suffix groups reflect independently") {
    auto r = run("qubit x[3]; x[2] *= H;"
                 "if (x[2]) { x[0,2) += 1; } x[0,2) *= dis;");
    oracle::Vec want = oracle::basis_state(3, 0);
    want = oracle::apply_1q(want, 2, oracle::gate_h());
    want = oracle::apply_controlled(want, {2}, 0, oracle::gate_x());
    want = oracle::apply_diffusion(want, {0, 1});
    const auto got = dense_of(r.state.entries.at(0), 3, {{"x", 0}});
    REQUIRE(oracle::l2_dist(got, want) < 1e-9);
    REQUIRE(norm_sq(to_en(r.state.entries.at(0).value)) ==
            Catch::Approx(1.0).margin(1e-9));
  }
}

TEST_CASE("weighted reduction") {
  const double wc = std::exp2(-1.0);         // 2^{-4/4}
  const double wo = std::sqrt(1.0 - 0.25);   // sqrt(1 - 2^{-4/2})
  SECTION("uniform input, hand-computed reflection") {
    auto r = run("qubit x[2]; x[0,2) *= H; x[0,2) *= reduce(01, 4);");
    const double s = 0.5 * (3.0 * wo + wc);
    std::map<Bits, Amp> want;
    for (std::uint64_t u = 0; u < 4; ++u) {
      const double w = u == 2 ? wc : wo;
      want[bits_of(u, 2)] = Amp{0.5 * s - w * 0.5, 0.0};
    }
    expect_kets(r.state.entries.at(0).value, want);
  }
  SECTION("missing slots join as zeros") {
    auto r = run("qubit x[2]; x[0,2) *= reduce(01, 4);");
    const double s = wo;  // only |00> present, weight wo, amp 1
    std::map<Bits, Amp> want{{"00", Amp{0.5 * s - wo, 0.0}},
                             {"10", Amp{0.5 * s, 0.0}},
                             {"01", Amp{0.5 * s, 0.0}},
                             {"11", Amp{0.5 * s, 0.0}}};
    expect_kets(r.state.entries.at(0).value, want);
  }
  SECTION("the pattern must fill the locus") {
    check_error([] { run("qubit x[2]; x[0,2) *= reduce(011, 4);"); },
                "WidthMismatch");
  }
}

TEST_CASE("evaluation invariants") {
  SECTION("unitaries preserve the norm") {
    auto r = run("qubit x[3]; qubit r[1];"
                 "x[0,3) *= H; x[0,3) += 3; x[0,3) *= QFT;"
                 "if (x[0,3) < 5 @ r[0]) { } x[0,3) *= RQFT;");
    double total = 0.0;
    for (const auto& e : r.state.entries) total += norm_sq(to_en(e.value));
    REQUIRE(total / static_cast<double>(r.state.entries.size()) ==
            Catch::Approx(1.0).margin(1e-9));
  }
  SECTION("classical control folds before anything runs") {
    auto r = run("qubit x[2]; let n = 2 in {"
                 "  if (n == 2) { x[0,2) += 3; } else { x[0] += 1; } }");
    const auto& v = std::get<NorVal>(r.state.entries.at(0).value);
    REQUIRE(v.bits == "11");
  }
  SECTION("trace emits one state line per statement") {
    std::ostringstream os;
    EvalOptions o;
    o.trace = true;
    o.trace_out = &os;
    run("qubit x[1]; x[0] *= H;", o);
    REQUIRE(os.str().find("loci") != std::string::npos);
    REQUIRE(os.str().find("Had") != std::string::npos);
  }
}
