#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <string>
#include <vector>

#include "qafny/dense.hpp"
#include "qafny/parser.hpp"
#include "support/oracles.hpp"

using namespace qafny;

namespace {

Layout layout_of(const Program& p) {
  std::vector<std::pair<std::string, int>> decls;
  for (const auto& d : p.decls)
    decls.emplace_back(d.name, static_cast<int>(d.count));
  return make_layout(decls);
}

StateVector dens(const std::string& src) {
  const Program p = parse_program(src);
  const EvalResult r = eval_program(p);
  return densify(r.state, kind_env_of(p), layout_of(p));
}

template <typename F>
void check_error(F f, const std::string& prefix) {
  try {
    f();
    FAIL("expected an error starting with " << prefix);
  } catch (const Error& e) {
    INFO(e.raw);
    CHECK(e.raw.substr(0, prefix.size()) == prefix);
  }
}

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

const char* kGhz3 =
    "qubit x[3];"
    "x[0] *= H;"
    "if (x[0]) { x[1] += 1; }"
    "if (x[1]) { x[2] += 1; }";

}  // namespace

TEST_CASE("densify embeds the symbolic heap") {
  SECTION("fresh single qubit is the unit basis vector") {
    const StateVector v = dens("qubit x[1]; skip;");
    REQUIRE(v.qubits == 1);
    CHECK(std::abs(v.amps[0] - Amp{1.0, 0.0}) < 1e-12);
    CHECK(std::abs(v.amps[1]) < 1e-12);
  }

  SECTION("GHZ lands on the two corner indices") {
    const StateVector v = dens(kGhz3);
    REQUIRE(v.qubits == 3);
    for (std::size_t i = 0; i < v.amps.size(); ++i) {
      const double want = (i == 0 || i == 7) ? kInvSqrt2 : 0.0;
      INFO("index " << i);
      CHECK(std::abs(v.amps[i] - Amp{want, 0.0}) < 1e-9);
    }
  }

  SECTION("separate loci tensor together") {
    const StateVector v = dens("qubit x[1]; qubit y[1]; x[0] *= H; y[0] += 1;");
    CHECK(std::abs(v.amps[0]) < 1e-12);
    CHECK(std::abs(v.amps[1]) < 1e-12);
    CHECK(std::abs(v.amps[2] - Amp{kInvSqrt2, 0.0}) < 1e-9);
    CHECK(std::abs(v.amps[3] - Amp{kInvSqrt2, 0.0}) < 1e-9);
  }

  SECTION("segment permutation becomes a wire permutation") {
    const KindEnv om{{"x", Kind{Kind::Tag::Q, 3}}};
    const Layout lay = make_layout({{"x", 3}});
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
      EnVal en;
      double norm2 = 0.0;
      for (std::uint64_t b = 0; b < 8; ++b) {
        const Amp z{u(rng), u(rng)};
        norm2 += std::norm(z);
        en.kets.push_back({z, bits_of(b, 3), {}});
      }
      for (auto& k : en.kets) k.amp /= std::sqrt(norm2);

      State st;
      st.add(Locus{{Range{"x", 0, 3}}}, en);
      const StateVector base = densify(st, om, lay);

      State swapped;
      swapped.add(Locus{{Range{"x", 0, 3}}}, permute_value(en, 0, 1, 2));
      const StateVector got = densify(swapped, om, lay);

      // new position 0,1 take old 1,2 and new position 2 takes old 0
      std::vector<Amp> want(8, Amp{0.0, 0.0});
      for (std::uint64_t i = 0; i < 8; ++i) {
        const std::uint64_t j =
            (i >> 1 & 1) | ((i >> 2 & 1) << 1) | ((i & 1) << 2);
        want[j] = base.amps[i];
      }
      INFO("trial " << trial);
      REQUIRE(oracle::l2_dist(got.amps, want) < 1e-12);
    }
  }

  SECTION("ket order does not matter") {
    const KindEnv om{{"x", Kind{Kind::Tag::Q, 2}}};
    const Layout lay = make_layout({{"x", 2}});
    EnVal fwd{{{Amp{kInvSqrt2, 0.0}, "01", {}}, {Amp{0.0, kInvSqrt2}, "10", {}}}};
    EnVal rev{{fwd.kets[1], fwd.kets[0]}};
    State a, b;
    a.add(Locus{{Range{"x", 0, 2}}}, fwd);
    b.add(Locus{{Range{"x", 0, 2}}}, rev);
    CHECK(oracle::l2_dist(densify(a, om, lay).amps, densify(b, om, lay).amps) <
          1e-12);
  }

  SECTION("frozen bases are refused") {
    const KindEnv om{{"x", Kind{Kind::Tag::Q, 1}}};
    const Layout lay = make_layout({{"x", 1}});
    State st;
    st.add(Locus{{Range{"x", 0, 1}}},
           EnVal{{{Amp{1.0, 0.0}, "0", {"1"}}}});
    check_error([&] { densify(st, om, lay); }, "NonEmptyStack");
  }

  SECTION("every declared qubit must be covered") {
    const KindEnv om{{"x", Kind{Kind::Tag::Q, 2}}};
    const Layout lay = make_layout({{"x", 2}});
    State st;
    st.add(Locus{{Range{"x", 0, 1}}}, NorVal{Amp{1.0, 0.0}, "0", {}});
    check_error([&] { densify(st, om, lay); }, "IncompleteCoverage");
  }
}

TEST_CASE("simulate_gates multiplies the gate unitaries") {
  SECTION("single H") {
    GateProgram p;
    p.d = 1;
    p.gates.push_back(g_h(0));
    const StateVector v = simulate_gates(p, zero_vector(1));
    CHECK(std::abs(v.amps[0] - Amp{kInvSqrt2, 0.0}) < 1e-12);
    CHECK(std::abs(v.amps[1] - Amp{kInvSqrt2, 0.0}) < 1e-12);
  }

  SECTION("CX maps |10> to |11>") {
    GateProgram p;
    p.d = 2;
    p.gates.push_back(g_x(0));
    p.gates.push_back(g_cx(0, 1));
    const StateVector v = simulate_gates(p, zero_vector(2));
    CHECK(std::abs(v.amps[3] - Amp{1.0, 0.0}) < 1e-12);
  }

  SECTION("lowered phase adder reproduces modular addition exhaustively") {
    const int n = 2;
    SizeEnv sz{{"a", n}, {"b", n}};
    OqLayout olay{{{"a", {0, 1}}, {"b", {2, 3}}}};
    AncillaPool pool{4, 0, {}};
    const GateProgram g = oq_lower(sz, build_rz_adder("a", "b", n), olay, pool);
    for (std::uint64_t a = 0; a < 4; ++a)
      for (std::uint64_t b = 0; b < 4; ++b) {
        StateVector in = zero_vector(g.d);
        in.amps[0] = Amp{0.0, 0.0};
        in.amps[a | (b << 2)] = Amp{1.0, 0.0};
        const StateVector out = simulate_gates(g, in);
        std::vector<Amp> want(in.amps.size(), Amp{0.0, 0.0});
        want[a | (oracle::add_mod2n(a, b, n) << 2)] = Amp{1.0, 0.0};
        INFO("a=" << a << " b=" << b);
        REQUIRE(l2_distance_up_to_phase(want, out.amps) < 1e-9);
      }
  }

  SECTION("dimension and measurement refusals") {
    GateProgram p;
    p.d = 2;
    p.gates.push_back(g_h(0));
    check_error([&] { simulate_gates(p, zero_vector(1)); },
                "DimensionMismatch");
    GateProgram m;
    m.d = 1;
    m.gates.push_back(g_measure(0, 0));
    check_error([&] { simulate_gates(m, zero_vector(1)); }, "TypeMismatch");
  }
}

TEST_CASE("crosscheck compares interpreter and circuit") {
  SECTION("skip program agrees exactly") {
    const CrosscheckRow row =
        crosscheck(parse_program("qubit x[1]; skip;"), "skip");
    CHECK(row.pass);
    CHECK(row.qubits == 1);
    CHECK(row.distance == 0.0);
  }

  SECTION("GHZ agrees for every size") {
    for (int n = 2; n <= 8; ++n) {
      std::string src = "qubit x[" + std::to_string(n) + "]; x[0] *= H;";
      for (int i = 1; i < n; ++i)
        src += "if (x[" + std::to_string(i - 1) + "]) { x[" +
               std::to_string(i) + "] += 1; }";
      const CrosscheckRow row =
          crosscheck(parse_program(src), "ghz" + std::to_string(n));
      INFO(row.note);
      CHECK(row.qubits == n);
      CHECK(row.distance <= 1e-9);
      CHECK(row.pass);
    }
  }

  SECTION("QFT programs agree through the layout fold") {
    const CrosscheckRow row = crosscheck(
        parse_program("qubit x[3]; x[0,3) += 5; x[0,3) *= QFT;"), "qft");
    INFO(row.note);
    CHECK(row.pass);
  }

  SECTION("order-finding fragment agrees") {
    const CrosscheckRow row = crosscheck(
        parse_program("qubit x[3]; qubit y[4];"
                      "x[0,3) *= H;"
                      "y[0] += 1;"
                      "for j in [0,3) && x[j] { y[0,4) *= mulmod(7^(2^j), 15); }"),
        "shor-window", 1e-7);
    INFO(row.note);
    CHECK(row.qubits <= 14);
    CHECK(row.pass);
  }

  SECTION("measurement programs compare outcome distributions") {
    const CrosscheckRow bell = crosscheck(
        parse_program("qubit x[2]; x[0] *= H; if (x[0]) { x[1] += 1; }"
                      "let m = measure(x) in { skip; }"),
        "bell-measure");
    INFO(bell.note);
    CHECK(bell.pass);

    const CrosscheckRow chained = crosscheck(
        parse_program("qubit x[1]; qubit y[1]; x[0] *= H;"
                      "if (x[0]) { y[0] += 1; }"
                      "let m = measure(x) in { let k = measure(y) in { skip; } }"),
        "chained-measure");
    INFO(chained.note);
    CHECK(chained.pass);

    const CrosscheckRow tail = crosscheck(
        parse_program("qubit x[1]; qubit y[1]; x[0] *= H;"
                      "let m = measure(x) in { skip; } y[0] *= H;"),
        "gates-after-measure");
    INFO(tail.note);
    CHECK(tail.pass);
  }

  SECTION("failures become rows, not exceptions") {
    const CrosscheckRow big =
        crosscheck(parse_program("qubit x[15]; x[0] *= H;"), "too-big");
    CHECK_FALSE(big.pass);
    CHECK(big.qubits == 15);
    CHECK(std::isinf(big.distance));
    CHECK(big.note.substr(0, 16) == "RangeOutOfBounds");

    const CrosscheckRow nolower =
        crosscheck(parse_program("qubit x[2]; x[0,2) *= H; x[0,2) *= reduce(01, 4);"),
                   "reduce");
    CHECK_FALSE(nolower.pass);
    CHECK(nolower.note.substr(0, 25) == "UnsupportedOracleLowering");
  }

  SECTION("worker pool keeps rows in input order") {
    std::vector<std::pair<std::string, Program>> jobs;
    jobs.emplace_back("skip", parse_program("qubit x[1]; skip;"));
    jobs.emplace_back("ghz3", parse_program(kGhz3));
    jobs.emplace_back(
        "bell-measure",
        parse_program("qubit x[2]; x[0] *= H; if (x[0]) { x[1] += 1; }"
                      "let m = measure(x) in { skip; }"));
    const auto rows = crosscheck_many(jobs, 1e-9, 14, 3);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].program == "skip");
    CHECK(rows[1].program == "ghz3");
    CHECK(rows[2].program == "bell-measure");
    for (const auto& r : rows) {
      INFO(r.program << ": " << r.note);
      CHECK(r.pass);
    }
    CHECK(crosscheck_tsv(rows) == crosscheck_tsv(crosscheck_many(jobs)));
  }

  SECTION("TSV rows are pinned") {
    std::vector<CrosscheckRow> rows;
    rows.push_back(crosscheck(parse_program("qubit x[1]; skip;"), "skip"));
    rows.push_back(crosscheck(
        parse_program("qubit x[2]; x[0,2) *= H; x[0,2) *= reduce(01, 4);"), "reduce"));
    CHECK(crosscheck_tsv(rows) ==
          "program\tqubits\tdistance\tpass/fail\n"
          "skip\t1\t0.000000000e+00\tpass\n"
          "reduce\t0\tinf\tfail\n");
  }
}
