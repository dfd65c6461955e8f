#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "qafny/circuit.hpp"
#include "qafny/interp.hpp"

namespace qafny {

// Full 2^qubits amplitude vector; index bit w is the basis bit on wire w.
struct StateVector {
  int qubits = 0;
  std::vector<Amp> amps;
  Layout layout;
};

inline StateVector zero_vector(int qubits) {
  StateVector v;
  v.qubits = qubits;
  v.amps.assign(std::size_t{1} << qubits, Amp{0.0, 0.0});
  v.amps[0] = Amp{1.0, 0.0};
  return v;
}

// Tensor-embed a symbolic heap into one dense vector over the declared wires.
// Every declared qubit must belong to exactly one locus, no basis may be
// frozen, and each entry must carry full weight (mode-C well-formedness).
inline StateVector densify(const State& st, const KindEnv& omega,
                           const Layout& lay) {
  std::vector<Locus> loci;
  for (const auto& e : st.entries) loci.push_back(e.locus);
  wf_locus_domain(omega, loci);
  for (const auto& e : st.entries) {
    const bool stacked = std::visit(
        overloaded{[](const NorVal& v) { return !v.stack.empty(); },
                   [](const HadVal&) { return false; },
                   [](const EnVal& v) {
                     return std::any_of(
                         v.kets.begin(), v.kets.end(),
                         [](const BasisKet& k) { return !k.stack.empty(); });
                   }},
        e.value);
    if (stacked)
      throw Error(ErrCat::Runtime, "NonEmptyStack: locus " + e.locus.str() +
                                       " still carries frozen bases");
  }
  check_wellformed(st, true);

  std::set<Pos> covered;
  for (const auto& l : loci)
    for (const auto& p : l.positions()) covered.insert(p);
  for (int w = 0; w < lay.declared; ++w) {
    const Pos& p = lay.pos_of[static_cast<std::size_t>(w)];
    if (!covered.count(p))
      throw Error(ErrCat::Runtime, "IncompleteCoverage: qubit " + p.str() +
                                       " is not covered by any locus");
  }

  std::vector<std::pair<std::uint64_t, Amp>> acc{{0, Amp{1.0, 0.0}}};
  for (const auto& e : st.entries) {
    std::vector<int> ws;
    for (const auto& p : e.locus.positions()) ws.push_back(lay.wire(p));
    const EnVal en = to_en(e.value);
    std::vector<std::pair<std::uint64_t, Amp>> next;
    next.reserve(acc.size() * en.kets.size());
    for (const auto& [idx, amp] : acc)
      for (const auto& k : en.kets) {
        std::uint64_t at = idx;
        for (std::size_t i = 0; i < ws.size(); ++i)
          if (k.basis[i] == '1') at |= std::uint64_t{1} << ws[i];
        next.emplace_back(at, amp * k.amp);
      }
    acc = std::move(next);
  }

  StateVector out = zero_vector(lay.declared);
  out.layout = lay;
  out.amps[0] = Amp{0.0, 0.0};
  for (const auto& [idx, amp] : acc) out.amps[idx] += amp;
  return out;
}

namespace detail {

inline bool ctrls_set(std::uint64_t idx, const std::vector<int>& cs) {
  for (int c : cs)
    if (!(idx >> c & 1)) return false;
  return true;
}

inline void dense_x(std::vector<Amp>& v, int w, const std::vector<int>& cs) {
  const std::uint64_t bit = std::uint64_t{1} << w;
  for (std::uint64_t i = 0; i < v.size(); ++i)
    if (!(i & bit) && ctrls_set(i, cs)) std::swap(v[i], v[i | bit]);
}

inline void dense_gate(std::vector<Amp>& v, const Gate& g,
                       std::vector<int>& cs) {
  switch (g.kind) {
    case Gate::Kind::H: {
      const std::uint64_t bit = std::uint64_t{1} << g.a;
      const double s = 1.0 / std::sqrt(2.0);
      for (std::uint64_t i = 0; i < v.size(); ++i)
        if (!(i & bit) && ctrls_set(i, cs)) {
          const Amp a = v[i], b = v[i | bit];
          v[i] = (a + b) * s;
          v[i | bit] = (a - b) * s;
        }
      return;
    }
    case Gate::Kind::X:
      dense_x(v, g.a, cs);
      return;
    case Gate::Kind::RZ: {
      const Amp ph = alpha(std::ldexp(static_cast<double>(g.num), -g.den));
      const std::uint64_t bit = std::uint64_t{1} << g.a;
      for (std::uint64_t i = 0; i < v.size(); ++i)
        if ((i & bit) && ctrls_set(i, cs)) v[i] *= ph;
      return;
    }
    case Gate::Kind::CX: {
      cs.push_back(g.a);
      dense_x(v, g.b, cs);
      cs.pop_back();
      return;
    }
    case Gate::Kind::CCX: {
      cs.push_back(g.a);
      cs.push_back(g.b);
      dense_x(v, g.c, cs);
      cs.pop_back();
      cs.pop_back();
      return;
    }
    case Gate::Kind::Ctrl: {
      cs.push_back(g.a);
      for (const auto& ig : g.body->gates) dense_gate(v, ig, cs);
      cs.pop_back();
      return;
    }
    case Gate::Kind::Measure:
      throw Error(ErrCat::Runtime,
                  "TypeMismatch: Measure has no unitary action; simulate_gates "
                  "takes measure-free programs");
  }
}

}  // namespace detail

inline StateVector simulate_gates(const GateProgram& p, StateVector v) {
  if (p.d != v.qubits)
    throw Error(ErrCat::Runtime,
                "DimensionMismatch: gate program on " + std::to_string(p.d) +
                    " wires applied to a " + std::to_string(v.qubits) +
                    "-qubit vector");
  std::vector<int> cs;
  for (const auto& g : p.gates) detail::dense_gate(v.amps, g, cs);
  return v;
}

// ‖a − e^{iθ}b‖ with θ read off the largest-magnitude component of a.
inline double l2_distance_up_to_phase(const std::vector<Amp>& a,
                                      const std::vector<Amp>& b) {
  if (a.size() != b.size())
    throw Error(ErrCat::Runtime, "DimensionMismatch: vectors of size " +
                                     std::to_string(a.size()) + " and " +
                                     std::to_string(b.size()));
  std::size_t m = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i]) > std::abs(a[m])) m = i;
  Amp phase{1.0, 0.0};
  if (std::abs(a[m]) > kZeroTol && std::abs(b[m]) > kZeroTol)
    phase = (a[m] / std::abs(a[m])) * std::conj(b[m] / std::abs(b[m]));
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d2 += std::norm(a[i] - phase * b[i]);
  return std::sqrt(d2);
}

struct CrosscheckRow {
  std::string program;
  int qubits = 0;
  double distance = 0.0;
  bool pass = false;
  std::string note;  // error text when a stage threw; not part of the TSV
};

namespace detail {

// Joint outcome distribution of the compiled circuit: marginals of the final
// vector over each measure group's wires.  Valid because measured wires are
// never touched after their Measure (the compiler rejects that), so later
// unitaries commute with the projections.
inline std::map<std::vector<std::uint64_t>, double> dense_distribution(
    const std::vector<Amp>& v, const std::vector<std::vector<int>>& groups) {
  std::map<std::vector<std::uint64_t>, double> dist;
  for (std::uint64_t idx = 0; idx < v.size(); ++idx) {
    const double p = std::norm(v[idx]);
    if (p <= 0.0) continue;
    std::vector<std::uint64_t> key;
    key.reserve(groups.size());
    for (const auto& ws : groups) {
      std::uint64_t o = 0;
      for (std::size_t i = 0; i < ws.size(); ++i)
        if (idx >> ws[i] & 1) o |= std::uint64_t{1} << i;
      key.push_back(o);
    }
    dist[key] += p;
  }
  return dist;
}

// The interpreter's analytic distribution: force every outcome tuple in turn
// and multiply the per-measurement chances; impossible tuples carry weight 0.
inline std::map<std::vector<std::uint64_t>, double> interp_distribution(
    const Program& p, const std::vector<std::vector<int>>& groups) {
  std::map<std::vector<std::uint64_t>, double> dist;
  std::vector<std::uint64_t> tuple(groups.size(), 0);
  for (;;) {
    EvalOptions opts;
    opts.forced = tuple;
    try {
      const EvalResult r = eval_program(p, opts);
      if (r.measurements.size() != groups.size())
        throw Error(ErrCat::Runtime,
                    "IllFormedState: interpreter and circuit disagree on the "
                    "number of measurements");
      double prob = 1.0;
      for (const auto& m : r.measurements) prob *= m.prob;
      dist[tuple] = prob;
    } catch (const Error& e) {
      if (e.raw.rfind("ForcedOutcomeImpossible", 0) != 0) throw;
      dist[tuple] = 0.0;
    }
    std::size_t i = 0;
    for (; i < tuple.size(); ++i) {
      if (++tuple[i] < (std::uint64_t{1} << groups[i].size())) break;
      tuple[i] = 0;
    }
    if (i == tuple.size()) break;
  }
  return dist;
}

}  // namespace detail

// Run the program both ways — symbolically and as its compiled circuit under
// this simulator — and report how far apart they land.  Measure-free programs
// compare final vectors up to global phase; programs with measurements
// compare joint outcome distributions.  Failures of any stage become failing
// rows rather than exceptions.
inline CrosscheckRow crosscheck(const Program& p, const std::string& name,
                                double tol = 1e-9, int max_qubits = 14) {
  CrosscheckRow row;
  row.program = name;
  try {
    const CompileResult c = compile(p);
    row.qubits = c.gates.d;
    if (c.gates.d > max_qubits)
      throw Error(ErrCat::Runtime,
                  "RangeOutOfBounds: program needs " +
                      std::to_string(c.gates.d) + " wires; the cap is " +
                      std::to_string(max_qubits));

    GateProgram unitary;
    unitary.d = c.gates.d;
    for (const auto& g : c.gates.gates)
      if (g.kind != Gate::Kind::Measure) unitary.gates.push_back(g);
    StateVector v = simulate_gates(unitary, zero_vector(c.gates.d));
    v.layout = c.layout;

    // Scratch wires must come back clean; everything above the declared
    // range is traced out by keeping only the ancilla-zero block.
    const int dec = c.layout.declared;
    double leak = 0.0;
    std::vector<Amp> reduced(std::size_t{1} << dec, Amp{0.0, 0.0});
    for (std::uint64_t i = 0; i < v.amps.size(); ++i) {
      if (i >> dec)
        leak += std::norm(v.amps[i]);
      else
        reduced[i] = v.amps[i];
    }

    double dist;
    if (c.measure_wires.empty()) {
      const EvalResult r = eval_program(p);
      const StateVector want = densify(r.state, kind_env_of(p), c.layout);
      dist = l2_distance_up_to_phase(want.amps, reduced);
    } else {
      const auto dd = detail::dense_distribution(v.amps, c.measure_wires);
      const auto id = detail::interp_distribution(p, c.measure_wires);
      dist = 0.0;
      for (const auto& [tuple, pi] : id) {
        const auto it = dd.find(tuple);
        const double pd = it == dd.end() ? 0.0 : it->second;
        dist = std::max(dist, std::abs(pi - pd));
      }
      for (const auto& [tuple, pd] : dd)
        if (!id.count(tuple)) dist = std::max(dist, pd);
    }
    row.distance = std::max(dist, std::sqrt(leak));
    row.pass = row.distance <= tol;
  } catch (const Error& e) {
    row.distance = std::numeric_limits<double>::infinity();
    row.pass = false;
    row.note = e.raw;
  }
  return row;
}

// Rows are independent; a small worker pool grinds through them in parallel
// while the output order stays the input order.
inline std::vector<CrosscheckRow> crosscheck_many(
    const std::vector<std::pair<std::string, Program>>& programs,
    double tol = 1e-9, int max_qubits = 14,
    unsigned workers = std::thread::hardware_concurrency()) {
  std::vector<CrosscheckRow> rows(programs.size());
  workers = std::max(1u, std::min<unsigned>(workers, programs.size()));
  std::atomic<std::size_t> cursor{0};
  auto grind = [&] {
    for (std::size_t i; (i = cursor.fetch_add(1)) < programs.size();)
      rows[i] = crosscheck(programs[i].second, programs[i].first, tol,
                           max_qubits);
  };
  if (workers <= 1) {
    grind();
  } else {
    std::vector<std::thread> ts;
    ts.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) ts.emplace_back(grind);
    for (auto& t : ts) t.join();
  }
  return rows;
}

inline std::string crosscheck_tsv(const std::vector<CrosscheckRow>& rows) {
  std::string out = "program\tqubits\tdistance\tpass/fail\n";
  for (const auto& r : rows) {
    char dist[32];
    std::snprintf(dist, sizeof dist, "%.9e", r.distance);
    out += r.program + "\t" + std::to_string(r.qubits) + "\t" + dist + "\t" +
           (r.pass ? "pass" : "fail") + "\n";
  }
  return out;
}

}  // namespace qafny
