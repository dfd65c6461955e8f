#pragma once

#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qafny/locus.hpp"
#include "qafny/value.hpp"

namespace qafny {

struct StateEntry {
  Locus locus;
  QuantumValue value;
};

inline const char* form_name(const QuantumValue& q) {
  switch (q.index()) {
    case 0: return "Nor";
    case 1: return "Had";
    default: return "EN";
  }
}

// The quantum heap: loci paired with their values, kept width-consistent.
struct State {
  std::vector<StateEntry> entries;

  int find(const Locus& locus) const {
    for (std::size_t i = 0; i < entries.size(); ++i)
      if (entries[i].locus == locus) return static_cast<int>(i);
    return -1;
  }

  int find_containing(const Pos& p) const {
    for (std::size_t i = 0; i < entries.size(); ++i)
      if (entries[i].locus.contains(p)) return static_cast<int>(i);
    return -1;
  }

  void add(Locus locus, QuantumValue value) {
    if (locus.width() != value_width(value))
      throw Error(ErrCat::Runtime, "WidthMismatch: locus " + locus.str() +
                                       " does not fit its value");
    for (const auto& e : entries)
      if (!e.locus.disjoint(locus))
        throw Error(ErrCat::Runtime,
                    "OverlappingLoci: " + locus.str() + " collides with " +
                        e.locus.str());
    entries.push_back({std::move(locus), std::move(value)});
  }
};

// Def 4.1 state well-formedness.  In mode C amplitudes carry full weight and
// no bases are frozen; in mode M (inside a conditional) Σ|z|² may drop below
// one and stacks may be populated.
inline void check_wellformed(const State& st, bool mode_c = true) {
  for (std::size_t i = 0; i < st.entries.size(); ++i) {
    const auto& e = st.entries[i];
    if (!e.locus.self_disjoint())
      throw Error(ErrCat::Runtime,
                  "OverlappingLoci: locus " + e.locus.str() + " overlaps itself");
    for (std::size_t j = i + 1; j < st.entries.size(); ++j)
      if (!e.locus.disjoint(st.entries[j].locus))
        throw Error(ErrCat::Runtime,
                    "OverlappingLoci: " + e.locus.str() + " collides with " +
                        st.entries[j].locus.str());
    const int w = e.locus.width();
    std::visit(
        overloaded{
            [&](const NorVal& v) {
              if (static_cast<int>(v.bits.size()) != w || !valid_bits(v.bits))
                throw Error(ErrCat::Runtime,
                            "WidthMismatch: Nor basis at " + e.locus.str());
              if (mode_c && (!v.stack.empty() ||
                             std::abs(std::abs(v.amp) - 1.0) > kAmpTol))
                throw Error(ErrCat::Runtime,
                            "NormViolation: Nor value at " + e.locus.str());
            },
            [&](const HadVal& v) {
              if (static_cast<int>(v.phases.size()) != w)
                throw Error(ErrCat::Runtime,
                            "WidthMismatch: Had phases at " + e.locus.str());
            },
            [&](const EnVal& v) {
              double total = 0.0;
              for (const auto& k : v.kets) {
                if (static_cast<int>(k.basis.size()) != w || !valid_bits(k.basis))
                  throw Error(ErrCat::Runtime,
                              "WidthMismatch: EN basis at " + e.locus.str());
                if (mode_c && !k.stack.empty())
                  throw Error(ErrCat::Runtime,
                              "FrozenLeak: stack outside conditional at " +
                                  e.locus.str());
                total += std::norm(k.amp);
              }
              if (total > 1.0 + kAmpTol ||
                  (mode_c && std::abs(total - 1.0) > kAmpTol))
                throw Error(ErrCat::Runtime,
                            "NormViolation: EN weight " + std::to_string(total) +
                                " at " + e.locus.str());
            }},
        e.value);
  }
}

inline nlohmann::json dump_json(const State& st) {
  nlohmann::json loci = nlohmann::json::array();
  for (const auto& e : st.entries) {
    nlohmann::json ranges = nlohmann::json::array();
    for (const auto& r : e.locus.ranges)
      ranges.push_back({r.var, r.lo, r.hi});
    nlohmann::json entry{{"ranges", ranges}, {"type", form_name(e.value)}};
    std::visit(overloaded{[&](const NorVal& v) {
                            entry["kets"] = {{{"re", v.amp.real()},
                                              {"im", v.amp.imag()},
                                              {"basis", v.bits},
                                              {"stack", v.stack}}};
                          },
                          [&](const HadVal& v) { entry["phases"] = v.phases; },
                          [&](const EnVal& v) {
                            nlohmann::json kets = nlohmann::json::array();
                            for (const auto& k : v.kets)
                              kets.push_back({{"re", k.amp.real()},
                                              {"im", k.amp.imag()},
                                              {"basis", k.basis},
                                              {"stack", k.stack}});
                            entry["kets"] = kets;
                          }},
               e.value);
    loci.push_back(std::move(entry));
  }
  return nlohmann::json{{"loci", loci}};
}

}  // namespace qafny
