#pragma once

#include <algorithm>
#include <functional>
#include <utility>
#include <variant>
#include <vector>

#include "qafny/bits.hpp"
#include "qafny/diag.hpp"

namespace qafny {

// One summand of an EN value: amplitude, basis bitstring, and the frozen
// basis stack (top first) holding guard bits removed during conditionals.
struct BasisKet {
  Amp amp;
  Bits basis;
  std::vector<Bits> stack;

  bool same_slot(const BasisKet& o) const {
    return basis == o.basis && stack == o.stack;
  }
};

struct NorVal {
  Amp amp{1.0, 0.0};
  Bits bits;
  std::vector<Bits> stack;
};

// Unentangled superposition: one phase (in turns) per qubit, value
// (1/sqrt(2^n)) (X)_j (|0> + alpha(r_j)|1>).
struct HadVal {
  std::vector<double> phases;
};

struct EnVal {
  std::vector<BasisKet> kets;
};

using QuantumValue = std::variant<NorVal, HadVal, EnVal>;

inline int value_width(const QuantumValue& q) {
  return std::visit(
      overloaded{
          [](const NorVal& v) { return static_cast<int>(v.bits.size()); },
          [](const HadVal& v) { return static_cast<int>(v.phases.size()); },
          [](const EnVal& v) {
            return v.kets.empty() ? 0 : static_cast<int>(v.kets[0].basis.size());
          }},
      q);
}

// Sum like kets, drop near-zero amplitudes, sort by (basis, stack); keeps EN
// values canonical so state equality is structural.
inline EnVal merge_kets(EnVal q) {
  std::sort(q.kets.begin(), q.kets.end(),
            [](const BasisKet& a, const BasisKet& b) {
              if (a.basis != b.basis) return a.basis < b.basis;
              return a.stack < b.stack;
            });
  EnVal out;
  for (auto& k : q.kets) {
    if (!out.kets.empty() && out.kets.back().same_slot(k))
      out.kets.back().amp += k.amp;
    else
      out.kets.push_back(std::move(k));
  }
  out.kets.erase(std::remove_if(out.kets.begin(), out.kets.end(),
                                [](const BasisKet& k) {
                                  return std::abs(k.amp) < kZeroTol;
                                }),
                 out.kets.end());
  return out;
}

inline EnVal nor_to_en(const NorVal& v) {
  return EnVal{{BasisKet{v.amp, v.bits, v.stack}}};
}

// Had row of the value-equivalence relation: 2^n kets with amplitude
// alpha(sum_k r_k * j[k]) / sqrt(2^n).
inline EnVal had_to_en(const HadVal& v) {
  const std::size_t n = v.phases.size();
  const double norm = 1.0 / std::sqrt(static_cast<double>(std::uint64_t{1} << n));
  EnVal out;
  out.kets.reserve(std::size_t{1} << n);
  for (std::uint64_t j = 0; j < (std::uint64_t{1} << n); ++j) {
    double turns = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      if (j >> k & 1) turns += v.phases[k];
    out.kets.push_back(BasisKet{alpha(turns) * norm, bits_of(j, n), {}});
  }
  return merge_kets(std::move(out));
}

inline NorVal en_to_nor(const EnVal& v) {
  if (v.kets.size() != 1)
    throw Error(ErrCat::Runtime, "TypeMismatch: EN value is not a singleton");
  return NorVal{v.kets[0].amp, v.kets[0].basis, v.kets[0].stack};
}

inline EnVal to_en(const QuantumValue& q) {
  return std::visit(overloaded{[](const NorVal& v) { return nor_to_en(v); },
                               [](const HadVal& v) { return had_to_en(v); },
                               [](const EnVal& v) { return v; }},
                    q);
}

// Swap the basis segments [n, n+i) and [n+i, n+i+k) in every ket; the state
// half of the adjacent-segment permutation rewrite.
inline QuantumValue permute_value(QuantumValue q, int n, int i, int k) {
  const int w = value_width(q);
  if (n < 0 || i < 0 || k < 0 || n + i + k > w)
    throw Error(ErrCat::Runtime, "WidthMismatch: permute segment out of range");
  auto swap_str = [&](auto& s) {
    auto mid = s.substr(static_cast<std::size_t>(n + i), static_cast<std::size_t>(k));
    auto left = s.substr(static_cast<std::size_t>(n), static_cast<std::size_t>(i));
    s = s.substr(0, static_cast<std::size_t>(n)) + mid + left +
        s.substr(static_cast<std::size_t>(n + i + k));
  };
  std::visit(overloaded{[&](NorVal& v) { swap_str(v.bits); },
                        [&](HadVal& v) {
                          std::vector<double> p = v.phases;
                          for (int t = 0; t < k; ++t) p[static_cast<std::size_t>(n + t)] = v.phases[static_cast<std::size_t>(n + i + t)];
                          for (int t = 0; t < i; ++t) p[static_cast<std::size_t>(n + k + t)] = v.phases[static_cast<std::size_t>(n + t)];
                          v.phases = std::move(p);
                        },
                        [&](EnVal& v) {
                          for (auto& ket : v.kets) swap_str(ket.basis);
                          v = merge_kets(std::move(v));
                        }},
             q);
  return q;
}

// Join product.  Nor and Had pairs keep their structured forms (concatenated
// bits / phases); mixed operands are expanded through their EN form, which
// carries the 1/sqrt(2^n) normalizer with them.
inline QuantumValue join_values(const QuantumValue& q1, const QuantumValue& q2) {
  if (std::holds_alternative<HadVal>(q1) && std::holds_alternative<HadVal>(q2)) {
    HadVal out = std::get<HadVal>(q1);
    const auto& b = std::get<HadVal>(q2);
    out.phases.insert(out.phases.end(), b.phases.begin(), b.phases.end());
    return out;
  }
  if (std::holds_alternative<NorVal>(q1) && std::holds_alternative<NorVal>(q2)) {
    const auto& a = std::get<NorVal>(q1);
    const auto& b = std::get<NorVal>(q2);
    NorVal out{a.amp * b.amp, a.bits + b.bits, a.stack};
    out.stack.insert(out.stack.end(), b.stack.begin(), b.stack.end());
    return out;
  }
  EnVal a = to_en(q1);
  EnVal b = to_en(q2);
  EnVal out;
  out.kets.reserve(a.kets.size() * b.kets.size());
  for (const auto& ka : a.kets)
    for (const auto& kb : b.kets) {
      BasisKet k{ka.amp * kb.amp, ka.basis + kb.basis, ka.stack};
      k.stack.insert(k.stack.end(), kb.stack.begin(), kb.stack.end());
      out.kets.push_back(std::move(k));
    }
  return merge_kets(std::move(out));
}

// Split at position n.  Nor and Had cut directly; an EN value splits only
// when every ket shares one constant suffix (the spt factoring).
inline std::pair<QuantumValue, QuantumValue> split_value(const QuantumValue& q,
                                                         int n) {
  const int w = value_width(q);
  if (n < 0 || n > w)
    throw Error(ErrCat::Runtime, "WidthMismatch: split point out of range");
  if (std::holds_alternative<NorVal>(q)) {
    const auto& v = std::get<NorVal>(q);
    return {NorVal{v.amp, v.bits.substr(0, static_cast<std::size_t>(n)), v.stack},
            NorVal{Amp{1.0, 0.0}, v.bits.substr(static_cast<std::size_t>(n)), {}}};
  }
  if (std::holds_alternative<HadVal>(q)) {
    const auto& v = std::get<HadVal>(q);
    return {HadVal{{v.phases.begin(), v.phases.begin() + n}},
            HadVal{{v.phases.begin() + n, v.phases.end()}}};
  }
  const auto& v = std::get<EnVal>(q);
  if (v.kets.empty())
    throw Error(ErrCat::Runtime, "NotSeparable: empty EN value");
  const Bits suffix = v.kets[0].basis.substr(static_cast<std::size_t>(n));
  EnVal left;
  for (const auto& k : v.kets) {
    if (k.basis.substr(static_cast<std::size_t>(n)) != suffix)
      throw Error(ErrCat::Runtime,
                  "NotSeparable: EN kets do not share a constant suffix");
    left.kets.push_back(
        BasisKet{k.amp, k.basis.substr(0, static_cast<std::size_t>(n)), k.stack});
  }
  return {merge_kets(std::move(left)), NorVal{Amp{1.0, 0.0}, suffix, {}}};
}

// Freeze: move the leading n basis bits of every ket onto its stack.
inline EnVal push_frozen(EnVal q, int n) {
  for (auto& k : q.kets) {
    if (static_cast<int>(k.basis.size()) < n)
      throw Error(ErrCat::Runtime, "WidthMismatch: freeze wider than basis");
    k.stack.insert(k.stack.begin(), k.basis.substr(0, static_cast<std::size_t>(n)));
    k.basis.erase(0, static_cast<std::size_t>(n));
  }
  return merge_kets(std::move(q));
}

// Unfreeze: restore each ket's top stack entry as the basis prefix.
inline EnVal pop_frozen(EnVal q) {
  for (auto& k : q.kets) {
    if (k.stack.empty())
      throw Error(ErrCat::Runtime, "EmptyStack: nothing to unfreeze");
    k.basis = k.stack.front() + k.basis;
    k.stack.erase(k.stack.begin());
  }
  return merge_kets(std::move(q));
}

// q[kappa,b] / q[kappa,!b]: partition kets by a predicate over the leading
// prefix_width basis bits.
inline std::pair<EnVal, EnVal> partition_kets(
    const EnVal& q, int prefix_width,
    const std::function<bool(const Bits&)>& pred) {
  EnVal yes, no;
  for (const auto& k : q.kets) {
    if (static_cast<int>(k.basis.size()) < prefix_width)
      throw Error(ErrCat::Runtime, "WidthMismatch: partition prefix too wide");
    (pred(k.basis.substr(0, static_cast<std::size_t>(prefix_width))) ? yes : no)
        .kets.push_back(k);
  }
  return {std::move(yes), std::move(no)};
}

inline double norm_sq(const EnVal& q) {
  double s = 0.0;
  for (const auto& k : q.kets) s += std::norm(k.amp);
  return s;
}

inline bool en_equal(const EnVal& a, const EnVal& b, double tol = kAmpTol) {
  if (a.kets.size() != b.kets.size()) return false;
  for (std::size_t i = 0; i < a.kets.size(); ++i) {
    if (!a.kets[i].same_slot(b.kets[i])) return false;
    if (!amp_eq(a.kets[i].amp, b.kets[i].amp, tol)) return false;
  }
  return true;
}

}  // namespace qafny
