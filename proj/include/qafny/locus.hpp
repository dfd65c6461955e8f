#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "qafny/diag.hpp"

namespace qafny {

// Half-open slice x[lo,hi) of the qubit array named var.
struct Range {
  std::string var;
  int lo = 0;
  int hi = 0;

  int width() const { return hi - lo; }
  bool empty() const { return lo >= hi; }

  bool overlaps(const Range& o) const {
    return var == o.var && lo < o.hi && o.lo < hi;
  }

  bool operator==(const Range& o) const {
    return var == o.var && lo == o.lo && hi == o.hi;
  }

  std::string str() const {
    if (width() == 1) return var + "[" + std::to_string(lo) + "]";
    return var + "[" + std::to_string(lo) + "," + std::to_string(hi) + ")";
  }
};

// One qubit position: variable name plus index.
struct Pos {
  std::string var;
  int idx = 0;

  bool operator==(const Pos& o) const { return var == o.var && idx == o.idx; }
  bool operator<(const Pos& o) const {
    return var != o.var ? var < o.var : idx < o.idx;
  }

  std::string str() const { return var + "[" + std::to_string(idx) + "]"; }
};

// An ordered list of disjoint ranges; the key of the quantum heap.  The range
// order is semantic: basis bit k of a value belongs to the k-th position.
struct Locus {
  std::vector<Range> ranges;

  Locus() = default;
  explicit Locus(Range r) { ranges.push_back(r); }
  explicit Locus(std::vector<Range> rs) : ranges(std::move(rs)) {}

  int width() const {
    int w = 0;
    for (const auto& r : ranges) w += r.width();
    return w;
  }

  bool empty() const { return width() == 0; }

  std::vector<Pos> positions() const {
    std::vector<Pos> ps;
    ps.reserve(static_cast<std::size_t>(width()));
    for (const auto& r : ranges)
      for (int i = r.lo; i < r.hi; ++i) ps.push_back({r.var, i});
    return ps;
  }

  bool contains(const Pos& p) const {
    for (const auto& r : ranges)
      if (r.var == p.var && r.lo <= p.idx && p.idx < r.hi) return true;
    return false;
  }

  // Offset of position p within this locus, or -1.
  int position_index(const Pos& p) const {
    int off = 0;
    for (const auto& r : ranges) {
      if (r.var == p.var && r.lo <= p.idx && p.idx < r.hi)
        return off + (p.idx - r.lo);
      off += r.width();
    }
    return -1;
  }

  bool disjoint(const Locus& o) const {
    for (const auto& a : ranges)
      for (const auto& b : o.ranges)
        if (a.overlaps(b)) return false;
    return true;
  }

  bool self_disjoint() const {
    for (std::size_t i = 0; i < ranges.size(); ++i)
      for (std::size_t j = i + 1; j < ranges.size(); ++j)
        if (ranges[i].overlaps(ranges[j])) return false;
    return true;
  }

  bool operator==(const Locus& o) const { return ranges == o.ranges; }

  // Same qubit set, order ignored.
  bool set_equal(const Locus& o) const {
    auto a = positions(), b = o.positions();
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
  }

  std::string str() const {
    if (ranges.empty()) return "{}";
    std::string s;
    for (std::size_t i = 0; i < ranges.size(); ++i) {
      if (i) s += " ++ ";
      s += ranges[i].str();
    }
    return s;
  }
};

// Empty-range elimination plus adjacent-range coalescing
// (x[a,b) ++ x[b,c) -> x[a,c)); runs after every locus rewrite.
inline Locus canon(Locus l) {
  std::vector<Range> out;
  for (const auto& r : l.ranges) {
    if (r.empty()) continue;
    if (!out.empty() && out.back().var == r.var && out.back().hi == r.lo)
      out.back().hi = r.hi;
    else
      out.push_back(r);
  }
  return Locus{std::move(out)};
}

// Rebuild a locus from a position list, coalescing ascending runs.
inline Locus locus_from_positions(const std::vector<Pos>& ps) {
  Locus l;
  for (const auto& p : ps) l.ranges.push_back({p.var, p.idx, p.idx + 1});
  return canon(std::move(l));
}

// Locus concatenation (the ranges must stay pairwise disjoint).
inline Locus concat(const Locus& a, const Locus& b) {
  if (!a.disjoint(b))
    throw Error(ErrCat::Kind, "OverlappingLoci: " + a.str() + " vs " + b.str());
  Locus l = a;
  l.ranges.insert(l.ranges.end(), b.ranges.begin(), b.ranges.end());
  return canon(std::move(l));
}

}  // namespace qafny
