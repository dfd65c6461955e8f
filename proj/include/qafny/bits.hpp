#pragma once

#include <complex>
#include <cstdint>
#include <string>

#include "qafny/diag.hpp"

namespace qafny {

using Amp = std::complex<double>;

// Equality tolerance for amplitudes throughout the toolchain.
inline constexpr double kAmpTol = 1e-9;
// Kets below this magnitude are dropped by merge_kets.
inline constexpr double kZeroTol = 1e-12;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// A basis bitstring: '0'/'1' characters, position 0 = least significant bit.
using Bits = std::string;

inline std::uint64_t bits_value(const Bits& b) {
  std::uint64_t v = 0;
  for (std::size_t k = 0; k < b.size(); ++k)
    if (b[k] == '1') v |= std::uint64_t{1} << k;
  return v;
}

inline Bits bits_of(std::uint64_t v, std::size_t width) {
  Bits b(width, '0');
  for (std::size_t k = 0; k < width; ++k)
    if (v >> k & 1) b[k] = '1';
  return b;
}

inline bool valid_bits(const Bits& b) {
  for (char c : b)
    if (c != '0' && c != '1') return false;
  return true;
}

// alpha(r) = e^{2*pi*i*r}; phases are kept as turns so dyadic rotations stay
// exact in doubles.
inline Amp alpha(double turns) {
  return std::polar(1.0, 2.0 * kPi * turns);
}

// Normalize a turn count into [0, 1).
inline double wrap_turn(double r) {
  r -= std::floor(r);
  if (r >= 1.0) r = 0.0;  // guard against floor rounding at the boundary
  return r;
}

// Compare two turn counts modulo 1.
inline bool turn_eq(double a, double b, double tol = kAmpTol) {
  double d = wrap_turn(a - b);
  return d <= tol || 1.0 - d <= tol;
}

inline bool amp_eq(const Amp& a, const Amp& b, double tol = kAmpTol) {
  return std::abs(a - b) <= tol;
}

}  // namespace qafny
