#pragma once

// Exact integer/rational helpers shared by the resonance and elliptic-curve
// searches.  Everything here is decision-grade: no floating point is allowed
// to influence a yes/no answer.  Arbitrary precision is provided by
// Boost.Multiprecision (cpp_int / cpp_rational), which keeps the whole
// library header-only.

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace droplet::arith {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

// floor(sqrt(v)) for v >= 0.  Boost's integer sqrt already computes the
// floor; we only add the domain guard.
inline BigInt isqrt(const BigInt& v) {
  if (v < 0) throw std::domain_error("isqrt: negative argument");
  return boost::multiprecision::sqrt(v);
}

// Square root if v is a perfect square, nullopt otherwise (negatives are
// never squares).
inline std::optional<BigInt> is_perfect_square(const BigInt& v) {
  if (v < 0) return std::nullopt;
  BigInt r = boost::multiprecision::sqrt(v);
  if (r * r == v) return r;
  return std::nullopt;
}

struct PrimePower {
  std::uint64_t prime = 0;
  unsigned exponent = 0;
  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

// Sorted by prime; product of prime^exponent recovers the factored value.
using Factorization = std::vector<PrimePower>;

// Plain trial division.  The searches only ever factor values near the mode
// cutoff (~1e4..1e6), so nothing cleverer is warranted.
inline Factorization factor(std::uint64_t v) {
  if (v == 0) throw std::invalid_argument("factor: zero has no factorization");
  Factorization out;
  auto strip = [&](std::uint64_t p) {
    if (v % p != 0) return;
    unsigned e = 0;
    while (v % p == 0) {
      v /= p;
      ++e;
    }
    out.push_back({p, e});
  };
  strip(2);
  for (std::uint64_t d = 3; d * d <= v; d += 2) strip(d);
  if (v > 1) out.push_back({v, 1});
  return out;
}

// Merge two factorizations (multiply the underlying values).  Inputs and
// output are sorted by prime.
inline Factorization merge_factors(const Factorization& a, const Factorization& b) {
  Factorization out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].prime < b[j].prime)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].prime < a[i].prime) {
      out.push_back(b[j++]);
    } else {
      out.push_back({a[i].prime, a[i].exponent + b[j].exponent});
      ++i;
      ++j;
    }
  }
  return out;
}

struct SquarefreeSplit {
  std::uint64_t squarefree = 1;  // s: product of primes with odd exponent
  std::uint64_t root = 1;        // m: v = s * m^2
  friend bool operator==(const SquarefreeSplit&, const SquarefreeSplit&) = default;
};

// v = s * m^2 with s squarefree; unique, and the workhorse behind the
// resonance bucket search and the exact radical forms d*sqrt(k).
inline SquarefreeSplit squarefree_split(const Factorization& f) {
  SquarefreeSplit out;
  for (const auto& [p, e] : f) {
    if (e & 1u) out.squarefree *= p;
    for (unsigned k = 0; k < e / 2; ++k) out.root *= p;
  }
  return out;
}

// Exact comparison of sqrt(F1) + sqrt(F2) against a rational r.
//
// Squaring chain: with S = sqrt(F1)+sqrt(F2) >= 0,
//   S <=> r  is decided by  S^2 <=> r^2 once r >= 0, and
//   S^2 - r^2 = (F1 + F2 - r^2) + 2*sqrt(F1*F2),
// so with D = r^2 - F1 - F2:  D < 0  =>  S > r;  otherwise compare
// D^2 <=> 4*F1*F2 (both sides now rational).  Negative r compares below the
// nonnegative sum, never an error.
inline std::strong_ordering cmp_sqrt_sum(const BigInt& F1, const BigInt& F2, const BigRat& r) {
  if (F1 < 0 || F2 < 0) throw std::domain_error("cmp_sqrt_sum: negative radicand");
  if (r < 0) return std::strong_ordering::greater;
  const BigInt p = boost::multiprecision::numerator(r);
  const BigInt q = boost::multiprecision::denominator(r);
  const BigInt q2 = q * q;
  // D scaled by q^2 to stay integral.
  const BigInt D = p * p - (F1 + F2) * q2;
  if (D < 0) return std::strong_ordering::greater;
  const BigInt lhs = 4 * F1 * F2 * q2 * q2;
  const BigInt rhs = D * D;
  if (lhs > rhs) return std::strong_ordering::greater;
  if (lhs < rhs) return std::strong_ordering::less;
  return std::strong_ordering::equal;
}

}  // namespace droplet::arith
