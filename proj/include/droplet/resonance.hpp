#pragma once

// Three-wave interactions of the capillary dispersion relation.
//
// A triple (n1, n2, n3) of oscillatory degrees is resonant when
//   lambda(n3) = lambda(n1) + lambda(n2),
// equivalently (squaring once, all quantities integers)
//   F3 - F1 - F2 >= 0   and   (F3 - F1 - F2)^2 = 4 F1 F2.
// Every yes/no decision in this header is made in exact integer or rational
// arithmetic; floating point only ever seeds a search or reports a value.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <tuple>
#include <unordered_map>
#include <vector>

#include <droplet/arith.hpp>
#include <droplet/dispersion.hpp>
#include <droplet/fit.hpp>
#include <droplet/parallel.hpp>

namespace droplet::resonance {

using arith::BigInt;
using arith::BigRat;

// ---------------------------------------------------------------------------
// Squarefree certificates

// F(n) = squarefree * root^2, the exact radical form of lambda(n).
struct SquarefreeForm {
  ModeIndex n = 0;
  std::uint64_t squarefree = 1;
  std::uint64_t root = 1;
  friend bool operator==(const SquarefreeForm&, const SquarefreeForm&) = default;
};

inline SquarefreeForm squarefree_form(ModeIndex n) {
  if (n < 2) throw std::domain_error("squarefree_form: oscillatory modes require n >= 2");
  // Factor the three small cofactors instead of the ~n^3 product.
  auto f = arith::merge_factors(arith::factor(n),
                                arith::merge_factors(arith::factor(n - 1), arith::factor(n + 2)));
  const auto split = arith::squarefree_split(f);
  return {n, split.squarefree, split.root};
}

// ---------------------------------------------------------------------------
// Exact resonance predicate

inline bool is_resonant(ModeIndex n1, ModeIndex n2, ModeIndex n3) {
  if (n1 < 2 || n2 < 2 || n3 < 2)
    throw std::domain_error("is_resonant: oscillatory modes require n >= 2");
  const BigInt F1 = dispersion::F(n1);
  const BigInt F2 = dispersion::F(n2);
  const BigInt F3 = dispersion::F(n3);
  // D >= 0 keeps the orientation lambda3 = lambda1 + lambda2 (with D < 0 the
  // squared identity would instead describe |lambda1 - lambda2|).
  const BigInt D = F3 - F1 - F2;
  return D >= 0 && D * D == 4 * F1 * F2;
}

struct ResonanceTriple {
  ModeIndex n1 = 0, n2 = 0, n3 = 0;  // canonical n1 <= n2
  bool resonant = false;
  double divisor = 0.0;  // lambda(n3) - lambda(n1) - lambda(n2) when not resonant
  friend bool operator==(const ResonanceTriple&, const ResonanceTriple&) = default;
};

// Enumerate all resonant triples with every index <= n_max.
//
// Completeness: write F(n) = s(n) * m(n)^2 with s squarefree.  If
// sqrt(s1) m1 + sqrt(s2) m2 = sqrt(s3) m3, squaring gives
//   s1 m1^2 + s2 m2^2 + 2 m1 m2 sqrt(s1 s2) = s3 m3^2,
// so sqrt(s1 s2) is rational, hence s1 s2 is a perfect square, hence s1 = s2
// (both squarefree).  Then (m1 + m2) sqrt(s1) = m3 sqrt(s3) forces s3 = s1 by
// uniqueness of the squarefree decomposition and finally m3 = m1 + m2.
// Resonant triples therefore never cross squarefree buckets, and scanning
// each bucket for additive root pairs is an exhaustive search.
inline std::vector<ResonanceTriple> enumerate_resonances(ModeIndex n_max, unsigned threads = 0) {
  if (n_max < 2) throw std::domain_error("enumerate_resonances: n_max >= 2 required");
  std::map<std::uint64_t, std::vector<SquarefreeForm>> buckets;
  for (ModeIndex n = 2; n <= n_max; ++n) {
    const auto sf = squarefree_form(n);
    buckets[sf.squarefree].push_back(sf);  // roots ascend with n inside a bucket
  }
  std::vector<const std::vector<SquarefreeForm>*> work;
  work.reserve(buckets.size());
  for (const auto& [s, forms] : buckets)
    if (forms.size() >= 2) work.push_back(&forms);

  std::vector<std::vector<ResonanceTriple>> found(work.size());
  detail::run_chunks(work.size(), detail::resolve_threads(threads),
                     [&](std::size_t, std::size_t b, std::size_t e) {
                       for (std::size_t k = b; k < e; ++k) {
                         const auto& forms = *work[k];
                         std::unordered_map<std::uint64_t, ModeIndex> by_root;
                         by_root.reserve(forms.size());
                         for (const auto& f : forms) by_root.emplace(f.root, f.n);
                         for (std::size_t i = 0; i < forms.size(); ++i) {
                           for (std::size_t j = i; j < forms.size(); ++j) {
                             const auto it = by_root.find(forms[i].root + forms[j].root);
                             if (it == by_root.end()) continue;
                             // Belt and braces: re-verify through the exact predicate.
                             if (!is_resonant(forms[i].n, forms[j].n, it->second)) continue;
                             found[k].push_back({forms[i].n, forms[j].n, it->second, true, 0.0});
                           }
                         }
                       }
                     });
  std::vector<ResonanceTriple> out;
  for (auto& part : found) out.insert(out.end(), part.begin(), part.end());
  std::sort(out.begin(), out.end(), [](const ResonanceTriple& a, const ResonanceTriple& b) {
    return std::tie(a.n1, a.n2, a.n3) < std::tie(b.n1, b.n2, b.n3);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Small divisors

// Sign pattern of the combination lambda(n3) + s1*lambda(n1) + s2*lambda(n2).
enum class SignPattern { MinusMinus, MinusPlus, PlusMinus, PlusPlus };

namespace detail_rs {

inline std::pair<int, int> signs_of(SignPattern p) {
  switch (p) {
    case SignPattern::MinusMinus: return {-1, -1};
    case SignPattern::MinusPlus: return {-1, +1};
    case SignPattern::PlusMinus: return {+1, -1};
    case SignPattern::PlusPlus: return {+1, +1};
  }
  throw std::invalid_argument("unknown sign pattern");
}

}  // namespace detail_rs

// Does lambda(n3) + s1*lambda(n1) + s2*lambda(n2) vanish exactly?
inline bool pattern_resonant(ModeIndex n1, ModeIndex n2, ModeIndex n3, SignPattern p) {
  switch (p) {
    case SignPattern::MinusMinus: return is_resonant(n1, n2, n3);
    case SignPattern::MinusPlus: return is_resonant(n2, n3, n1);   // lambda1 = lambda2 + lambda3
    case SignPattern::PlusMinus: return is_resonant(n1, n3, n2);   // lambda2 = lambda1 + lambda3
    case SignPattern::PlusPlus: return false;                      // sum of positives
  }
  throw std::invalid_argument("unknown sign pattern");
}

// High-precision evaluation of lambda(n3) + s1*lambda(n1) + s2*lambda(n2).
//
// Each radical is bracketed by a scaled integer square root:
//   u = floor(2^k sqrt(F))  =>  u <= 2^k sqrt(F) < u + 1,
// (integer sqrt is itself a dyadic bisection, so the bracket is exact), and
// the signed sum of brackets pins the combination to a window of width
// 3 * 2^-k.  With k = 96 that is ~4e-29, far below the 1e-18 target, so the
// returned midpoint is correct to well beyond double precision.
inline double divisor_enclosure(ModeIndex n1, ModeIndex n2, ModeIndex n3, SignPattern p) {
  constexpr int k = 96;
  const auto [s1, s2] = detail_rs::signs_of(p);
  auto scaled = [](ModeIndex n) {
    BigInt F = dispersion::F(n);
    return arith::isqrt(F << (2 * k));
  };
  const BigInt u1 = scaled(n1), u2 = scaled(n2), u3 = scaled(n3);
  BigInt lo = u3, hi = u3 + 1;
  auto add_signed = [&](const BigInt& u, int s) {
    if (s > 0) {
      lo += u;
      hi += u + 1;
    } else {
      lo -= u + 1;
      hi -= u;
    }
  };
  add_signed(u1, s1);
  add_signed(u2, s2);
  return std::ldexp(static_cast<double>(lo + hi), -(k + 1));
}

struct DivisorValue {
  bool exact_zero = false;  // the combination vanishes identically
  double value = 0.0;       // refined beyond float when |value| < 1e-6
};

inline DivisorValue small_divisor(ModeIndex n1, ModeIndex n2, ModeIndex n3, SignPattern p) {
  if (n1 < 2 || n2 < 2 || n3 < 2)
    throw std::domain_error("small_divisor: oscillatory modes require n >= 2");
  if (pattern_resonant(n1, n2, n3, p)) return {true, 0.0};
  const auto [s1, s2] = detail_rs::signs_of(p);
  double v = dispersion::lambda(n3) + s1 * dispersion::lambda(n1) + s2 * dispersion::lambda(n2);
  // Below 1e-6 the float cancellation error matters; switch to the exact
  // enclosure (which can never return zero here: the triple is non-resonant).
  if (std::fabs(v) < 1e-6) v = divisor_enclosure(n1, n2, n3, p);
  return {false, v};
}

struct DivisorScan {
  double min_weighted = 0.0;  // min |lambda3-lambda1-lambda2| * max(n)^{9/2}
  ModeIndex n1 = 0, n2 = 0, n3 = 0;
  std::uint64_t triples_scanned = 0;
};

// Scan all non-resonant (-,-) triples with indices <= n_max, n1 <= n2
// canonical, and report the minimal weighted divisor.  The 9/2 weight is the
// scan's sharpness exponent: a strictly positive minimum certifies the
// divisor bound |lambda3 - lambda1 - lambda2| >= c * max(n)^{-9/2} on the
// scanned box.  Deterministic across thread counts (per-triple values do not
// depend on the partition; ties break lexicographically).
inline DivisorScan small_divisor_scan(ModeIndex n_max, unsigned threads = 0) {
  if (n_max < 2) throw std::domain_error("small_divisor_scan: n_max >= 2 required");
  std::vector<double> lam(n_max + 1, 0.0), weight(n_max + 1, 0.0);
  for (ModeIndex n = 0; n <= n_max; ++n) {
    lam[n] = dispersion::lambda(n);
    weight[n] = std::pow(static_cast<double>(n), 4.5);
  }
  struct Best {
    double value = std::numeric_limits<double>::infinity();
    ModeIndex n1 = 0, n2 = 0, n3 = 0;
    std::uint64_t count = 0;
  };
  const std::size_t span = (n_max >= 2) ? (n_max - 1) : 0;  // n1 = 2 .. n_max
  const unsigned nthreads = detail::resolve_threads(threads);
  std::vector<Best> part(std::min<std::size_t>(std::max<std::size_t>(nthreads, 1), span ? span : 1));
  detail::run_chunks(span, nthreads, [&](std::size_t chunk, std::size_t b, std::size_t e) {
    Best best;
    for (std::size_t i = b; i < e; ++i) {
      const ModeIndex n1 = static_cast<ModeIndex>(2 + i);
      for (ModeIndex n2 = n1; n2 <= n_max; ++n2) {
        const double l12 = lam[n1] + lam[n2];
        for (ModeIndex n3 = 2; n3 <= n_max; ++n3) {
          double d = lam[n3] - l12;
          if (std::fabs(d) < 1e-6) {
            if (is_resonant(n1, n2, n3)) continue;  // exact zero: not scanned
            d = divisor_enclosure(n1, n2, n3, SignPattern::MinusMinus);
          }
          ++best.count;
          const double w = std::fabs(d) * weight[std::max(n2, n3)];
          if (w < best.value ||
              (w == best.value && std::tie(n1, n2, n3) < std::tie(best.n1, best.n2, best.n3))) {
            best.value = w;
            best.n1 = n1;
            best.n2 = n2;
            best.n3 = n3;
          }
        }
      }
    }
    part[chunk] = best;
  });
  Best overall;
  for (const auto& b : part) {
    overall.count += b.count;
    if (b.value < overall.value ||
        (b.value == overall.value && std::tie(b.n1, b.n2, b.n3) < std::tie(overall.n1, overall.n2, overall.n3))) {
      overall.value = b.value;
      overall.n1 = b.n1;
      overall.n2 = b.n2;
      overall.n3 = b.n3;
    }
  }
  return {overall.value, overall.n1, overall.n2, overall.n3, overall.count};
}

// ---------------------------------------------------------------------------
// Normal-form coefficients

// Which lambda carries the conjugation in the quadratic normal form's second
// coefficient.  SecondConjugated is the verbatim convention
// i/[lambda3 - lambda1 + lambda2]; FirstConjugated flips to
// i/[lambda3 + lambda1 - lambda2] for sensitivity checks.
enum class PhaseConvention { SecondConjugated, FirstConjugated };

struct NormalFormCoefficient {
  unsigned kind = 1;  // 1: both unconjugated, 2: one conjugation, 3: both conjugated
  ModeIndex n1 = 0, n2 = 0, n3 = 0;
  bool zero = false;  // resonant denominator, or a flat mode in the triple
  double beta = 0.0;  // coefficient equals i * beta when zero is false
};

inline NormalFormCoefficient normal_form_coeff(unsigned kind, ModeIndex n1, ModeIndex n2,
                                               ModeIndex n3,
                                               PhaseConvention conv = PhaseConvention::SecondConjugated) {
  if (kind < 1 || kind > 3) throw std::invalid_argument("normal_form_coeff: kind must be 1, 2 or 3");
  NormalFormCoefficient out{kind, n1, n2, n3, false, 0.0};
  if (std::min({n1, n2, n3}) <= 1) {
    out.zero = true;  // flat modes are projected out of the normal form
    return out;
  }
  SignPattern p = SignPattern::PlusPlus;
  if (kind == 1) p = SignPattern::MinusMinus;
  if (kind == 2)
    p = (conv == PhaseConvention::SecondConjugated) ? SignPattern::MinusPlus : SignPattern::PlusMinus;
  const auto d = small_divisor(n1, n2, n3, p);
  if (d.exact_zero) {
    out.zero = true;
    return out;
  }
  out.beta = 1.0 / d.value;
  return out;
}

// ---------------------------------------------------------------------------
// Pair counting near a target frequency sum

namespace detail_rs {

// Largest n with lambda(n) <= r (exactly), or 1 if none; r > 0.
inline ModeIndex max_mode_below(const BigRat& r) {
  ModeIndex lo = 1, hi = 2;
  // grow until lambda(hi) > r
  while (arith::cmp_sqrt_sum(dispersion::F(hi), 0, r) != std::strong_ordering::greater) {
    lo = hi;
    if (hi > (1u << 19)) throw std::domain_error("pair counting: target out of desk-scale range");
    hi *= 2;
  }
  while (lo + 1 < hi) {
    const ModeIndex mid = lo + (hi - lo) / 2;
    if (arith::cmp_sqrt_sum(dispersion::F(mid), 0, r) != std::strong_ordering::greater)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

}  // namespace detail_rs

// Exact cardinality of
//   { (n1, n2) : n_i >= 2, [ratio window: 1/2 <= n2/n1 <= 2,]
//                |lambda(n1) + lambda(n2) - A| <= 1/2 }
// counted over ordered pairs.  All boundary decisions go through the
// rational comparator; floating point never participates.
inline std::uint64_t count_pairs(const BigRat& A, bool ratio_window = true) {
  if (A <= 0) throw std::domain_error("count_pairs: A must be positive");
  const BigRat hi_target = A + BigRat(1, 2);
  const BigRat lo_target = A - BigRat(1, 2);
  const ModeIndex n_cap = detail_rs::max_mode_below(hi_target);
  if (n_cap < 2) return 0;
  std::uint64_t count = 0;
  for (ModeIndex n1 = 2; n1 <= n_cap; ++n1) {
    const BigInt F1 = dispersion::F(n1);
    // this n1 admits any n2 only if lambda(n1) <= A + 1/2 - lambda(2) ... the
    // binary searches below handle emptiness on their own.
    auto sum_cmp = [&](ModeIndex n2, const BigRat& r) {
      return arith::cmp_sqrt_sum(F1, dispersion::F(n2), r);
    };
    // hi = largest n2 in [2, n_cap] with lambda1 + lambda2 <= A + 1/2
    if (sum_cmp(2, hi_target) == std::strong_ordering::greater) continue;
    ModeIndex lo = 2, hi = n_cap;
    while (lo < hi) {
      const ModeIndex mid = lo + (hi - lo + 1) / 2;
      if (sum_cmp(mid, hi_target) != std::strong_ordering::greater)
        lo = mid;
      else
        hi = mid - 1;
    }
    const ModeIndex n2_hi = lo;
    // lo = smallest n2 in [2, n2_hi] with lambda1 + lambda2 >= A - 1/2
    if (sum_cmp(n2_hi, lo_target) == std::strong_ordering::less) continue;
    lo = 2;
    hi = n2_hi;
    while (lo < hi) {
      const ModeIndex mid = lo + (hi - lo) / 2;
      if (sum_cmp(mid, lo_target) == std::strong_ordering::less)
        lo = mid + 1;
      else
        hi = mid;
    }
    ModeIndex n2_lo = lo;
    ModeIndex a = n2_lo, b = n2_hi;
    if (ratio_window) {
      a = std::max<ModeIndex>(a, (n1 + 1) / 2);  // n2 >= n1/2
      if (2ull * n1 < b) b = static_cast<ModeIndex>(2ull * n1);
    }
    if (a <= b) count += (b - a + 1);
  }
  return count;
}

struct RhoPoint {
  BigRat A;
  std::uint64_t max_count = 0;  // window count maximized over A' in [A, 2A]
  BigRat best_Aprime;           // first half-integer step attaining the max
};

struct RhoEstimate {
  std::vector<RhoPoint> points;
  double slope = 0.0;      // log max_count vs log A
  double intercept = 0.0;
  bool ratio_window = true;
};

namespace detail_rs {

// One grid point of the counting experiment: max over A' = A + j/2,
// 0 <= j <= floor(2A), of the exact window count at A'.
//
// Every pair is routed by a comparator-certified floor t = floor(2s - 2A),
// where s = lambda(n1) + lambda(n2): the float value only proposes t, the
// two rational comparisons certify it (adjusting in the rare off-by-one
// case).  A pair then lands in windows j in [t, t+1] (plus t-1 when 2s - 2A
// is exactly integral, which the comparator also certifies).  Pairs outside
// [A - 1/2 - eps, 2A + 1/2 + eps] are discarded by a guard band that exceeds
// the double-evaluation error bound by three orders of magnitude, so no
// in-window pair can be lost.
inline RhoPoint max_window_count(const BigRat& A, bool ratio_window) {
  const BigInt two_a_num = boost::multiprecision::numerator(A) * 2;
  const BigInt a_den = boost::multiprecision::denominator(A);
  const std::uint64_t j_max = static_cast<std::uint64_t>(two_a_num / a_den);  // floor(2A)
  std::vector<std::uint64_t> counts(j_max + 1, 0);
  const BigRat hi_target = 2 * A + BigRat(1, 2);
  const double A_d = static_cast<double>(A);
  const ModeIndex n_cap = max_mode_below(hi_target);
  if (n_cap >= 2) {
    std::vector<double> lam(n_cap + 1, 0.0);
    for (ModeIndex n = 0; n <= n_cap; ++n) lam[n] = dispersion::lambda(n);
    const BigRat twoA = 2 * A;
    for (ModeIndex n1 = 2; n1 <= n_cap; ++n1) {
      ModeIndex b2 = n_cap, a2 = 2;
      if (ratio_window) {
        a2 = std::max<ModeIndex>(2, (n1 + 1) / 2);
        if (2ull * n1 < b2) b2 = static_cast<ModeIndex>(2ull * n1);
      }
      const BigInt F1x4 = 4 * dispersion::F(n1);
      for (ModeIndex n2 = a2; n2 <= b2; ++n2) {
        const double s = lam[n1] + lam[n2];
        if (s < A_d - 0.5 - 1e-6) continue;   // certainly below every window
        if (s > 2 * A_d + 0.5 + 1e-6) break;  // lambda(n2) ascends: done with n1
        // certify t = floor(2s - 2A)
        const BigInt F2x4 = 4 * dispersion::F(n2);
        long long t = static_cast<long long>(std::floor(2 * s - 2 * A_d));
        // want  2A + t <= 2s  and  2s < 2A + t + 1
        while (arith::cmp_sqrt_sum(F1x4, F2x4, twoA + t) == std::strong_ordering::less) --t;
        while (arith::cmp_sqrt_sum(F1x4, F2x4, twoA + t + 1) != std::strong_ordering::less) ++t;
        const bool on_boundary =
            arith::cmp_sqrt_sum(F1x4, F2x4, twoA + t) == std::strong_ordering::equal;
        const long long j_lo = on_boundary ? t - 1 : t;
        const long long j_hi = t + 1;
        for (long long j = std::max<long long>(j_lo, 0);
             j <= std::min<long long>(j_hi, static_cast<long long>(j_max)); ++j)
          ++counts[static_cast<std::size_t>(j)];
      }
    }
  }
  RhoPoint out{A, 0, A};
  for (std::uint64_t j = 0; j <= j_max; ++j) {
    if (counts[j] > out.max_count) {
      out.max_count = counts[j];
      out.best_Aprime = A + BigRat(j, 2);
    }
  }
  return out;
}

}  // namespace detail_rs

// Empirical growth exponent of the maximized window count along a grid of
// target frequencies.  The grid must be strictly increasing with at least
// ten points; the regression uses the points with nonzero counts.
inline RhoEstimate estimate_rho(const std::vector<BigRat>& grid, bool ratio_window = true,
                                unsigned threads = 0) {
  if (grid.size() < 10) throw std::invalid_argument("estimate_rho: need at least 10 grid points");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] <= 0) throw std::invalid_argument("estimate_rho: grid must be positive");
    if (i > 0 && grid[i] <= grid[i - 1])
      throw std::invalid_argument("estimate_rho: grid must be strictly increasing");
  }
  RhoEstimate out;
  out.ratio_window = ratio_window;
  out.points.resize(grid.size());
  detail::run_chunks(grid.size(), detail::resolve_threads(threads),
                     [&](std::size_t, std::size_t b, std::size_t e) {
                       for (std::size_t i = b; i < e; ++i)
                         out.points[i] = detail_rs::max_window_count(grid[i], ratio_window);
                     });
  std::vector<double> xs, ys;
  for (const auto& p : out.points) {
    if (p.max_count == 0) continue;
    xs.push_back(static_cast<double>(p.A));
    ys.push_back(static_cast<double>(p.max_count));
  }
  if (xs.size() < 2) throw std::domain_error("estimate_rho: too few nonzero counts to fit");
  const auto fit = loglog_fit(xs, ys);
  out.slope = fit.slope;
  out.intercept = fit.intercept;
  return out;
}

// ---------------------------------------------------------------------------
// Integer kernel solutions a j^2 = b F(n)

struct KernelSolution {
  std::uint64_t a = 1, b = 1;
  std::uint64_t j = 1;
  ModeIndex n = 2;
  friend bool operator==(const KernelSolution&, const KernelSolution&) = default;
};

// All (j, n) with a j^2 = b n(n-1)(n+2), 2 <= n <= n_max, for coprime
// weights a, b (the frequency parameter is omega0^2 = a/b).
inline std::vector<KernelSolution> kernel_solutions(std::uint64_t a, std::uint64_t b,
                                                    ModeIndex n_max) {
  if (a == 0 || b == 0) throw std::domain_error("kernel_solutions: weights must be positive");
  if (std::gcd(a, b) != 1) throw std::invalid_argument("kernel_solutions: a, b must be coprime");
  std::vector<KernelSolution> out;
  for (ModeIndex n = 2; n <= n_max; ++n) {
    const BigInt t = BigInt(b) * dispersion::F(n);
    if (t % a != 0) continue;
    const auto j = arith::is_perfect_square(t / a);
    if (!j) continue;
    out.push_back({a, b, j->convert_to<std::uint64_t>(), n});
  }
  return out;
}

}  // namespace droplet::resonance
