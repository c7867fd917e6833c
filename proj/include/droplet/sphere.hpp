#pragma once

// Scalar fields on the unit sphere in the orthonormal spherical-harmonic
// basis.  A field of maximal degree N is the coefficient vector c_{n,m},
// 0 <= n <= N, |m| <= n, of
//
//   u(theta, phi) = sum c_{n,m} Y_n^m(theta, phi),
//
// where Y_n^m is fully normalized with respect to the surface measure
// (integral of Y_n^m conj(Y_n'^m') over the sphere is delta delta) and the
// negative orders follow Y_n^{-m} = (-1)^m conj(Y_n^m).  Synthesis/analysis
// run on product grids: Gauss-Legendre nodes in cos(theta) and equispaced
// longitudes, exact for spherical polynomials up to a stated degree, so the
// L^q norms of band-limited fields (q even) come out as exact quadratures.

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include <droplet/dispersion.hpp>

namespace droplet::sphere {

using Complex = std::complex<double>;

inline constexpr std::size_t coeff_count(ModeIndex n_max) {
  return (static_cast<std::size_t>(n_max) + 1) * (n_max + 1);
}

// Position of c_{n,m} in the degree-major, m-ascending layout.
inline constexpr std::size_t coeff_index(ModeIndex n, int m) {
  return static_cast<std::size_t>(n) * n + static_cast<std::size_t>(static_cast<int>(n) + m);
}

struct SphericalField {
  ModeIndex n_max = 0;
  std::vector<Complex> coeff;  // (n_max + 1)^2 entries

  SphericalField() : coeff(1) {}
  explicit SphericalField(ModeIndex nmax) : n_max(nmax), coeff(coeff_count(nmax)) {}

  Complex& at(ModeIndex n, int m) {
    check(n, m);
    return coeff[coeff_index(n, m)];
  }
  Complex at(ModeIndex n, int m) const {
    check(n, m);
    return coeff[coeff_index(n, m)];
  }

 private:
  void check(ModeIndex n, int m) const {
    if (n > n_max || m < -static_cast<int>(n) || m > static_cast<int>(n))
      throw std::out_of_range("SphericalField: coefficient index out of range");
  }
};

// Single unit coefficient at (n, 0).
inline SphericalField zonal(ModeIndex n, Complex amplitude = 1.0) {
  SphericalField f(n);
  f.coeff[coeff_index(n, 0)] = amplitude;
  return f;
}

// Single unit coefficient at (n, n).
inline SphericalField highest_weight(ModeIndex n, Complex amplitude = 1.0) {
  SphericalField f(n);
  f.coeff[coeff_index(n, static_cast<int>(n))] = amplitude;
  return f;
}

// Independent standard complex Gaussians on every (n, m) with n_lo <= n.
inline SphericalField random_field(ModeIndex n_max, std::uint64_t seed, ModeIndex n_lo = 0) {
  SphericalField f(n_max);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (ModeIndex n = n_lo; n <= n_max; ++n)
    for (int m = -static_cast<int>(n); m <= static_cast<int>(n); ++m)
      f.coeff[coeff_index(n, m)] = Complex(gauss(rng), gauss(rng));
  return f;
}

// ---------------------------------------------------------------------------
// Normalized associated Legendre values
// ---------------------------------------------------------------------------

inline constexpr std::size_t tri_index(ModeIndex n, ModeIndex m) {
  return static_cast<std::size_t>(n) * (n + 1) / 2 + m;
}

// Fills out[tri_index(n, m)] with the normalized value p_n^m(x) for all
// 0 <= m <= n <= n_max, where Y_n^m = p_n^|m| e^{im phi} for m >= 0.  The
// Condon-Shortley sign is folded into the diagonal step, and the recurrence
// stays normalized throughout, so no over/underflow occurs before the final
// sin^m(theta) decay does it honestly.
inline void normalized_legendre_table(ModeIndex n_max, double x, std::vector<double>& out) {
  const std::size_t count = tri_index(n_max, n_max) + 1;
  out.resize(count);
  const double s = std::sqrt(std::fmax(0.0, 1.0 - x * x));  // sin(theta)
  out[0] = 1.0 / std::sqrt(4.0 * std::numbers::pi);
  for (ModeIndex m = 1; m <= n_max; ++m)
    out[tri_index(m, m)] =
        -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * out[tri_index(m - 1, m - 1)];
  for (ModeIndex m = 0; m + 1 <= n_max; ++m)
    out[tri_index(m + 1, m)] = std::sqrt(2.0 * m + 3.0) * x * out[tri_index(m, m)];
  for (ModeIndex m = 0; m <= n_max; ++m) {
    for (ModeIndex n = m + 2; n <= n_max; ++n) {
      const double nn = n, mm = m;
      const double a = std::sqrt((4.0 * nn * nn - 1.0) / (nn * nn - mm * mm));
      const double b = std::sqrt(((nn - 1.0) * (nn - 1.0) - mm * mm) /
                                 (4.0 * (nn - 1.0) * (nn - 1.0) - 1.0));
      out[tri_index(n, m)] =
          a * (x * out[tri_index(n - 1, m)] - b * out[tri_index(n - 2, m)]);
    }
  }
}

// Single fixed-m column p_n^m(x) for n = m..n_max (cheap path for norms of an
// individual harmonic: O(n_max) instead of the full triangle).
inline std::vector<double> normalized_legendre_m(ModeIndex m, ModeIndex n_max, double x) {
  if (m > n_max) throw std::invalid_argument("normalized_legendre_m: m > n_max");
  std::vector<double> col(n_max - m + 1);
  const double s = std::sqrt(std::fmax(0.0, 1.0 - x * x));
  double diag = 1.0 / std::sqrt(4.0 * std::numbers::pi);
  for (ModeIndex k = 1; k <= m; ++k) diag *= -std::sqrt((2.0 * k + 1.0) / (2.0 * k)) * s;
  col[0] = diag;
  if (m + 1 <= n_max) col[1] = std::sqrt(2.0 * m + 3.0) * x * diag;
  for (ModeIndex n = m + 2; n <= n_max; ++n) {
    const double nn = n, mm = m;
    const double a = std::sqrt((4.0 * nn * nn - 1.0) / (nn * nn - mm * mm));
    const double b = std::sqrt(((nn - 1.0) * (nn - 1.0) - mm * mm) /
                               (4.0 * (nn - 1.0) * (nn - 1.0) - 1.0));
    col[n - m] = a * (x * col[n - m - 1] - b * col[n - m - 2]);
  }
  return col;
}

// ---------------------------------------------------------------------------
// Quadrature grids
// ---------------------------------------------------------------------------

struct SphereGrid {
  unsigned degree = 0;          // spherical polynomials up to this degree integrate exactly
  std::vector<double> x;        // Gauss-Legendre nodes (ascending) = cos(theta)
  std::vector<double> weight;   // matching weights, sum 2
  std::size_t longitudes = 1;   // equispaced phi_j = 2 pi j / longitudes

  double phi(std::size_t j) const {
    return 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(longitudes);
  }

  // L Gauss-Legendre nodes handle cos(theta)-degree 2L-1; M longitudes kill
  // every Fourier mode 0 < |m| < M.  L = degree/2 + 2 and M = degree + 1
  // leave slack on the polar rule and exactly enough azimuthal resolution.
  static SphereGrid for_degree(unsigned degree) {
    SphereGrid g;
    g.degree = degree;
    const std::size_t L = degree / 2 + 2;
    g.longitudes = degree + 1;
    g.x.resize(L);
    g.weight.resize(L);
    for (std::size_t i = 0; i < (L + 1) / 2; ++i) {
      // Newton on P_L from the Chebyshev-like initial guess.
      double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                          (static_cast<double>(L) + 0.5));
      double pp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = 0.0;
        for (std::size_t k = 0; k < L; ++k) {
          const double p2 = p1;
          p1 = p0;
          p0 = ((2.0 * k + 1.0) * z * p1 - k * p2) / (k + 1.0);
        }
        pp = static_cast<double>(L) * (z * p0 - p1) / (z * z - 1.0);
        const double dz = p0 / pp;
        z -= dz;
        if (std::fabs(dz) < 1e-15) break;
      }
      g.x[i] = -z;
      g.x[L - 1 - i] = z;
      const double w = 2.0 / ((1.0 - z * z) * pp * pp);
      g.weight[i] = w;
      g.weight[L - 1 - i] = w;
    }
    return g;
  }
};

// Grid plus per-node Legendre triangles for a fixed coefficient degree; build
// once, reuse across synthesis/analysis calls (the tables dominate the cost).
struct HarmonicTables {
  SphereGrid grid;
  ModeIndex n_max = 0;
  std::vector<std::vector<double>> legendre;  // one packed triangle per node

  static HarmonicTables build(ModeIndex n_max, unsigned grid_degree) {
    HarmonicTables t;
    t.grid = SphereGrid::for_degree(grid_degree);
    t.n_max = n_max;
    t.legendre.resize(t.grid.x.size());
    for (std::size_t l = 0; l < t.grid.x.size(); ++l)
      normalized_legendre_table(n_max, t.grid.x[l], t.legendre[l]);
    return t;
  }
};

namespace detail_sp {

// Per-node Fourier profile h_m(l), m = -n_max..n_max, such that
// u(theta_l, phi) = sum_m h_m(l) e^{im phi}.  Negative orders pick up the
// (-1)^m from the conjugation identity (the Legendre factor is |m|-indexed).
inline void fourier_profile(const SphericalField& f, const std::vector<double>& tri,
                            std::vector<Complex>& h) {
  const int K = static_cast<int>(f.n_max);
  h.assign(2 * K + 1, Complex(0.0, 0.0));
  for (ModeIndex n = 0; n <= f.n_max; ++n) {
    for (int m = -static_cast<int>(n); m <= static_cast<int>(n); ++m) {
      const Complex c = f.coeff[coeff_index(n, m)];
      if (c == Complex(0.0, 0.0)) continue;
      const ModeIndex am = static_cast<ModeIndex>(m < 0 ? -m : m);
      const double sign = (m < 0 && (am & 1u)) ? -1.0 : 1.0;
      h[static_cast<std::size_t>(m + K)] += c * (sign * tri[tri_index(n, am)]);
    }
  }
}

}  // namespace detail_sp

// Values u(theta_l, phi_j), row-major over nodes then longitudes.
inline std::vector<Complex> synthesize(const SphericalField& f, const HarmonicTables& t) {
  if (f.n_max > t.n_max) throw std::invalid_argument("synthesize: tables too small for field");
  const std::size_t L = t.grid.x.size(), M = t.grid.longitudes;
  const int K = static_cast<int>(f.n_max);
  std::vector<Complex> values(L * M);
  std::vector<Complex> h;
  for (std::size_t l = 0; l < L; ++l) {
    detail_sp::fourier_profile(f, t.legendre[l], h);
    for (std::size_t j = 0; j < M; ++j) {
      const Complex z = std::polar(1.0, t.grid.phi(j));
      // Horner in z over m = -K..K:  z^{-K} * sum_k h[k] z^k.
      Complex acc = h[2 * static_cast<std::size_t>(K)];
      for (int k = 2 * K - 1; k >= 0; --k) acc = acc * z + h[static_cast<std::size_t>(k)];
      values[l * M + j] = acc * std::polar(1.0, -static_cast<double>(K) * t.grid.phi(j));
    }
  }
  return values;
}

// Coefficients of band-limited values sampled on the grid.  Exact when the
// values come from a field of degree d with d + n_max <= grid degree.
inline SphericalField analyze(const std::vector<Complex>& values, const HarmonicTables& t,
                              ModeIndex n_max) {
  if (n_max > t.n_max) throw std::invalid_argument("analyze: tables too small for target degree");
  const std::size_t L = t.grid.x.size(), M = t.grid.longitudes;
  if (values.size() != L * M) throw std::invalid_argument("analyze: value grid size mismatch");
  if (t.grid.degree < 2 * n_max)
    throw std::invalid_argument("analyze: grid degree below 2 * n_max");
  const int K = static_cast<int>(n_max);
  SphericalField f(n_max);
  std::vector<Complex> g(2 * static_cast<std::size_t>(K) + 1);
  const double dphi = 2.0 * std::numbers::pi / static_cast<double>(M);
  for (std::size_t l = 0; l < L; ++l) {
    // g_m = (2 pi / M) sum_j values e^{-im phi_j}  (exact Fourier coefficient
    // times 2 pi for band-limited rows).
    for (int m = -K; m <= K; ++m) {
      Complex acc(0.0, 0.0);
      const Complex z = std::polar(1.0, -static_cast<double>(m) * dphi);
      Complex rot(1.0, 0.0);
      for (std::size_t j = 0; j < M; ++j) {
        acc += values[l * M + j] * rot;
        rot *= z;
      }
      g[static_cast<std::size_t>(m + K)] = acc * dphi;
    }
    const auto& tri = t.legendre[l];
    const double wl = t.grid.weight[l];
    for (ModeIndex n = 0; n <= n_max; ++n) {
      for (int m = -static_cast<int>(n); m <= static_cast<int>(n); ++m) {
        const ModeIndex am = static_cast<ModeIndex>(m < 0 ? -m : m);
        const double sign = (m < 0 && (am & 1u)) ? -1.0 : 1.0;
        f.coeff[coeff_index(n, m)] +=
            wl * sign * tri[tri_index(n, am)] * g[static_cast<std::size_t>(m + K)];
      }
    }
  }
  return f;
}

// ---------------------------------------------------------------------------
// Norms
// ---------------------------------------------------------------------------

// l^2 of the coefficients = L^2 of the field (Parseval).
inline double norm_L2(const SphericalField& f) {
  double s = 0.0;
  for (const auto& c : f.coeff) s += std::norm(c);
  return std::sqrt(s);
}

// Sobolev norm with weight (1 + n(n+1))^s per degree.
inline double norm_sobolev(const SphericalField& f, double s) {
  double acc = 0.0;
  for (ModeIndex n = 0; n <= f.n_max; ++n) {
    const double w = std::pow(1.0 + static_cast<double>(n) * (n + 1.0), s);
    for (int m = -static_cast<int>(n); m <= static_cast<int>(n); ++m)
      acc += w * std::norm(f.coeff[coeff_index(n, m)]);
  }
  return std::sqrt(acc);
}

// L^q quadrature over grid samples (q even >= 2).  Exact whenever the grid
// degree covers q times the band limit of the sampled field.
inline double norm_Lq_values(const std::vector<Complex>& values, const SphereGrid& grid,
                             unsigned q) {
  if (q < 2 || q % 2 != 0)
    throw std::invalid_argument("norm_Lq_values: q must be even and >= 2");
  const std::size_t L = grid.x.size(), M = grid.longitudes;
  if (values.size() != L * M) throw std::invalid_argument("norm_Lq_values: grid size mismatch");
  const double dphi = 2.0 * std::numbers::pi / static_cast<double>(M);
  double acc = 0.0;
  for (std::size_t l = 0; l < L; ++l) {
    double row = 0.0;
    for (std::size_t j = 0; j < M; ++j) {
      const double p = std::norm(values[l * M + j]);
      double term = p;
      for (unsigned e = 4; e <= q; e += 2) term *= p;
      row += term;
    }
    acc += grid.weight[l] * row * dphi;
  }
  return std::pow(acc, 1.0 / static_cast<double>(q));
}

// L^q norm by exact quadrature (q even >= 2): |u|^q is a spherical polynomial
// of degree q * n_max, so the matching grid integrates it without error.
inline double norm_Lq(const SphericalField& f, unsigned q) {
  if (q < 2 || q % 2 != 0) throw std::invalid_argument("norm_Lq: q must be even and >= 2");
  const auto tables = HarmonicTables::build(f.n_max, q * f.n_max);
  return norm_Lq_values(synthesize(f, tables), tables.grid, q);
}

// Sup-norm estimate over a dense theta grid (poles included).  When every
// nonzero coefficient sits on one order m the modulus is longitude-free and
// the scan is effectively exact; otherwise longitudes are scanned densely and
// the result is a tight lower estimate.
inline double norm_sup(const SphericalField& f, std::size_t theta_samples = 4096) {
  if (theta_samples < 2) throw std::invalid_argument("norm_sup: need at least two samples");
  bool single_order = true;
  int order = 0;
  bool seen = false;
  for (ModeIndex n = 0; n <= f.n_max && single_order; ++n)
    for (int m = -static_cast<int>(n); m <= static_cast<int>(n); ++m)
      if (f.coeff[coeff_index(n, m)] != Complex(0.0, 0.0)) {
        if (!seen) {
          order = m;
          seen = true;
        } else if (m != order) {
          single_order = false;
          break;
        }
      }
  const std::size_t phi_samples =
      single_order ? 1 : 8 * (2 * static_cast<std::size_t>(f.n_max) + 1);
  double best = 0.0;
  std::vector<double> tri;
  std::vector<Complex> h;
  for (std::size_t i = 0; i < theta_samples; ++i) {
    const double theta =
        std::numbers::pi * static_cast<double>(i) / static_cast<double>(theta_samples - 1);
    normalized_legendre_table(f.n_max, std::cos(theta), tri);
    detail_sp::fourier_profile(f, tri, h);
    if (single_order) {
      double mag = 0.0;
      for (const auto& v : h) mag = std::fmax(mag, std::abs(v));
      best = std::fmax(best, mag);
    } else {
      const int K = static_cast<int>(f.n_max);
      for (std::size_t j = 0; j < phi_samples; ++j) {
        const double phi =
            2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(phi_samples);
        Complex acc(0.0, 0.0);
        for (int m = -K; m <= K; ++m)
          acc += h[static_cast<std::size_t>(m + K)] * std::polar(1.0, m * phi);
        best = std::fmax(best, std::abs(acc));
      }
    }
  }
  return best;
}

// Exact meridian quadrature for a single harmonic: |Y_n^m| is
// longitude-independent, so the L^q norm reduces to one Gauss-Legendre sum.
inline double harmonic_norm_Lq(ModeIndex n, ModeIndex m, unsigned q) {
  if (m > n) throw std::invalid_argument("harmonic_norm_Lq: m > n");
  if (q < 2 || q % 2 != 0) throw std::invalid_argument("harmonic_norm_Lq: q must be even >= 2");
  const auto grid = SphereGrid::for_degree(q * n);
  double acc = 0.0;
  for (std::size_t l = 0; l < grid.x.size(); ++l) {
    const double p = normalized_legendre_m(m, n, grid.x[l]).back();
    acc += grid.weight[l] * std::pow(p * p, static_cast<double>(q) / 2.0);
  }
  return std::pow(2.0 * std::numbers::pi * acc, 1.0 / static_cast<double>(q));
}

inline double harmonic_norm_sup(ModeIndex n, ModeIndex m, std::size_t theta_samples = 4096) {
  if (m > n) throw std::invalid_argument("harmonic_norm_sup: m > n");
  double best = 0.0;
  for (std::size_t i = 0; i < theta_samples; ++i) {
    const double theta =
        std::numbers::pi * static_cast<double>(i) / static_cast<double>(theta_samples - 1);
    best = std::fmax(best, std::fabs(normalized_legendre_m(m, n, std::cos(theta)).back()));
  }
  return best;
}

// Restriction to a single degree.
inline SphericalField project_degree(const SphericalField& f, ModeIndex n) {
  if (n > f.n_max) throw std::invalid_argument("project_degree: degree beyond field");
  SphericalField out(f.n_max);
  for (int m = -static_cast<int>(n); m <= static_cast<int>(n); ++m)
    out.coeff[coeff_index(n, m)] = f.coeff[coeff_index(n, m)];
  return out;
}

}  // namespace droplet::sphere
