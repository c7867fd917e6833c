#pragma once

// Linear wave dispersion on the unit sphere with unit surface tension.
// Spherical-harmonic mode n oscillates at angular frequency
//   lambda(n) = sqrt(F(n)),   F(n) = n(n-1)(n+2),
// the composition of the Dirichlet-Neumann multiplier n with the curvature
// linearization -(n-1)(n+2).  Degrees 0 and 1 are flat: F(0) = F(1) = 0
// (volume mode and translation modes carry no restoring force).

#include <cstdint>
#include <cmath>
#include <stdexcept>

namespace droplet {

// Spherical-harmonic degree.  Plain integer; oscillatory operations guard
// n >= 2 themselves.
using ModeIndex = std::uint32_t;

namespace dispersion {

// Largest degree for which n(n-1)(n+2) still fits comfortably in int64.
inline constexpr ModeIndex max_exact_degree = 2'000'000;

// F(n) = n(n-1)(n+2), exact.
inline std::int64_t F(ModeIndex n) {
  if (n > max_exact_degree) throw std::domain_error("F: degree too large for exact int64");
  const std::int64_t k = n;
  return k * (k - 1) * (k + 2);
}

// lambda(n) = sqrt(F(n)): the mode frequency.
inline double lambda(ModeIndex n) { return std::sqrt(static_cast<double>(F(n))); }

// The Fourier multipliers that assemble the linearized system.
enum class MultiplierKind {
  DirichletNeumann,        // exterior-normalized DN operator: n
  CurvatureLinearization,  // linearized mean curvature: -(n-1)(n+2)
  Lambda,                  // sqrt(n(n-1)(n+2))
  Laplacian,               // surface Laplacian: -n(n+1)
};

inline double multiplier(MultiplierKind kind, ModeIndex n) {
  const double nd = n;
  switch (kind) {
    case MultiplierKind::DirichletNeumann:
      return nd;
    case MultiplierKind::CurvatureLinearization:
      return -(nd - 1.0) * (nd + 2.0);
    case MultiplierKind::Lambda:
      return lambda(n);
    case MultiplierKind::Laplacian:
      return -nd * (nd + 1.0);
  }
  throw std::invalid_argument("multiplier: unknown kind");
}

}  // namespace dispersion
}  // namespace droplet
