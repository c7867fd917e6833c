#pragma once

// Linearized surface-tension dynamics on the sphere.  The real surface pair
// (zeta, phi) -- height perturbation and velocity potential trace -- obeys
//
//   d/dt zeta_{nm} =  n  phi_{nm},
//   d/dt phi_{nm}  = -(n-1)(n+2) zeta_{nm},
//
// which the weighted complexification
//
//   u_{nm} = w_zeta(n) zeta_{nm} + i w_phi(n) phi_{nm},
//   w_zeta = sqrt((n-1)(n+2)),  w_phi = sqrt(n)
//
// diagonalizes into u_{nm}(t) = e^{-i lambda(n) t} u_{nm}(0).  Degrees 0 and 1
// carry no oscillation (volume and translation modes); their weights are
// pinned to keep the map invertible where the dynamics is trivial.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <droplet/dispersion.hpp>
#include <droplet/parallel.hpp>
#include <droplet/sphere.hpp>

namespace droplet::evolution {

using sphere::Complex;
using sphere::SphericalField;

inline double zeta_weight(ModeIndex n) {
  return n <= 1 ? 1.0 : std::sqrt((n - 1.0) * (n + 2.0));
}
inline double phi_weight(ModeIndex n) { return n == 0 ? 0.0 : std::sqrt(static_cast<double>(n)); }

// Real surface data: height perturbation and potential trace, as coefficient
// fields with the Hermitian symmetry c_{n,-m} = (-1)^m conj(c_{n,m}).
struct SurfaceState {
  SphericalField zeta;
  SphericalField phi;
};

// u = w_zeta zeta + i w_phi phi, mode by mode.
inline SphericalField assemble(const SurfaceState& s) {
  if (s.zeta.n_max != s.phi.n_max)
    throw std::invalid_argument("assemble: zeta and phi band limits differ");
  SphericalField u(s.zeta.n_max);
  for (ModeIndex n = 0; n <= u.n_max; ++n) {
    const double wz = zeta_weight(n), wp = phi_weight(n);
    for (int m = -static_cast<int>(n); m <= static_cast<int>(n); ++m) {
      const std::size_t k = sphere::coeff_index(n, m);
      u.coeff[k] = wz * s.zeta.coeff[k] + Complex(0.0, 1.0) * (wp * s.phi.coeff[k]);
    }
  }
  return u;
}

// Inverse of assemble for states coming from real surface data.  The pair
// (u_{nm}, u_{n,-m}) separates the two real fields through the Hermitian
// symmetry; degree 0 carries no phi content, so its imaginary part must
// vanish (up to `tol` relative) for the state to be decomposable.
inline SurfaceState decompose(const SphericalField& u, double tol = 1e-12) {
  SurfaceState s{SphericalField(u.n_max), SphericalField(u.n_max)};
  const Complex u00 = u.coeff[sphere::coeff_index(0, 0)];
  if (std::fabs(u00.imag()) > tol * (1.0 + std::abs(u00)))
    throw std::domain_error("decompose: degree-0 mode has phi content (imaginary part)");
  s.zeta.coeff[sphere::coeff_index(0, 0)] = u00.real();
  for (ModeIndex n = 1; n <= u.n_max; ++n) {
    const double wz = zeta_weight(n), wp = phi_weight(n);
    for (int m = -static_cast<int>(n); m <= static_cast<int>(n); ++m) {
      const Complex a = u.coeff[sphere::coeff_index(n, m)];
      const Complex b = u.coeff[sphere::coeff_index(n, -m)];
      const double sign = (m % 2 == 0) ? 1.0 : -1.0;
      const Complex mirror = sign * std::conj(b);
      s.zeta.coeff[sphere::coeff_index(n, m)] = (a + mirror) / (2.0 * wz);
      s.phi.coeff[sphere::coeff_index(n, m)] = (a - mirror) / (Complex(0.0, 2.0) * wp);
    }
  }
  return s;
}

// e^{-i lambda t}, coefficient-wise; degrees 0 and 1 are untouched exactly.
// On those degrees the linearized system is a Jordan block (translation modes
// drift as zeta_1m(t) = zeta_1m + t phi_1m), so freezing them is exact only
// on the physical constraint set phi_0 = phi_1m = 0 -- the configurations
// with conserved volume and vanishing linear momentum.  evolve_ode integrates
// the drift faithfully; the momentum diagnostic reports any mismatch.
inline SphericalField evolve(const SphericalField& u0, double t) {
  SphericalField u(u0.n_max);
  for (ModeIndex n = 0; n <= u0.n_max; ++n) {
    const Complex phase =
        n <= 1 ? Complex(1.0, 0.0) : std::polar(1.0, -dispersion::lambda(n) * t);
    for (int m = -static_cast<int>(n); m <= static_cast<int>(n); ++m) {
      const std::size_t k = sphere::coeff_index(n, m);
      u.coeff[k] = u0.coeff[k] * phase;
    }
  }
  return u;
}

// Quadratic energy of the oscillating block (degrees >= 2):
//   E = 1/2 sum (n-1)(n+2)|zeta|^2 + n|phi|^2 = 1/2 || P_{>=2} u ||^2.
inline double energy2(const SurfaceState& s) {
  if (s.zeta.n_max != s.phi.n_max)
    throw std::invalid_argument("energy2: zeta and phi band limits differ");
  double acc = 0.0;
  for (ModeIndex n = 2; n <= s.zeta.n_max; ++n) {
    const double kz = (n - 1.0) * (n + 2.0), kp = n;
    for (int m = -static_cast<int>(n); m <= static_cast<int>(n); ++m) {
      const std::size_t k = sphere::coeff_index(n, m);
      acc += kz * std::norm(s.zeta.coeff[k]) + kp * std::norm(s.phi.coeff[k]);
    }
  }
  return 0.5 * acc;
}

inline double energy2(const SphericalField& u) {
  double acc = 0.0;
  for (ModeIndex n = 2; n <= u.n_max; ++n)
    for (int m = -static_cast<int>(n); m <= static_cast<int>(n); ++m)
      acc += std::norm(u.coeff[sphere::coeff_index(n, m)]);
  return 0.5 * acc;
}

// Classical RK4 on the mode-wise first-order system, all modes in lockstep.
// Exists to measure the spectral flow against a blind time stepper: it must
// converge at fourth order to the same trajectory.
inline SurfaceState evolve_ode(const SurfaceState& s0, double t_final, unsigned steps) {
  if (steps == 0) throw std::invalid_argument("evolve_ode: need at least one step");
  if (s0.zeta.n_max != s0.phi.n_max)
    throw std::invalid_argument("evolve_ode: zeta and phi band limits differ");
  SurfaceState s = s0;
  const double h = t_final / static_cast<double>(steps);
  const ModeIndex n_max = s0.zeta.n_max;
  for (unsigned step = 0; step < steps; ++step) {
    for (ModeIndex n = 0; n <= n_max; ++n) {
      const double dn = dispersion::multiplier(dispersion::MultiplierKind::DirichletNeumann, n);
      const double cv =
          dispersion::multiplier(dispersion::MultiplierKind::CurvatureLinearization, n);
      for (int m = -static_cast<int>(n); m <= static_cast<int>(n); ++m) {
        const std::size_t k = sphere::coeff_index(n, m);
        const Complex z0 = s.zeta.coeff[k], p0 = s.phi.coeff[k];
        auto fz = [&](Complex /*z*/, Complex p) { return dn * p; };
        auto fp = [&](Complex z, Complex /*p*/) { return cv * z; };
        const Complex k1z = fz(z0, p0), k1p = fp(z0, p0);
        const Complex k2z = fz(z0 + 0.5 * h * k1z, p0 + 0.5 * h * k1p);
        const Complex k2p = fp(z0 + 0.5 * h * k1z, p0 + 0.5 * h * k1p);
        const Complex k3z = fz(z0 + 0.5 * h * k2z, p0 + 0.5 * h * k2p);
        const Complex k3p = fp(z0 + 0.5 * h * k2z, p0 + 0.5 * h * k2p);
        const Complex k4z = fz(z0 + h * k3z, p0 + h * k3p);
        const Complex k4p = fp(z0 + h * k3z, p0 + h * k3p);
        s.zeta.coeff[k] = z0 + (h / 6.0) * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
        s.phi.coeff[k] = p0 + (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
      }
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Trajectory diagnostics
// ---------------------------------------------------------------------------

struct SeriesPoint {
  double t = 0.0;
  double L2 = 0.0;       // coefficient norm of u(t)
  double energy = 0.0;   // energy2 of the oscillating block
  double L4 = 0.0;       // spatial L^4 norm of u(t)
};

struct EvolveSeries {
  std::vector<SeriesPoint> points;
  double volume_drift = 0.0;    // max |u_00(t) - u_00(0)|
  double momentum_drift = 0.0;  // max over degree-1 coefficients
};

// Sample the flow at `samples` equispaced times covering [0, t_final].
inline EvolveSeries evolve_series(const SphericalField& u0, double t_final,
                                  std::size_t samples) {
  if (samples < 2) throw std::invalid_argument("evolve_series: need at least two samples");
  const auto tables = sphere::HarmonicTables::build(u0.n_max, 4 * u0.n_max);
  EvolveSeries out;
  out.points.reserve(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    const double t =
        t_final * static_cast<double>(i) / static_cast<double>(samples - 1);
    const auto u = evolve(u0, t);
    SeriesPoint p;
    p.t = t;
    p.L2 = sphere::norm_L2(u);
    p.energy = energy2(u);
    p.L4 = sphere::norm_Lq_values(sphere::synthesize(u, tables), tables.grid, 4);
    out.points.push_back(p);
    out.volume_drift =
        std::fmax(out.volume_drift,
                  std::abs(u.coeff[sphere::coeff_index(0, 0)] -
                           u0.coeff[sphere::coeff_index(0, 0)]));
    if (u0.n_max >= 1)
      for (int m = -1; m <= 1; ++m)
        out.momentum_drift =
            std::fmax(out.momentum_drift,
                      std::abs(u.coeff[sphere::coeff_index(1, m)] -
                               u0.coeff[sphere::coeff_index(1, m)]));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Space-time L^4 experiments
// ---------------------------------------------------------------------------

enum class DataFamily { Random, Zonal, HighestWeight, Band };

inline const char* family_name(DataFamily f) {
  switch (f) {
    case DataFamily::Random: return "random";
    case DataFamily::Zonal: return "zonal";
    case DataFamily::HighestWeight: return "highest-weight";
    case DataFamily::Band: return "band";
  }
  throw std::invalid_argument("family_name: unknown family");
}

// Initial data used by the space-time norm experiments.  Random families
// populate only oscillating degrees (n >= 2); the band family keeps the top
// octave [n_max/2, n_max].
inline SphericalField make_family(DataFamily family, ModeIndex n_max, std::uint64_t seed) {
  if (n_max < 2) throw std::invalid_argument("make_family: n_max >= 2 required");
  switch (family) {
    case DataFamily::Random: return sphere::random_field(n_max, seed, 2);
    case DataFamily::Zonal: return sphere::zonal(n_max);
    case DataFamily::HighestWeight: return sphere::highest_weight(n_max);
    case DataFamily::Band:
      return sphere::random_field(n_max, seed, std::max<ModeIndex>(2, n_max / 2));
  }
  throw std::invalid_argument("make_family: unknown family");
}

// Fastest oscillation present determines the time sampling: at least 32
// samples per period of lambda(n_max).
inline unsigned default_time_samples(ModeIndex n_max, double t_final) {
  const double periods = t_final * dispersion::lambda(n_max) / (2.0 * std::numbers::pi);
  const double want = 32.0 * std::ceil(std::fmax(1.0, periods));
  return static_cast<unsigned>(want);
}

// (integral_0^T ||e^{-it Lambda} f||_{L^4}^4 dt)^{1/4} by the midpoint rule
// in time and exact spatial quadrature.  Midpoint keeps single-mode data
// exact: the integrand is t-independent there.
inline double spacetime_L4(const SphericalField& f, double t_final, unsigned time_samples,
                           unsigned threads = 0) {
  if (time_samples == 0) throw std::invalid_argument("spacetime_L4: need time samples");
  if (t_final <= 0.0) throw std::invalid_argument("spacetime_L4: t_final must be positive");
  const auto tables = sphere::HarmonicTables::build(f.n_max, 4 * f.n_max);
  const double dt = t_final / static_cast<double>(time_samples);
  std::vector<double> partial(
      std::max<std::size_t>(1, detail::resolve_threads(threads)), 0.0);
  detail::run_chunks(time_samples, detail::resolve_threads(threads),
                     [&](std::size_t chunk, std::size_t lo, std::size_t hi) {
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      const double t = (static_cast<double>(i) + 0.5) * dt;
      const double l4 =
          sphere::norm_Lq_values(sphere::synthesize(evolve(f, t), tables), tables.grid, 4);
      acc += l4 * l4 * l4 * l4;
    }
    partial[chunk] += acc;
  });
  double total = 0.0;
  for (double p : partial) total += p;
  return std::pow(total * dt, 0.25);
}

struct StrichartzReport {
  DataFamily family = DataFamily::Random;
  ModeIndex n_max = 0;
  double t_final = 0.0;
  double sobolev_index = 0.0;
  std::uint64_t seed = 0;
  unsigned time_samples = 0;
  double spacetime_norm = 0.0;  // L^4_t L^4_x over [0, t_final]
  double data_norm = 0.0;       // H^s of the initial data
  double ratio = 0.0;
};

inline StrichartzReport strichartz_report(DataFamily family, ModeIndex n_max, double t_final,
                                          double sobolev_index, std::uint64_t seed = 1,
                                          unsigned time_samples = 0, unsigned threads = 0) {
  StrichartzReport r;
  r.family = family;
  r.n_max = n_max;
  r.t_final = t_final;
  r.sobolev_index = sobolev_index;
  r.seed = seed;
  r.time_samples = time_samples ? time_samples : default_time_samples(n_max, t_final);
  const auto f = make_family(family, n_max, seed);
  r.spacetime_norm = spacetime_L4(f, t_final, r.time_samples, threads);
  r.data_norm = sphere::norm_sobolev(f, sobolev_index);
  r.ratio = r.spacetime_norm / r.data_norm;
  return r;
}

}  // namespace droplet::evolution
