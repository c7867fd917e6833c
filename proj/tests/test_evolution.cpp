// Tests for the linearized flow: weighted complexification, spectral
// propagator, RK4 cross-check, conservation, and space-time norms.

#include <cmath>
#include <complex>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include <droplet/dispersion.hpp>
#include <droplet/evolution.hpp>
#include <droplet/fit.hpp>
#include <droplet/sphere.hpp>

namespace ev = droplet::evolution;
namespace sp = droplet::sphere;
using droplet::ModeIndex;
using sp::Complex;

namespace {

// Random field with the Hermitian symmetry of real surface data:
// c_{n,-m} = (-1)^m conj(c_{n,m}), order-0 coefficients real.
sp::SphericalField random_real_field(ModeIndex n_max, std::uint64_t seed) {
  const auto raw = sp::random_field(n_max, seed);
  sp::SphericalField f(n_max);
  for (ModeIndex n = 0; n <= n_max; ++n) {
    f.at(n, 0) = raw.at(n, 0).real();
    for (int m = 1; m <= static_cast<int>(n); ++m) {
      const Complex c = raw.at(n, m);
      f.at(n, m) = c;
      f.at(n, -m) = ((m % 2 == 0) ? 1.0 : -1.0) * std::conj(c);
    }
  }
  return f;
}

// Physical states: potential carries no volume or momentum content (degrees
// 0 and 1), which is exactly where the diagonal propagator is valid.
ev::SurfaceState random_state(ModeIndex n_max, std::uint64_t seed) {
  ev::SurfaceState s{random_real_field(n_max, seed), random_real_field(n_max, seed + 1)};
  s.phi.at(0, 0) = 0.0;
  for (int m = -1; m <= 1; ++m) s.phi.at(1, m) = 0.0;
  return s;
}

double max_coeff_delta(const sp::SphericalField& a, const sp::SphericalField& b) {
  REQUIRE(a.coeff.size() == b.coeff.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.coeff.size(); ++i)
    worst = std::fmax(worst, std::abs(a.coeff[i] - b.coeff[i]));
  return worst;
}

}  // namespace

TEST_CASE("complexification weights") {
  CHECK(ev::zeta_weight(0) == 1.0);
  CHECK(ev::zeta_weight(1) == 1.0);
  CHECK(ev::zeta_weight(2) == Catch::Approx(2.0));
  CHECK(ev::zeta_weight(5) == Catch::Approx(std::sqrt(28.0)));
  CHECK(ev::phi_weight(0) == 0.0);
  CHECK(ev::phi_weight(1) == 1.0);
  CHECK(ev::phi_weight(4) == Catch::Approx(2.0));
  // Product of the weights is the frequency on oscillating degrees.
  for (ModeIndex n = 2; n <= 40; ++n)
    CHECK(ev::zeta_weight(n) * ev::phi_weight(n) ==
          Catch::Approx(droplet::dispersion::lambda(n)).epsilon(1e-14));
}

TEST_CASE("decompose inverts assemble on real surface data") {
  const auto s = random_state(7, 2026);
  const auto u = ev::assemble(s);
  const auto back = ev::decompose(u);
  CHECK(max_coeff_delta(s.zeta, back.zeta) < 1e-12);
  CHECK(max_coeff_delta(s.phi, back.phi) < 1e-12);

  // And assemble inverts decompose.
  const auto u2 = ev::assemble(back);
  CHECK(max_coeff_delta(u, u2) < 1e-12);
}

TEST_CASE("decompose rejects degree-0 phi content") {
  sp::SphericalField u(3);
  u.at(0, 0) = Complex(0.5, 0.1);
  CHECK_THROWS_AS(ev::decompose(u), std::domain_error);
  u.at(0, 0) = Complex(0.5, 0.0);
  CHECK_NOTHROW(ev::decompose(u));
}

TEST_CASE("pure degree-2 height bump carries energy 2") {
  ev::SurfaceState s{sp::zonal(2), sp::SphericalField(2)};
  CHECK(ev::energy2(s) == Catch::Approx(2.0).epsilon(1e-14));
  const auto u = ev::assemble(s);
  // w_zeta(2) = 2, so u is twice the unit zonal mode.
  CHECK(std::abs(u.at(2, 0) - Complex(2.0, 0.0)) < 1e-15);
  CHECK(ev::energy2(u) == Catch::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("surface energy equals half the squared complexified norm") {
  const auto s = random_state(9, 5);
  const auto u = ev::assemble(s);
  CHECK(ev::energy2(s) == Catch::Approx(ev::energy2(u)).epsilon(1e-12));
}

TEST_CASE("the propagator conserves L2 and energy out to t = 100") {
  const auto u0 = ev::assemble(random_state(64, 11));
  const double l0 = sp::norm_L2(u0), e0 = ev::energy2(u0);
  for (double t : {0.1, 1.0, 10.0, 100.0}) {
    const auto u = ev::evolve(u0, t);
    INFO("t = " << t);
    CHECK(std::fabs(sp::norm_L2(u) - l0) < 1e-12 * l0);
    CHECK(std::fabs(ev::energy2(u) - e0) < 1e-12 * e0);
    // Volume and translation modes are held exactly.
    CHECK(u.at(0, 0) == u0.at(0, 0));
    for (int m = -1; m <= 1; ++m) CHECK(u.at(1, m) == u0.at(1, m));
  }
}

TEST_CASE("group law at order-one times") {
  auto u0 = ev::assemble(random_state(32, 3));
  const double scale = sp::norm_L2(u0);
  for (auto& c : u0.coeff) c /= scale;  // unit-energy state
  for (auto [s, t] : std::vector<std::pair<double, double>>{{0.3, 0.7}, {1.1, 0.4}}) {
    const auto two_step = ev::evolve(ev::evolve(u0, s), t);
    const auto one_step = ev::evolve(u0, s + t);
    CHECK(max_coeff_delta(two_step, one_step) < 1e-12);
  }
  // Backward evolution restores the initial data.
  const auto back = ev::evolve(ev::evolve(u0, 2.5), -2.5);
  CHECK(max_coeff_delta(back, u0) < 1e-12);
}

TEST_CASE("single modes rotate at their dispersion frequency") {
  const Complex c(2.0, 3.0);
  auto u0 = sp::zonal(5, c);
  const double t = 0.77;
  const auto u = ev::evolve(u0, t);
  const Complex expected = c * std::polar(1.0, -droplet::dispersion::lambda(5) * t);
  CHECK(std::abs(u.at(5, 0) - expected) < 1e-13);
}

TEST_CASE("RK4 converges at fourth order to the closed-form mode solution") {
  const ModeIndex n = 4;
  const double lam = droplet::dispersion::lambda(n);
  const Complex z0(0.8, -0.3), p0(-0.2, 0.5);
  const double T = 1.0;

  ev::SurfaceState s0{sp::SphericalField(n), sp::SphericalField(n)};
  s0.zeta.at(n, 1) = z0;
  s0.phi.at(n, 1) = p0;

  // zeta'' = -lambda^2 zeta with zeta' = n phi:
  const Complex z_exact = z0 * std::cos(lam * T) + (n / lam) * p0 * std::sin(lam * T);
  const Complex p_exact =
      p0 * std::cos(lam * T) - ((n - 1.0) * (n + 2.0) / lam) * z0 * std::sin(lam * T);

  std::vector<double> steps, errors;
  for (unsigned k : {25u, 50u, 100u, 200u}) {
    const auto s = ev::evolve_ode(s0, T, k);
    const double err = std::abs(s.zeta.at(n, 1) - z_exact) + std::abs(s.phi.at(n, 1) - p_exact);
    steps.push_back(k);
    errors.push_back(err);
  }
  const double slope = droplet::loglog_fit(steps, errors).slope;
  CHECK(slope == Catch::Approx(-4.0).margin(0.2));

  // With a fine grid the trajectory lands on the spectral one.
  const auto fine = ev::evolve_ode(s0, T, 4000);
  CHECK(std::abs(fine.zeta.at(n, 1) - z_exact) < 1e-10);
}

TEST_CASE("RK4 tracks the spectral propagator for a full random state") {
  const auto s0 = random_state(8, 17);
  const double T = 0.5;
  const auto spectral = ev::evolve(ev::assemble(s0), T);
  const auto stepped = ev::assemble(ev::evolve_ode(s0, T, 2000));
  CHECK(max_coeff_delta(spectral, stepped) < 1e-8);
}

TEST_CASE("trajectory series reports conserved quantities") {
  const auto u0 = ev::assemble(random_state(12, 23));
  const auto series = ev::evolve_series(u0, 5.0, 11);
  REQUIRE(series.points.size() == 11);
  CHECK(series.points.front().t == 0.0);
  CHECK(series.points.back().t == Catch::Approx(5.0));
  const double l0 = series.points.front().L2, e0 = series.points.front().energy;
  for (const auto& p : series.points) {
    CHECK(std::fabs(p.L2 - l0) < 1e-12 * l0);
    CHECK(std::fabs(p.energy - e0) < 1e-12 * e0);
    CHECK(p.L4 > 0.0);
  }
  CHECK(series.volume_drift == 0.0);
  CHECK(series.momentum_drift == 0.0);
  CHECK(series.points.front().L4 == Catch::Approx(sp::norm_Lq(u0, 4)).epsilon(1e-12));
}

TEST_CASE("time sampling density follows the fastest period") {
  // lambda(8) = sqrt(560) ~ 23.66, so T = 1 spans ceil(3.77) = 4 periods.
  CHECK(ev::default_time_samples(8, 1.0) == 128);
  CHECK(ev::default_time_samples(8, 0.01) == 32);  // never fewer than one period's worth
}

TEST_CASE("single-mode space-time norm obeys the quarter-power identity") {
  const double T = 2.0;
  for (ModeIndex n : {4u, 6u}) {
    const auto f = sp::zonal(n);
    const double lhs = ev::spacetime_L4(f, T, 64, 1);
    const double rhs = std::pow(T, 0.25) * sp::harmonic_norm_Lq(n, 0, 4);
    INFO("n = " << n);
    CHECK(lhs == Catch::Approx(rhs).epsilon(1e-9));
  }
  // Full report wiring: ratio divides by the Sobolev norm of the data.
  const auto rep = ev::strichartz_report(ev::DataFamily::Zonal, 6, T, 0.25, 1, 64, 1);
  const double h_s = std::pow(1.0 + 42.0, 0.125);  // (1 + n(n+1))^{s/2}
  CHECK(rep.ratio ==
        Catch::Approx(std::pow(T, 0.25) * sp::harmonic_norm_Lq(6, 0, 4) / h_s).epsilon(1e-9));
}

TEST_CASE("space-time norm is stable under halving the time grid") {
  const auto rep = ev::strichartz_report(ev::DataFamily::Random, 12, 0.5, 0.25, 7, 0, 1);
  REQUIRE(rep.time_samples >= 64);
  const auto half = ev::strichartz_report(ev::DataFamily::Random, 12, 0.5, 0.25, 7,
                                          rep.time_samples / 2, 1);
  CHECK(std::fabs(rep.ratio - half.ratio) / rep.ratio < 0.01);
}

TEST_CASE("experiment families populate the advertised shells") {
  const auto zon = ev::make_family(ev::DataFamily::Zonal, 9, 1);
  CHECK(std::abs(zon.at(9, 0) - Complex(1.0, 0.0)) == 0.0);
  const auto hw = ev::make_family(ev::DataFamily::HighestWeight, 9, 1);
  CHECK(std::abs(hw.at(9, 9) - Complex(1.0, 0.0)) == 0.0);
  const auto rnd = ev::make_family(ev::DataFamily::Random, 9, 1);
  for (ModeIndex n = 0; n <= 1; ++n)
    for (int m = -static_cast<int>(n); m <= static_cast<int>(n); ++m)
      CHECK(rnd.at(n, m) == Complex(0.0, 0.0));
  const auto band = ev::make_family(ev::DataFamily::Band, 9, 1);
  for (ModeIndex n = 0; n < 4; ++n)
    for (int m = -static_cast<int>(n); m <= static_cast<int>(n); ++m)
      CHECK(band.at(n, m) == Complex(0.0, 0.0));
  bool band_has_top = false;
  for (int m = -9; m <= 9; ++m) band_has_top |= band.at(9, m) != Complex(0.0, 0.0);
  CHECK(band_has_top);
  CHECK_THROWS_AS(ev::make_family(ev::DataFamily::Random, 1, 1), std::invalid_argument);
}

TEST_CASE("reports are reproducible for a fixed seed") {
  const auto a = ev::strichartz_report(ev::DataFamily::Band, 10, 0.3, 0.5, 99, 64, 1);
  const auto b = ev::strichartz_report(ev::DataFamily::Band, 10, 0.3, 0.5, 99, 64, 1);
  CHECK(a.ratio == b.ratio);
  CHECK(a.spacetime_norm == b.spacetime_norm);
  const auto c = ev::strichartz_report(ev::DataFamily::Band, 10, 0.3, 0.5, 100, 64, 1);
  CHECK(c.ratio != a.ratio);
}
