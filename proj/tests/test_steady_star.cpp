#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "radstar/steady_star.hpp"

using namespace radstar;

namespace {

constexpr double kPi = std::numbers::pi;

StarParams half_params() {
  StarParams p;
  p.K = 1.0;
  p.epsilon = 0.5;
  return p;
}

// epsK = 1/2 with S = 2^{-1/2} gives K_bar = 1: rho = sin(r)/r, theta = rho/2.
SteadyProfile reference(std::size_t N = 4096) {
  return build_steady_profile(half_params(), 1.0 / std::sqrt(2.0), 1.0, N);
}

}  // namespace

TEST_CASE("reference profile reproduces the closed-form star") {
  const SteadyProfile prof = reference();
  CHECK(std::abs(prof.R - kPi) <= 1e-10);
  CHECK(prof.mass_tilde == Catch::Approx(kPi).epsilon(1e-10));
  CHECK(prof.total_mass_4pi() == Catch::Approx(4.0 * kPi * kPi).epsilon(1e-10));
  CHECK(prof.rho_c == Catch::Approx(1.0).epsilon(1e-14));
  CHECK(prof.theta_c == Catch::Approx(0.5).epsilon(1e-14));
  for (std::size_t j = 1; j < prof.r_grid.size(); j += 311) {
    const double r = prof.r_grid[j];
    CHECK(std::abs(prof.rho[j] - std::sin(r) / r) <= 1e-10);
    CHECK(std::abs(prof.theta[j] - 0.5 * std::sin(r) / r) <= 1e-10);
  }
  // theta slope at the boundary: d/dr (sin r / (2r)) at pi = -1/(2 pi)
  CHECK(prof.theta_slope_at_R == Catch::Approx(-0.5 / kPi).epsilon(1e-9));
}

TEST_CASE("potential matches the quadrature oracle") {
  const SteadyProfile prof = reference();
  const auto psi = oracles::potential_fine(prof.r_grid, prof.rho);
  double worst = 0.0;
  for (std::size_t j = 0; j < psi.size(); ++j)
    worst = std::max(worst, std::abs(psi[j] - prof.psi[j]));
  CHECK(worst <= 1e-6);  // trapezoid oracle at N = 4096
  // exterior anchoring
  CHECK(prof.psi.back() == Catch::Approx(-prof.mass_tilde / prof.R).epsilon(1e-12));
}

TEST_CASE("entropy is constant along the profile") {
  const SteadyProfile prof = reference();
  for (std::size_t j = 0; j + 1 < prof.r_grid.size(); j += 173) {
    const double S = entropy_from_central(prof.params, prof.rho[j], prof.theta[j]);
    CHECK(S == Catch::Approx(prof.exponents.S).epsilon(1e-12));
  }
}

TEST_CASE("profile interpolation agrees with the closed form between nodes") {
  const SteadyProfile prof = reference(1024);
  for (double r : {0.1234, 1.0, 2.5, 3.0}) {
    CHECK(std::abs(prof.rho_at(r) - std::sin(r) / r) <= 1e-9);
    CHECK(std::abs(prof.theta_at(r) - 0.5 * std::sin(r) / r) <= 1e-9);
  }
  CHECK(prof.rho_at(prof.R + 1.0) == 0.0);
  CHECK_THROWS_AS(prof.rho_at(-0.5), RangeError);
}

TEST_CASE("nonexistence regimes are rejected") {
  StarParams p = half_params();
  p.epsilon = 1.0;
  CHECK_THROWS_AS(build_steady_profile(p, 1.0, 1.0), RegimeError);
  p.epsilon = 0.1;
  CHECK_THROWS_AS(build_steady_profile(p, 1.0, 1.0), RegimeError);
  p.epsilon = 0.5;
  CHECK_THROWS_AS(build_steady_profile(p, 1.0, -1.0), DomainError);
}

TEST_CASE("homology rescale transforms fields and keeps the mass") {
  const SteadyProfile prof = reference();
  for (double s : {0.5, 2.0, 10.0}) {
    const SteadyProfile sc = homology_rescale(prof, s);
    CHECK(sc.R == Catch::Approx(prof.R / s).epsilon(1e-13));
    CHECK(sc.rho_c == Catch::Approx(s * s * s * prof.rho_c).epsilon(1e-13));
    CHECK(sc.theta_c == Catch::Approx(s * prof.theta_c).epsilon(1e-13));
    CHECK(sc.mass_tilde == Catch::Approx(prof.mass_tilde).epsilon(1e-10));
    // entropy transforms as s^{1-4 epsK} = s^{-1} here
    CHECK(sc.exponents.S ==
          Catch::Approx(prof.exponents.S / s).epsilon(1e-13));
    // the rescaled profile is itself consistent: entropy constant matches
    const double S_mid =
        entropy_from_central(sc.params, sc.rho[100], sc.theta[100]);
    CHECK(S_mid == Catch::Approx(sc.exponents.S).epsilon(1e-10));
  }
}

TEST_CASE("critical mass law and the pinned M_1") {
  // oracle: integral of u^3 r^2 for the coefficient-4 normalization is
  // 8 * 2.018235951526 (scaling from K_bar = 1), pinned from the fine-step run
  const double m1_expect = 4.0 * kPi * 8.0 * 2.018235951526;
  CHECK(critical_mass(1.0) == Catch::Approx(m1_expect).epsilon(1e-8));
  for (double kt : {0.25, 1.0, 4.0, 9.0})
    CHECK(critical_mass(kt) ==
          Catch::Approx(std::pow(kt, 1.5) * critical_mass(1.0)).epsilon(1e-12));
  CHECK(critical_mass(4.0) / critical_mass(1.0) == Catch::Approx(8.0).epsilon(1e-12));
  CHECK_THROWS_AS(critical_mass(0.0), DomainError);
}

TEST_CASE("mass at the critical index is independent of the central value") {
  StarParams p;
  p.K = 1.0;
  p.epsilon = 0.25;
  const double ref = build_steady_profile(p, 1.0, 1.0).mass_tilde;
  for (double u0 : {0.5, 2.0})
    CHECK(build_steady_profile(p, 1.0, u0).mass_tilde ==
          Catch::Approx(ref).epsilon(1e-10));
}

TEST_CASE("solve_for_mass away from the critical index") {
  const StarParams p = half_params();
  for (double M : {5.0, 4.0 * kPi * kPi, 100.0}) {
    const SteadyProfile prof = solve_for_mass(p, M);
    CHECK(prof.total_mass_4pi() == Catch::Approx(M).epsilon(1e-8));
    CHECK(prof.exponents.S == Catch::Approx(1.0).epsilon(1e-14));
  }
  CHECK_THROWS_AS(solve_for_mass(p, -1.0), DomainError);
}

TEST_CASE("solve_for_mass at the critical index pins the entropy") {
  StarParams p;
  p.K = 2.0;
  p.epsilon = 0.125;
  for (double M : {50.0, 573.0}) {
    const SteadyProfile prof = solve_for_mass(p, M);
    CHECK(prof.total_mass_4pi() == Catch::Approx(M).epsilon(1e-8));
    // S = (M / (K^{3/2} M_1))^{1/2}
    const double S_expect = std::sqrt(M / (std::pow(p.K, 1.5) * critical_mass(1.0)));
    CHECK(prof.exponents.S == Catch::Approx(S_expect).epsilon(1e-10));
  }
}

TEST_CASE("boundary fit recovers the vacuum exponents") {
  const SteadyProfile prof = reference();
  const BoundaryFit fit = fit_boundary_exponents(prof);
  CHECK(std::abs(fit.rho_exponent - 1.0) <= 0.02);
  CHECK(fit.theta_slope_at_R < 0.0);
  CHECK(fit.theta_over_sigma_limit > 0.0);
  CHECK(fit.theta_over_sigma_limit ==
        Catch::Approx(-fit.theta_slope_at_R).epsilon(0.01));
  // supercritical index: rho ~ sigma^{alpha_eps}
  StarParams p;
  p.K = 1.0;
  p.epsilon = 0.75;
  const SteadyProfile sup = build_steady_profile(p, 1.0, 1.0);
  const BoundaryFit fsup = fit_boundary_exponents(sup);
  CHECK(std::abs(fsup.rho_exponent - sup.exponents.alpha_eps) <= 0.02);
}

TEST_CASE("boundary fit needs enough nodes in the window") {
  const SteadyProfile tiny = reference(64);  // outer 5% holds ~3 nodes
  CHECK_THROWS_AS(fit_boundary_exponents(tiny), InsufficientResolution);
}
