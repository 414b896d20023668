#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <numbers>

#include "radstar/diagnostics.hpp"
#include "radstar/driver.hpp"
#include "radstar/selfsimilar.hpp"
#include "radstar/steady_star.hpp"

using namespace radstar;

namespace {

SteadyProfile reference(std::size_t N = 2048) {
  StarParams p;
  p.K = 1.0;
  p.epsilon = 0.5;
  return build_steady_profile(p, 1.0 / std::sqrt(2.0), 1.0, N);
}

SelfSimilarSolution make_solution(double a, double b) {
  StarParams p;
  p.K = 1.0;
  p.epsilon = 0.5;
  p.c_nu = 3.0;
  SelfSimilarSolution sol;
  sol.base = build_steady_profile(p, 1.0 / std::sqrt(2.0), 1.0, 2048);
  sol.a = a;
  sol.b = b;
  return sol;
}

}  // namespace

TEST_CASE("cutoff function values and slope bound") {
  const double R0 = 3.0;
  const CutoffChi chi(R0);
  CHECK(chi(0.0) == 1.0);
  CHECK(chi(0.25 * R0) == 1.0);
  CHECK(chi(0.5 * R0) == 0.0);
  CHECK(chi(R0) == 0.0);
  CHECK(chi(0.375 * R0) == Catch::Approx(0.5).epsilon(1e-12));
  double prev = 1.0;
  for (int k = 0; k <= 10000; ++k) {
    const double x = R0 * k / 10000.0;
    const double v = chi(x);
    CHECK(v <= prev + 1e-15);  // monotone non-increasing
    const double d = chi.derivative(x);
    CHECK(d <= 0.0);
    CHECK(d >= -8.0 / R0);
    prev = v;
  }
  // max slope of the quintic transition is 7.5/R0
  CHECK(chi.derivative(0.375 * R0) == Catch::Approx(-7.5 / R0).epsilon(1e-12));
  CHECK_THROWS_AS(CutoffChi(0.0), DomainError);
}

TEST_CASE("energy components vanish on rest states and on the zero state") {
  const SteadyProfile prof = reference();
  const LagrangianGrid g = build_grid(prof, 128);
  LagrangianState s = init_from_steady(prof, [](double) { return 0.0; }, g);
  const CutoffChi chi(g.R0);
  StateRhs zero_rhs;
  zero_rhs.dv_face.assign(g.N + 1, 0.0);
  zero_rhs.dTheta_cell.assign(g.N, 0.0);
  const E1Components e = e1_energy(s, zero_rhs, g, chi);
  CHECK(e.x_sqrho_v == 0.0);
  CHECK(e.sqchirho_v == 0.0);
  CHECK(e.x_vx == 0.0);
  CHECK(e.v == 0.0);
  CHECK(e.sqchi_vx == 0.0);
  CHECK(e.sqchi_v_over_x == 0.0);
  CHECK(e.x_sqrho_theta > 0.0);
  CHECK(e.x_thetax > 0.0);

  for (auto& th : s.Theta_cell) th = 0.0;
  const E1Components z = e1_energy(s, zero_rhs, g, chi);
  CHECK(z.total() == 0.0);
}

TEST_CASE("linear velocity field gives the chi-weighted constant ratio") {
  const SelfSimilarSolution sol = make_solution(1.0, 1.0);
  const LagrangianGrid g = build_grid(sol, 256);
  const LagrangianState s = exact_state(sol, g, 0.0);
  const CutoffChi chi(g.R0);
  const StateRhs rhs = evaluate_rhs(s, g, sol.base.params);
  const E1Components e = e1_energy(s, rhs, g, chi);
  // v/x = b/a everywhere, so the norm is (b/a)^2 * integral of chi
  double chi_int = 0.0;
  for (std::size_t i = 0; i < g.N; ++i) chi_int += chi(g.x_cell[i]) * g.dx;
  CHECK(e.sqchi_v_over_x == Catch::Approx(chi_int).epsilon(1e-10));
}

TEST_CASE("energy components are stable under grid refinement") {
  const SelfSimilarSolution sol = make_solution(1.0, 1.0);
  double totals[2];
  int idx = 0;
  for (std::size_t N : {256, 512}) {
    const LagrangianGrid g = build_grid(sol, N);
    const LagrangianState s = exact_state(sol, g, 0.2);
    const CutoffChi chi(g.R0);
    totals[idx++] = e1_energy(s, evaluate_rhs(s, g, sol.base.params), g, chi).total();
  }
  CHECK(std::abs(totals[0] - totals[1]) / totals[1] <= 5e-3);
}

TEST_CASE("monitors on the identity map") {
  const SteadyProfile prof = reference();
  const LagrangianGrid g = build_grid(prof, 128);
  const LagrangianState s = init_from_steady(prof, [](double) { return 0.0; }, g);
  const auto [l0, m0] = monitors(s, g);
  CHECK(m0 == Catch::Approx(1.0).epsilon(1e-12));
  CHECK(l0 >= m0 - 1e-12);  // Lambda0's sup set contains M0's 1/r_x and x/r
}

TEST_CASE("monitors on the uniformly stretched self-similar state") {
  const SelfSimilarSolution sol = make_solution(1.0, 1.0);
  const LagrangianGrid g = build_grid(sol, 128);
  for (double t : {0.25, 1.0}) {
    const LagrangianState s = exact_state(sol, g, t);
    const auto [l0, m0] = monitors(s, g);
    CHECK(m0 == Catch::Approx(1.0 + t).epsilon(1e-12));
    CHECK(l0 >= 1.0 + t - 1e-12);
  }
}

TEST_CASE("monitors reject inverted maps") {
  const SteadyProfile prof = reference();
  const LagrangianGrid g = build_grid(prof, 64);
  LagrangianState s = init_from_steady(prof, [](double) { return 0.0; }, g);
  std::swap(s.r_face[10], s.r_face[11]);
  CHECK_THROWS_AS(monitors(s, g), InversionError);
}

TEST_CASE("vacuum check on the analytic equilibrium") {
  const SteadyProfile prof = reference();
  const LagrangianGrid g = build_grid(prof, 512);
  const LagrangianState s = init_from_steady(prof, [](double) { return 0.0; }, g);
  const auto [min_neg_slope, min_ratio] = vacuum_check(s, g);
  // theta = sin(r)/(2r): |theta'| at the boundary is 1/(2 pi), and the slope
  // magnitude decreases monotonically toward it on the outer half
  CHECK(min_neg_slope > 0.0);
  CHECK(min_neg_slope == Catch::Approx(0.5 / std::numbers::pi).epsilon(0.05));
  CHECK(min_ratio == Catch::Approx(0.5 / std::numbers::pi).epsilon(0.05));
}

TEST_CASE("vacuum check flags a flat outer temperature") {
  const SteadyProfile prof = reference();
  const LagrangianGrid g = build_grid(prof, 128);
  LagrangianState s = init_from_steady(prof, [](double) { return 0.0; }, g);
  for (std::size_t i = g.N / 2; i < g.N; ++i) s.Theta_cell[i] = 0.1;
  const auto [min_neg_slope, min_ratio] = vacuum_check(s, g);
  CHECK(min_neg_slope <= 0.0);  // interior faces see zero slope, surface negative
  CHECK(min_ratio > 0.0);
}

TEST_CASE("vacuum minima scale with the self-similar factor") {
  const SelfSimilarSolution sol = make_solution(1.0, 1.0);
  const LagrangianGrid g = build_grid(sol, 256);
  const auto v0 = vacuum_check(exact_state(sol, g, 0.0), g);
  const auto v1 = vacuum_check(exact_state(sol, g, 1.0), g);
  CHECK(v1.first == Catch::Approx(0.5 * v0.first).epsilon(1e-10));
  CHECK(v1.second == Catch::Approx(0.5 * v0.second).epsilon(1e-10));
}

TEST_CASE("center slope calibration") {
  const SteadyProfile prof = reference();
  const LagrangianGrid g = build_grid(prof, 128);
  LagrangianState s = init_from_steady(prof, [](double) { return 0.0; }, g);
  // linear temperature recovers the slope exactly
  for (std::size_t i = 0; i < g.N; ++i) s.Theta_cell[i] = 0.3 - 0.07 * g.x_cell[i];
  CHECK(center_slope(s, g) == Catch::Approx(-0.07).epsilon(1e-12));
}

TEST_CASE("center slope shrinks linearly on the smooth equilibrium") {
  const SteadyProfile prof = reference();
  double est[2];
  int idx = 0;
  for (std::size_t N : {128, 256}) {
    const LagrangianGrid g = build_grid(prof, N);
    const LagrangianState s = init_from_steady(prof, [](double) { return 0.0; }, g);
    est[idx++] = std::abs(center_slope(s, g));
  }
  CHECK(est[0] / est[1] == Catch::Approx(2.0).epsilon(0.1));
}

TEST_CASE("ledger tracks the closed-form heating rate on a frozen state") {
  const SteadyProfile prof = reference();
  const LagrangianGrid g = build_grid(prof, 64);
  LagrangianState s = init_from_steady(prof, [](double) { return 0.0; }, g);
  for (auto& th : s.Theta_cell) th = 0.0;  // no heat content, no surface flux
  Trajectory traj;
  for (double t : {0.0, 1.0, 2.0}) {
    LagrangianState c = s;
    c.t = t;
    traj.times.push_back(t);
    traj.snapshots.push_back(std::move(c));
  }
  // nothing moves and nothing flows, but heating still adds energy at the
  // closed-form rate; the budget must track it exactly through the residual
  const LedgerSeries led = energy_ledger(traj, g, prof.params);
  double heat_rate = 0.0;
  for (std::size_t i = 0; i < g.N; ++i)
    heat_rate += prof.params.epsilon * g.x_cell[i] * g.x_cell[i] * g.rho0_cell[i] * g.dx;
  REQUIRE(led.residual.size() == 3);
  CHECK(led.residual[0] == 0.0);
  // E_tot is constant while the ledger charges heating: residual = -heat*t
  CHECK(led.residual[2] == Catch::Approx(-2.0 * heat_rate).epsilon(1e-12));
}

TEST_CASE("ledger residual on a real run is small and converges in dt") {
  const SelfSimilarSolution sol = make_solution(1.0, 1.0);
  const LagrangianGrid g = build_grid(sol, 128);
  double rel[2];
  int idx = 0;
  for (double cfl : {0.4, 0.2}) {
    EvolveConfig cfg;
    cfg.params = sol.base.params;
    cfg.t_end = 1.0;
    cfg.cfl = cfl;
    cfg.snapshot_every = 0.1;
    const RunResult res = run(cfg, g, exact_state(sol, g, 0.0));
    REQUIRE(res.trajectory.completed);
    rel[idx++] = energy_ledger(res.trajectory, g, cfg.params).max_relative_residual;
  }
  CHECK(rel[0] <= 1e-2);
  CHECK(rel[0] / rel[1] >= 1.6);
}

TEST_CASE("reports are pure functions of the state") {
  const SelfSimilarSolution sol = make_solution(1.0, 1.0);
  const LagrangianGrid g = build_grid(sol, 64);
  const LagrangianState s = exact_state(sol, g, 0.4);
  const CutoffChi chi(g.R0);
  const DiagnosticsReport a = make_report(s, g, sol.base.params, chi);
  const DiagnosticsReport b = make_report(s, g, sol.base.params, chi);
  CHECK(a.lambda0 == b.lambda0);
  CHECK(a.m0 == b.m0);
  CHECK(a.e1.total() == b.e1.total());
  CHECK(a.vacuum_min_negslope == b.vacuum_min_negslope);
  CHECK(std::isfinite(a.e1.total()));
  CHECK(a.m0_alert == (a.m0 > 2.0));
}
