#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "radstar/errors.hpp"

namespace radstar {

/// The singular ODE  K_bar*(u'' + (2/r) u') + u^alpha = 0,
/// u(0) = u0 > 0, u'(0) = 0, integrated to the first zero of u.
struct LaneEmdenProblem {
  double alpha;
  double K_bar;
  double u0;

  void validate() const {
    if (!(alpha >= 0.0)) throw DomainError("LaneEmdenProblem: alpha must be >= 0");
    if (!(K_bar > 0.0)) throw DomainError("LaneEmdenProblem: K_bar must be > 0");
    if (!(u0 > 0.0)) throw DomainError("LaneEmdenProblem: u0 must be > 0");
  }
};

/// Radial solution up to the first zero R. Nodes are uniform, r_j = j*R/N,
/// with the last node placed at R (u = 0 there, du = dU_at_R < 0).
struct LaneEmdenProfile {
  LaneEmdenProblem problem;
  std::vector<double> r_grid;
  std::vector<double> u;
  std::vector<double> du;
  double R = 0.0;
  double dU_at_R = 0.0;

  double dr() const { return r_grid.size() > 1 ? r_grid[1] - r_grid[0] : 0.0; }
};

namespace detail {

inline void lane_emden_rhs(double alpha, double c, double r, double u, double w,
                           double& du, double& dw) {
  du = w;
  // u can dip to roundoff-negative values right at the zero; clamp the
  // power-law source there.
  const double up = u > 0.0 ? std::pow(u, alpha) : 0.0;
  dw = -2.0 / r * w - c * up;
}

inline void rk4_step(double alpha, double c, double r, double h, double& u, double& w) {
  double k1u, k1w, k2u, k2w, k3u, k3w, k4u, k4w;
  lane_emden_rhs(alpha, c, r, u, w, k1u, k1w);
  lane_emden_rhs(alpha, c, r + 0.5 * h, u + 0.5 * h * k1u, w + 0.5 * h * k1w, k2u, k2w);
  lane_emden_rhs(alpha, c, r + 0.5 * h, u + 0.5 * h * k2u, w + 0.5 * h * k2w, k3u, k3w);
  lane_emden_rhs(alpha, c, r + h, u + h * k3u, w + h * k3w, k4u, k4w);
  u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
  w += h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
}

/// Cubic Hermite evaluation on [ra, rb] with endpoint values/derivatives.
inline void hermite_eval(double ra, double rb, double ua, double dua, double ub,
                         double dub, double r, double& u, double& du) {
  const double h = rb - ra;
  const double t = (r - ra) / h;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  u = h00 * ua + h10 * h * dua + h01 * ub + h11 * h * dub;
  const double d00 = 6 * t2 - 6 * t, d10 = 3 * t2 - 4 * t + 1;
  const double d01 = -6 * t2 + 6 * t, d11 = 3 * t2 - 2 * t;
  du = (d00 * ua + d01 * ub) / h + d10 * dua + d11 * dub;
}

/// Bisection for the zero of the Hermite interpolant on a bracketing step.
inline void locate_zero(double ra, double rb, double ua, double dua, double ub,
                        double dub, double zero_tol, double& R, double& dU) {
  double lo = ra, hi = rb;
  double u, du;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    hermite_eval(ra, rb, ua, dua, ub, dub, mid, u, du);
    if (std::abs(u) <= zero_tol || hi - lo <= 1e-16 * rb) {
      R = mid;
      dU = du;
      return;
    }
    (u > 0.0 ? lo : hi) = mid;
  }
  R = 0.5 * (lo + hi);
  hermite_eval(ra, rb, ua, dua, ub, dub, R, u, dU);
}

}  // namespace detail

/// Taylor start removing the coordinate singularity at r = 0:
///   u = u0 - (c u0^a / 6) r^2 + (a c^2 u0^{2a-1} / 120) r^4,  c = 1/K_bar.
/// Odd derivatives vanish at the origin.
inline std::pair<double, double> series_start(const LaneEmdenProblem& p, double r) {
  p.validate();
  const double c = 1.0 / p.K_bar;
  const double a2 = -c * std::pow(p.u0, p.alpha) / 6.0;
  const double a4 = p.alpha * c * c * std::pow(p.u0, 2.0 * p.alpha - 1.0) / 120.0;
  const double r2 = r * r;
  return {p.u0 + a2 * r2 + a4 * r2 * r2, 2.0 * a2 * r + 4.0 * a4 * r2 * r};
}

inline double series_switch_radius(const LaneEmdenProblem& p) {
  return 1e-3 * std::sqrt(p.K_bar);
}

/// Integrate to the first zero with a fixed-step RK4 sweep (series start near
/// the origin, N uniform steps over the estimated radius) and locate the zero
/// by bisection on the dense output of the bracketing step.
///
/// Throws NoFirstZero when u stays positive out to r_max (alpha >= 5) and
/// StepFailure on non-finite state.
inline LaneEmdenProfile integrate_to_first_zero(const LaneEmdenProblem& p,
                                                std::size_t N = 4096) {
  p.validate();
  if (N < 16) throw DomainError("integrate_to_first_zero: need N >= 16");
  const double c = 1.0 / p.K_bar;
  const double zero_tol = 1e-12 * p.u0;
  const double length_scale =
      std::sqrt(p.K_bar) * std::pow(p.u0, -(p.alpha - 1.0) / 2.0);
  const double r_max = 100.0 * std::sqrt(p.K_bar) *
                       std::max(1.0, std::pow(p.u0, -(p.alpha - 1.0) / 2.0));
  const double r_switch = series_switch_radius(p);

  // Coarse pass: find a bracket for the first zero.
  double R_est;
  {
    const double h = 0.005 * length_scale;
    double r = r_switch;
    auto [u, w] = series_start(p, r);
    double R = -1.0, dU = 0.0;
    while (r < r_max) {
      const double up = u, wp = w, rp = r;
      detail::rk4_step(p.alpha, c, r, h, u, w);
      r += h;
      if (!std::isfinite(u) || !std::isfinite(w))
        throw StepFailure("lane_emden: non-finite state at r = " + std::to_string(r));
      if (u <= 0.0) {
        detail::locate_zero(rp, r, up, wp, u, w, zero_tol, R, dU);
        break;
      }
    }
    if (R < 0.0)
      throw NoFirstZero("lane_emden: no zero up to r_max = " + std::to_string(r_max));
    R_est = R;
  }

  // Fine passes on the uniform grid, re-spaced until the grid end matches the
  // located zero.
  LaneEmdenProfile prof;
  prof.problem = p;
  for (int pass = 0; pass < 5; ++pass) {
    const double dr = R_est / static_cast<double>(N);
    prof.r_grid.assign(N + 1, 0.0);
    prof.u.assign(N + 1, 0.0);
    prof.du.assign(N + 1, 0.0);
    for (std::size_t j = 0; j <= N; ++j) prof.r_grid[j] = dr * static_cast<double>(j);

    // Seed every node inside the series region (at least node 1).
    std::size_t j0 = 1;
    while (j0 + 1 <= N && prof.r_grid[j0 + 1] <= r_switch) ++j0;
    for (std::size_t j = 0; j <= j0; ++j) {
      auto [uj, wj] = series_start(p, prof.r_grid[j]);
      prof.u[j] = uj;
      prof.du[j] = wj;
    }

    double u = prof.u[j0], w = prof.du[j0];
    double R = -1.0, dU = 0.0;
    for (std::size_t j = j0; j < N; ++j) {
      const double up = u, wp = w;
      detail::rk4_step(p.alpha, c, prof.r_grid[j], dr, u, w);
      if (!std::isfinite(u) || !std::isfinite(w))
        throw StepFailure("lane_emden: non-finite state near r = " +
                          std::to_string(prof.r_grid[j + 1]));
      prof.u[j + 1] = u;
      prof.du[j + 1] = w;
      if (R < 0.0 && u <= 0.0)
        detail::locate_zero(prof.r_grid[j], prof.r_grid[j + 1], up, wp, u, w, zero_tol,
                            R, dU);
    }
    if (R < 0.0) {
      // Zero lies just beyond the current grid; keep stepping to bracket it.
      double r = prof.r_grid[N];
      while (r < r_max) {
        const double up = u, wp = w, rp = r;
        detail::rk4_step(p.alpha, c, r, dr, u, w);
        r += dr;
        if (u <= 0.0) {
          detail::locate_zero(rp, r, up, wp, u, w, zero_tol, R, dU);
          break;
        }
      }
      if (R < 0.0)
        throw NoFirstZero("lane_emden: no zero up to r_max = " + std::to_string(r_max));
    }
    prof.R = R;
    prof.dU_at_R = dU;
    if (std::abs(R - R_est) <= 1e-12 * R) break;
    R_est = R;
  }

  if (!(prof.dU_at_R < 0.0))
    throw StepFailure("lane_emden: non-negative slope at first zero");
  // Pin the boundary node onto the located zero.
  prof.r_grid.back() = prof.R;
  prof.u.back() = 0.0;
  prof.du.back() = prof.dU_at_R;
  return prof;
}

/// Cubic Hermite interpolation of (u, du) on the stored grid; exact at nodes.
inline std::pair<double, double> evaluate_profile(const LaneEmdenProfile& prof,
                                                  double r) {
  if (!(r >= 0.0) || r > prof.R)
    throw RangeError("evaluate_profile: r outside [0, R]");
  const double dr = prof.dr();
  std::size_t j = static_cast<std::size_t>(r / dr);
  if (j >= prof.r_grid.size() - 1) j = prof.r_grid.size() - 2;
  if (r <= prof.r_grid[j]) {
    if (r == prof.r_grid[j]) return {prof.u[j], prof.du[j]};
  }
  double u, du;
  detail::hermite_eval(prof.r_grid[j], prof.r_grid[j + 1], prof.u[j], prof.du[j],
                       prof.u[j + 1], prof.du[j + 1], r, u, du);
  return {u, du};
}

/// Closed forms for the integrable indices:
///   alpha = 0:  u = u0 - c r^2 / 6
///   alpha = 1:  u = u0 sin(kr)/(kr),  k = 1/sqrt(K_bar)
///   alpha = 5:  u = u0 (1 + u0^4 r^2 / (3 K_bar))^{-1/2}   (never zero)
inline std::pair<double, double> analytic_solution(double alpha, double K_bar,
                                                   double u0, double r) {
  if (!(K_bar > 0.0) || !(u0 > 0.0))
    throw DomainError("analytic_solution: K_bar, u0 must be > 0");
  if (alpha == 0.0) {
    const double c = 1.0 / K_bar;
    return {u0 - c * r * r / 6.0, -c * r / 3.0};
  }
  if (alpha == 1.0) {
    const double k = 1.0 / std::sqrt(K_bar);
    const double s = k * r;
    if (s < 1e-8) {
      // sinc expansion near the origin
      return {u0 * (1.0 - s * s / 6.0), -u0 * k * s / 3.0};
    }
    const double u = u0 * std::sin(s) / s;
    const double du = u0 * k * (std::cos(s) / s - std::sin(s) / (s * s));
    return {u, du};
  }
  if (alpha == 5.0) {
    const double q = u0 * u0 * u0 * u0 / (3.0 * K_bar);
    const double base = 1.0 + q * r * r;
    const double u = u0 / std::sqrt(base);
    const double du = -u0 * q * r * std::pow(base, -1.5);
    return {u, du};
  }
  throw UnsupportedIndex("analytic_solution: alpha must be 0, 1 or 5");
}

}  // namespace radstar
