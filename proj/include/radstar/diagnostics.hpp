#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "radstar/errors.hpp"
#include "radstar/evolver.hpp"
#include "radstar/params.hpp"

namespace radstar {

/// Interior cutoff: 1 on [0, R0/4], 0 on [R0/2, R0], quintic smoothstep in
/// between. The smoothstep's maximum slope is 15/8 over the transition width
/// R0/4, i.e. 7.5/R0, inside the required bound of 8/R0.
struct CutoffChi {
  double R0;

  explicit CutoffChi(double R0_) : R0(R0_) {
    if (!(R0 > 0.0)) throw DomainError("CutoffChi: R0 must be > 0");
  }

  double operator()(double x) const {
    if (x <= 0.25 * R0) return 1.0;
    if (x >= 0.5 * R0) return 0.0;
    const double t = (x - 0.25 * R0) / (0.25 * R0);
    return 1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
  }

  double derivative(double x) const {
    if (x <= 0.25 * R0 || x >= 0.5 * R0) return 0.0;
    const double t = (x - 0.25 * R0) / (0.25 * R0);
    return -30.0 * t * t * (1.0 - t) * (1.0 - t) / (0.25 * R0);
  }
};

/// Instantaneous squared L2_x norms entering the strong-solution energy
/// functional, at the time-derivative levels i = 0, 1. The v_t/Theta_t levels
/// are formed from the equation right-hand sides, not temporal differences.
struct E1Components {
  // level i = 0
  double x_sqrho_v = 0.0;       // || x sqrt(rho0) v ||^2
  double x_sqrho_theta = 0.0;   // || x sqrt(rho0) Theta ||^2
  double sqchirho_v = 0.0;      // || sqrt(chi rho0) v ||^2
  double x_vx = 0.0;            // || x v_x ||^2
  double v = 0.0;               // || v ||^2
  double x_thetax = 0.0;        // || x Theta_x ||^2
  double sqchi_vx = 0.0;        // || sqrt(chi) v_x ||^2
  double sqchi_v_over_x = 0.0;  // || sqrt(chi) v/x ||^2
  // level i = 1
  double x_sqrho_vt = 0.0;
  double x_sqrho_thetat = 0.0;
  double sqchirho_vt = 0.0;

  double total() const {
    return x_sqrho_v + x_sqrho_theta + sqchirho_v + x_vx + v + x_thetax + sqchi_vx +
           sqchi_v_over_x + x_sqrho_vt + x_sqrho_thetat + sqchirho_vt;
  }
};

struct DiagnosticsReport {
  double t = 0.0;
  E1Components e1;
  double e1_time_integral = 0.0;  // trapezoid-accumulated L2_t of e1.total()
  double lambda0 = 0.0;
  double m0 = 0.0;
  bool m0_alert = false;  // raised when m0 > 2
  double vacuum_min_negslope = 0.0;
  double vacuum_min_theta_over_sigma = 0.0;
  double center_theta_slope = 0.0;
  double energy_ledger_residual = 0.0;
};

/// E1 norms by midpoint quadrature over cells. Face quantities (v and the
/// supplied dv/dt) are averaged to cell centers; v_x and Theta are native to
/// cells; Theta_x is face-differenced and averaged back.
inline E1Components e1_energy(const LagrangianState& s, const StateRhs& rhs,
                              const LagrangianGrid& g, const CutoffChi& chi) {
  const std::size_t N = g.N;
  E1Components e;
  // cell-centered Theta_x from face differences (0 at center, Dirichlet ghost
  // at the surface)
  std::vector<double> thx_face(N + 1, 0.0);
  for (std::size_t j = 1; j < N; ++j)
    thx_face[j] = (s.Theta_cell[j] - s.Theta_cell[j - 1]) / g.dx;
  thx_face[N] = -2.0 * s.Theta_cell[N - 1] / g.dx;
  for (std::size_t i = 0; i < N; ++i) {
    const double x = g.x_cell[i];
    const double rho = g.rho0_cell[i];
    const double w = g.dx;
    const double vc = 0.5 * (s.v_face[i] + s.v_face[i + 1]);
    const double vx = (s.v_face[i + 1] - s.v_face[i]) / g.dx;
    const double vtc = 0.5 * (rhs.dv_face[i] + rhs.dv_face[i + 1]);
    const double th = s.Theta_cell[i];
    const double tht = rhs.dTheta_cell[i];
    const double thx = 0.5 * (thx_face[i] + thx_face[i + 1]);
    const double c = chi(x);
    e.x_sqrho_v += w * x * x * rho * vc * vc;
    e.x_sqrho_theta += w * x * x * rho * th * th;
    e.sqchirho_v += w * c * rho * vc * vc;
    e.x_vx += w * x * x * vx * vx;
    e.v += w * vc * vc;
    e.x_thetax += w * x * x * thx * thx;
    e.sqchi_vx += w * c * vx * vx;
    e.sqchi_v_over_x += w * c * (vc / x) * (vc / x);
    e.x_sqrho_vt += w * x * x * rho * vtc * vtc;
    e.x_sqrho_thetat += w * x * x * rho * tht * tht;
    e.sqchirho_vt += w * c * rho * vtc * vtc;
  }
  return e;
}

/// Point-wise geometric monitors. M0 collects {r_x, r/x, 1/r_x, x/r} over
/// cells and faces; Lambda0 additionally tracks the first time derivatives
/// (v_x and v/x) and Theta/sigma. The center ratio r/x uses the limit r_x at
/// the first cell.
inline std::pair<double, double> monitors(const LagrangianState& s,
                                          const LagrangianGrid& g) {
  const std::size_t N = g.N;
  double m0 = 0.0, l0 = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double rx = (s.r_face[i + 1] - s.r_face[i]) / g.dx;
    if (!(rx > 0.0)) throw InversionError("monitors: r_x <= 0");
    const double vx = (s.v_face[i + 1] - s.v_face[i]) / g.dx;
    m0 = std::max({m0, rx, 1.0 / rx});
    l0 = std::max({l0, 1.0 / rx, std::abs(rx), std::abs(vx)});
    const double sigma = g.R0 - g.x_cell[i];  // >= dx/2 at the last cell
    l0 = std::max(l0, s.Theta_cell[i] / sigma);
  }
  for (std::size_t j = 0; j <= N; ++j) {
    double ratio, vratio;
    if (j == 0) {
      ratio = (s.r_face[1] - s.r_face[0]) / g.dx;  // r/x -> r_x(0+)
      vratio = s.r_face[1] > 0.0 ? s.v_face[1] / s.r_face[1] * ratio : 0.0;
    } else {
      ratio = s.r_face[j] / g.x_face[j];
      vratio = s.v_face[j] / g.x_face[j];
    }
    if (!(ratio > 0.0)) throw InversionError("monitors: r/x <= 0");
    m0 = std::max({m0, ratio, 1.0 / ratio});
    l0 = std::max({l0, 1.0 / ratio, std::abs(ratio), std::abs(vratio)});
    // x/r enters both monitors
    l0 = std::max(l0, 1.0 / ratio);
  }
  return {l0, m0};
}

/// Minimum of -Theta_x (interior faces) and of Theta/sigma (cells) over the
/// outer half x in (R0/2, R0].
inline std::pair<double, double> vacuum_check(const LagrangianState& s,
                                              const LagrangianGrid& g) {
  const std::size_t N = g.N;
  double min_neg_slope = std::numeric_limits<double>::infinity();
  double min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t j = 1; j <= N; ++j) {
    if (g.x_face[j] <= 0.5 * g.R0) continue;
    const double thx = j < N ? (s.Theta_cell[j] - s.Theta_cell[j - 1]) / g.dx
                             : -2.0 * s.Theta_cell[N - 1] / g.dx;
    min_neg_slope = std::min(min_neg_slope, -thx);
  }
  for (std::size_t i = 0; i < N; ++i) {
    if (g.x_cell[i] <= 0.5 * g.R0) continue;
    min_ratio = std::min(min_ratio, s.Theta_cell[i] / (g.R0 - g.x_cell[i]));
  }
  return {min_neg_slope, min_ratio};
}

/// One-sided estimate of Theta_x at the center from the first two cells.
inline double center_slope(const LagrangianState& s, const LagrangianGrid& g) {
  if (g.N < 2) throw DomainError("center_slope: need at least 2 cells");
  return (s.Theta_cell[1] - s.Theta_cell[0]) / g.dx;
}

/// Ledger residual series over a trajectory with uniform snapshot spacing:
///   residual(t) = E_tot(t) - E_tot(0) - int_0^t (heating + surface flux) ds
/// with the time integral by the trapezoid rule across snapshots. Returns the
/// per-snapshot residuals; E_scale is max over snapshots of |E| component sums.
struct LedgerSeries {
  std::vector<double> residual;
  double e_scale = 0.0;
  double max_relative_residual = 0.0;
};

inline LedgerSeries energy_ledger(const Trajectory& traj, const LagrangianGrid& g,
                                  const StarParams& p) {
  LedgerSeries out;
  if (traj.snapshots.empty()) return out;
  const EnergyBudget e0 = energy_budget(traj.snapshots.front(), g, p);
  double prev_power = source_power(traj.snapshots.front(), g, p);
  double prev_t = traj.snapshots.front().t;
  double work = 0.0;
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    const LagrangianState& s = traj.snapshots[k];
    const EnergyBudget e = energy_budget(s, g, p);
    const double power = source_power(s, g, p);
    if (k > 0) {
      work += 0.5 * (s.t - prev_t) * (prev_power + power);
      prev_t = s.t;
      prev_power = power;
    }
    out.residual.push_back(e.total() - e0.total() - work);
    out.e_scale = std::max({out.e_scale, std::abs(e.kinetic), std::abs(e.thermal),
                            std::abs(e.potential)});
  }
  if (out.e_scale > 0.0)
    for (double r : out.residual)
      out.max_relative_residual = std::max(out.max_relative_residual,
                                           std::abs(r) / out.e_scale);
  return out;
}

/// Full per-snapshot report. The E1 time integral and ledger residual are
/// filled in by the run driver, which owns the accumulation across snapshots.
inline DiagnosticsReport make_report(const LagrangianState& s, const LagrangianGrid& g,
                                     const StarParams& p, const CutoffChi& chi) {
  DiagnosticsReport rep;
  rep.t = s.t;
  rep.e1 = e1_energy(s, evaluate_rhs(s, g, p), g, chi);
  const auto [l0, m0] = monitors(s, g);
  rep.lambda0 = l0;
  rep.m0 = m0;
  rep.m0_alert = m0 > 2.0;
  const auto [slope, ratio] = vacuum_check(s, g);
  rep.vacuum_min_negslope = slope;
  rep.vacuum_min_theta_over_sigma = ratio;
  rep.center_theta_slope = center_slope(s, g);
  return rep;
}

}  // namespace radstar
