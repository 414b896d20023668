#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "radstar/errors.hpp"
#include "radstar/evolver.hpp"
#include "radstar/steady_star.hpp"

namespace radstar {

/// Exact expanding/collapsing solutions of the inviscid system built on a
/// steady base profile: with scale alpha(t) = 1/(a+bt) the Eulerian fields
/// rho = alpha^3 rho_bar(alpha y), theta = alpha theta_bar(alpha y) together
/// with the linear velocity field solve the equations exactly provided
/// c_nu = 3K and iota = 0. Those two conditions are enforced at construction.
struct SelfSimilarSolution {
  SteadyProfile base;  // the bar-profile, radius R_bar = base.R
  double a = 1.0;
  double b = 0.0;

  void validate() const {
    if (!(a > 0.0)) throw DomainError("SelfSimilarSolution: a must be > 0");
    const StarParams& p = base.params;
    p.validate();
    if (p.iota != 0)
      throw DomainError("SelfSimilarSolution: requires the inviscid system (iota = 0)");
    if (std::abs(p.c_nu - 3.0 * p.K) > 1e-12 * std::max(1.0, 3.0 * p.K))
      throw DomainError("SelfSimilarSolution: requires c_nu = 3K");
  }

  /// Lagrangian domain length at t = 0.
  double R0() const { return a * base.R; }

  /// Collapse time |a/b| for b < 0; infinite otherwise.
  double lifetime() const {
    return b < 0.0 ? -a / b : std::numeric_limits<double>::infinity();
  }

  /// Initial Lagrangian density rho0(x) = rho_bar(x/a)/a^3 on [0, a*R_bar].
  double rho0(double x) const { return base.rho_at(x / a) / (a * a * a); }
};

/// Scale factor alpha(t) = 1/(a+bt). Throws LifetimeExceeded once a
/// collapsing solution reaches its collapse time.
inline double alpha_of_t(const SelfSimilarSolution& sol, double t) {
  sol.validate();
  if (!(t >= 0.0)) throw DomainError("alpha_of_t: t must be >= 0");
  const double denom = sol.a + sol.b * t;
  if (!(denom > 0.0))
    throw LifetimeExceeded("alpha_of_t: t = " + std::to_string(t) +
                           " at or past collapse time " + std::to_string(sol.lifetime()));
  return 1.0 / denom;
}

/// Lagrangian grid sampled from the t = 0 density of the solution.
inline LagrangianGrid build_grid(const SelfSimilarSolution& sol, std::size_t N) {
  sol.validate();
  return build_grid([&sol](double x) { return sol.rho0(x); }, sol.R0(), N,
                    /*require_vacuum=*/true);
}

/// Exact Lagrangian state at time t on a grid built from the t = 0 density:
/// r(x,t) = (a+bt)x/a, v(x,t) = (b/a)x, Theta(x,t) = theta_bar(x/a)/(a+bt).
inline LagrangianState exact_state(const SelfSimilarSolution& sol,
                                   const LagrangianGrid& grid, double t) {
  const double al = alpha_of_t(sol, t);  // validates sol and the life interval
  const double stretch = 1.0 / (sol.a * al);  // (a+bt)/a
  LagrangianState s;
  s.t = t;
  s.r_face.resize(grid.N + 1);
  s.v_face.resize(grid.N + 1);
  s.Theta_cell.resize(grid.N);
  for (std::size_t j = 0; j <= grid.N; ++j) {
    s.r_face[j] = stretch * grid.x_face[j];
    s.v_face[j] = (sol.b / sol.a) * grid.x_face[j];
  }
  for (std::size_t i = 0; i < grid.N; ++i)
    s.Theta_cell[i] = al * sol.base.theta_at(grid.x_cell[i] / sol.a);
  return s;
}

/// Per-snapshot sup-norm errors of an evolver trajectory against the exact
/// solution, plus the boundary-radius error |r_face(N) - (a+bt)R0/a|.
struct TrajectoryErrors {
  std::vector<double> times;
  std::vector<double> err_r;         // L-infinity over faces
  std::vector<double> err_v;
  std::vector<double> err_theta;     // L-infinity over cells
  std::vector<double> err_boundary;  // |r_face(N) - exact R(t)|
};

inline TrajectoryErrors compare_trajectory(const SelfSimilarSolution& sol,
                                           const Trajectory& traj,
                                           const LagrangianGrid& grid) {
  sol.validate();
  TrajectoryErrors e;
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    const LagrangianState& s = traj.snapshots[k];
    if (s.r_face.size() != grid.N + 1 || s.Theta_cell.size() != grid.N)
      throw ShapeMismatch("compare_trajectory: snapshot does not match grid");
    const LagrangianState ex = exact_state(sol, grid, s.t);
    double dr = 0.0, dv = 0.0, dth = 0.0;
    for (std::size_t j = 0; j <= grid.N; ++j) {
      dr = std::max(dr, std::abs(s.r_face[j] - ex.r_face[j]));
      dv = std::max(dv, std::abs(s.v_face[j] - ex.v_face[j]));
    }
    for (std::size_t i = 0; i < grid.N; ++i)
      dth = std::max(dth, std::abs(s.Theta_cell[i] - ex.Theta_cell[i]));
    e.times.push_back(s.t);
    e.err_r.push_back(dr);
    e.err_v.push_back(dv);
    e.err_theta.push_back(dth);
    e.err_boundary.push_back(std::abs(s.r_face[grid.N] - ex.r_face[grid.N]));
  }
  return e;
}

}  // namespace radstar
