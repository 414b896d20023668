#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "radstar/errors.hpp"
#include "radstar/params.hpp"
#include "radstar/steady_star.hpp"

namespace radstar {

/// Fixed Lagrangian mass-coordinate grid: velocities and radii live on faces
/// x_j = j*dx, thermodynamic quantities at cell centers x_{j+1/2}. The
/// initial density rho0 is sampled once and never updated, so mass
/// conservation is exact by construction.
struct LagrangianGrid {
  double R0 = 0.0;
  std::size_t N = 0;
  double dx = 0.0;
  std::vector<double> x_face;     // N+1
  std::vector<double> x_cell;     // N
  std::vector<double> rho0_cell;  // N, > 0 at every cell center
  std::vector<double> rho0_face;  // N+1, vanishes at x = R0
  std::vector<double> m_face;     // N+1, integral of s^2 rho0 up to x_j
  std::vector<double> m_cell;     // N, same at cell centers
  std::vector<double> Phi_cell;   // N, m(x)/x^3 with the x->0 limit rho0(0)/3

  /// Exact mass of the dual cell of face j, (x_{j-1/2}, x_{j+1/2}) clipped to
  /// the domain. Near the vacuum boundary this differs by a factor ~2 from
  /// the midpoint-density estimate, which matters for the force balance.
  double dual_mass(std::size_t j) const {
    const double lo = j > 0 ? m_face[j] - m_cell[j - 1] : 0.0;
    const double hi = j < N ? m_cell[j] - m_face[j] : 0.0;
    return lo + hi;
  }
};

/// Time-dependent state on a LagrangianGrid.
struct LagrangianState {
  double t = 0.0;
  std::vector<double> r_face;      // N+1, r_face[0] = 0, strictly increasing
  std::vector<double> v_face;      // N+1, v_face[0] = 0
  std::vector<double> Theta_cell;  // N, >= 0
};

struct EvolveConfig {
  StarParams params;
  double cfl = 0.4;
  double t_end = 1.0;
  double snapshot_every = 0.0;  // <= 0: snapshots only at t = 0 and t_end
  double theta_floor = 0.0;
  double implicit_solver_tol = 1e-12;
  double dt_max = 1.0;

  void validate() const {
    params.validate();
    if (!(cfl > 0.0 && cfl < 1.0)) throw DomainError("EvolveConfig: cfl must be in (0,1)");
    if (!(t_end >= 0.0)) throw DomainError("EvolveConfig: t_end must be >= 0");
    if (!(dt_max > 0.0)) throw DomainError("EvolveConfig: dt_max must be > 0");
  }
};

/// Sample an initial density onto the staggered grid. rho0 must be >= 0 on
/// [0, R0]; when require_vacuum is set it must also vanish at x = R0.
inline LagrangianGrid build_grid(const std::function<double(double)>& rho0, double R0,
                                 std::size_t N, bool require_vacuum = false) {
  if (!(R0 > 0.0)) throw DomainError("build_grid: R0 must be > 0");
  if (N < 8) throw DomainError("build_grid: need N >= 8 cells");
  LagrangianGrid g;
  g.R0 = R0;
  g.N = N;
  g.dx = R0 / static_cast<double>(N);
  g.x_face.resize(N + 1);
  g.x_cell.resize(N);
  g.rho0_cell.resize(N);
  g.rho0_face.resize(N + 1);
  g.m_face.assign(N + 1, 0.0);
  g.m_cell.resize(N);
  g.Phi_cell.resize(N);
  for (std::size_t j = 0; j <= N; ++j) {
    g.x_face[j] = g.dx * static_cast<double>(j);
    g.rho0_face[j] = rho0(g.x_face[j]);
    if (g.rho0_face[j] < 0.0)
      throw DomainError("build_grid: negative density at x = " +
                        std::to_string(g.x_face[j]));
  }
  const double rho_scale = rho0(0.0);
  if (require_vacuum && std::abs(g.rho0_face[N]) > 1e-8 * std::max(1.0, rho_scale))
    throw DomainError("build_grid: rho0(R0) does not vanish");
  const auto f = [&rho0](double s) { return s * s * rho0(s); };
  for (std::size_t i = 0; i < N; ++i) {
    g.x_cell[i] = g.x_face[i] + 0.5 * g.dx;
    g.rho0_cell[i] = rho0(g.x_cell[i]);
    if (!(g.rho0_cell[i] > 0.0))
      throw DomainError("build_grid: rho0 must be positive at cell centers");
    // per-interval Simpson with the cell midpoint
    const double a = g.x_face[i], b = g.x_face[i + 1], c = g.x_cell[i];
    g.m_cell[i] = g.m_face[i] + (c - a) / 6.0 *
                                    (f(a) + 4.0 * f(0.5 * (a + c)) + f(c));
    g.m_face[i + 1] = g.m_face[i] + (b - a) / 6.0 * (f(a) + 4.0 * f(c) + f(b));
    g.Phi_cell[i] =
        i == 0 ? rho_scale / 3.0 : g.m_cell[i] / (g.x_cell[i] * g.x_cell[i] * g.x_cell[i]);
  }
  return g;
}

inline LagrangianGrid build_grid(const SteadyProfile& prof, std::size_t N) {
  return build_grid([&prof](double r) { return prof.rho_at(r); }, prof.R, N,
                    /*require_vacuum=*/true);
}

/// Initial state from a steady profile: identity map r = x, cell temperatures
/// from the profile, face velocities from velocity_law (v(0) = 0 enforced).
inline LagrangianState init_from_steady(const SteadyProfile& prof,
                                        const std::function<double(double)>& velocity_law,
                                        const LagrangianGrid& grid) {
  if (std::abs(prof.R - grid.R0) > 1e-10 * grid.R0)
    throw ShapeMismatch("init_from_steady: profile radius != grid R0");
  LagrangianState s;
  s.t = 0.0;
  s.r_face = grid.x_face;
  s.v_face.resize(grid.N + 1);
  s.Theta_cell.resize(grid.N);
  for (std::size_t j = 0; j <= grid.N; ++j) s.v_face[j] = velocity_law(grid.x_face[j]);
  if (std::abs(s.v_face[0]) > 0.0)
    throw ShapeMismatch("init_from_steady: velocity_law must vanish at x = 0");
  for (std::size_t i = 0; i < grid.N; ++i) s.Theta_cell[i] = prof.theta_at(grid.x_cell[i]);
  return s;
}

namespace detail {

inline std::vector<double> cell_rx(const LagrangianState& s, const LagrangianGrid& g,
                                   bool check = true) {
  std::vector<double> rx(g.N);
  for (std::size_t i = 0; i < g.N; ++i) {
    rx[i] = (s.r_face[i + 1] - s.r_face[i]) / g.dx;
    if (check && !(rx[i] > 0.0))
      throw InversionError("evolver: r_x <= 0 in cell " + std::to_string(i) + " at t = " +
                           std::to_string(s.t));
  }
  return rx;
}

/// Face velocity-to-radius ratios; the center value takes the x->0 limit.
inline std::vector<double> face_ratio(const LagrangianState& s, std::size_t N) {
  std::vector<double> q(N + 1);
  q[0] = s.r_face[1] > 0.0 ? s.v_face[1] / s.r_face[1] : 0.0;
  for (std::size_t j = 1; j <= N; ++j) q[j] = s.v_face[j] / s.r_face[j];
  return q;
}

/// Thomas algorithm for a tridiagonal system; overwrites inputs.
inline void solve_tridiagonal(std::vector<double>& lower, std::vector<double>& diag,
                              std::vector<double>& upper, std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double w = lower[i] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

}  // namespace detail

/// Explicit force per interior/surface face: pressure difference, geometric
/// pressure, gravity, and (when include_viscous) the viscous stress evaluated
/// on the current velocity. Entry j holds the force integrated over the dual
/// cell of face j; inertia[j] is the matching dual-cell mass.
struct FaceForces {
  std::vector<double> inertia;  // N+1 (index 0 unused, center pinned)
  std::vector<double> force;    // N+1
};

inline FaceForces momentum_forces(const LagrangianState& s, const LagrangianGrid& g,
                                  const StarParams& p, bool include_viscous) {
  const std::size_t N = g.N;
  const double K = p.K;
  const auto rx = detail::cell_rx(s, g);
  const auto q = detail::face_ratio(s, N);

  std::vector<double> a(N), pflux(N), pth(N), Bc(N), qc(N);
  for (std::size_t i = 0; i < N; ++i) {
    a[i] = g.x_cell[i] * g.x_cell[i] * g.rho0_cell[i];
    pth[i] = g.rho0_cell[i] * s.Theta_cell[i];
    pflux[i] = K * g.x_cell[i] * g.x_cell[i] * pth[i] / rx[i];
    qc[i] = 0.5 * (q[i] + q[i + 1]);
    const double vx = (s.v_face[i + 1] - s.v_face[i]) / g.dx;
    Bc[i] = (2.0 * p.mu + p.lambda_visc) * vx / rx[i] + 2.0 * p.lambda_visc * qc[i];
  }

  FaceForces out;
  out.inertia.assign(N + 1, 0.0);
  out.force.assign(N + 1, 0.0);
  for (std::size_t j = 1; j <= N; ++j) {
    const bool surface = j == N;
    const double inertia = g.dual_mass(j);
    const double x = g.x_face[j], r = s.r_face[j];
    // pressure flux difference; zero pressure at the surface face
    double f = surface ? pflux[N - 1] : -(pflux[j] - pflux[j - 1]);
    // geometric pressure term 2K x rho0 Theta (x/r)
    const double w =
        surface ? 0.5 * g.dx * pth[N - 1] : 0.5 * g.dx * (pth[j - 1] + pth[j]);
    f += 2.0 * K * x * (x / r) * w;
    // gravity: -m(x)/r^2 per unit mass
    f -= inertia * g.m_face[j] / (r * r);
    if (include_viscous) {
      // r^2 B_x + 4 mu r^2 (v/r)_x with B = 0 at the surface face
      const double Bout = surface ? 0.0 : Bc[j];
      const double Bin = Bc[j - 1];
      f += r * r * (Bout - Bin);
      if (surface)
        f += 4.0 * p.mu * r * r * (q[N] - qc[N - 1]);
      else
        f += 4.0 * p.mu * r * r * (qc[j] - qc[j - 1]);
    }
    out.inertia[j] = inertia;
    out.force[j] = f;
  }
  return out;
}

/// Equation right-hand sides (dv/dt at faces, dTheta/dt at cells) evaluated
/// on the given state. Used by the diagnostics to form the time-derivative
/// levels of the energy functional without temporal differencing.
struct StateRhs {
  std::vector<double> dv_face;      // N+1
  std::vector<double> dTheta_cell;  // N
};

inline StateRhs evaluate_rhs(const LagrangianState& s, const LagrangianGrid& g,
                             const StarParams& p) {
  const std::size_t N = g.N;
  const bool visc = p.iota == 1;
  const auto forces = momentum_forces(s, g, p, visc);
  StateRhs rhs;
  rhs.dv_face.assign(N + 1, 0.0);
  for (std::size_t j = 1; j <= N; ++j) rhs.dv_face[j] = forces.force[j] / forces.inertia[j];

  const auto rx = detail::cell_rx(s, g);
  const auto q = detail::face_ratio(s, N);
  rhs.dTheta_cell.assign(N, 0.0);
  // conduction fluxes (r^2 / r_x) Theta_x at faces; 0 at the center,
  // Dirichlet ghost Theta = -Theta_{N-1/2} at the surface
  std::vector<double> H(N + 1, 0.0);
  for (std::size_t j = 1; j < N; ++j) {
    const double kappa = s.r_face[j] * s.r_face[j] / (0.5 * (rx[j - 1] + rx[j]));
    H[j] = kappa * (s.Theta_cell[j] - s.Theta_cell[j - 1]) / g.dx;
  }
  {
    const double kappa = s.r_face[N] * s.r_face[N] / rx[N - 1];
    H[N] = kappa * (-2.0 * s.Theta_cell[N - 1]) / g.dx;
  }
  for (std::size_t i = 0; i < N; ++i) {
    const double a = g.x_cell[i] * g.x_cell[i] * g.rho0_cell[i];
    const double vx = (s.v_face[i + 1] - s.v_face[i]) / g.dx;
    const double qc = 0.5 * (q[i] + q[i + 1]);
    const double div = vx / rx[i] + 2.0 * qc;  // (r^2 v)_x / (r^2 r_x)
    double src = p.epsilon * a + (H[i + 1] - H[i]) / g.dx - p.K * a * s.Theta_cell[i] * div;
    if (visc) {
      const double rc = 0.5 * (s.r_face[i] + s.r_face[i + 1]);
      const double vxrx = vx / rx[i];
      src += 2.0 * p.mu * rc * rc * rx[i] * (vxrx * vxrx + 2.0 * qc * qc) +
             p.lambda_visc * rc * rc * rx[i] * (vxrx + 2.0 * qc) * (vxrx + 2.0 * qc);
    }
    rhs.dTheta_cell[i] = src / (p.c_nu * a);
  }
  return rhs;
}

/// Acoustic CFL bound: dt = min(dt_max, cfl * min(dx * r_x / c_s)) with the
/// per-cell sound speed floored near vacuum.
inline double stable_dt(const LagrangianState& s, const LagrangianGrid& g,
                        const EvolveConfig& cfg) {
  cfg.validate();
  const double ek = cfg.params.epsK();
  const double gam = ek < 1.0 ? 1.0 / (1.0 - ek) : 5.0 / 3.0;
  double theta_max = 0.0;
  for (double th : s.Theta_cell) theta_max = std::max(theta_max, th);
  if (theta_max <= 0.0) return cfg.dt_max;
  const double c_floor = std::sqrt(cfg.params.K * 1e-12 * theta_max);
  double dt = cfg.dt_max;
  for (std::size_t i = 0; i < g.N; ++i) {
    const double rx = (s.r_face[i + 1] - s.r_face[i]) / g.dx;
    const double cs =
        std::max(std::sqrt(gam * cfg.params.K * std::max(s.Theta_cell[i], 0.0)), c_floor);
    dt = std::min(dt, cfg.cfl * g.dx * rx / cs);
  }
  return dt;
}

struct StepStats {
  int clipped_cells = 0;
};

/// One operator-split step: (1) momentum with semi-implicit viscosity,
/// (2) geometry update r += dt v, (3) energy with implicit conduction and
/// frozen-coefficient compression. Throws InversionError, SolverDiverged or
/// NegativeTemperature on failure.
inline void step(LagrangianState& s, const LagrangianGrid& g, const EvolveConfig& cfg,
                 double dt, StepStats* stats = nullptr) {
  const std::size_t N = g.N;
  const StarParams& p = cfg.params;
  const bool visc = p.iota == 1;

  // --- (1) momentum ---
  const auto forces = momentum_forces(s, g, p, /*include_viscous=*/false);
  std::vector<double> v_new = s.v_face;
  if (!visc) {
    for (std::size_t j = 1; j <= N; ++j)
      v_new[j] = s.v_face[j] + dt * forces.force[j] / forces.inertia[j];
  } else {
    // backward Euler in the viscous stress, coefficients frozen at the
    // current geometry; unknowns v_1..v_N
    const auto rx = detail::cell_rx(s, g);
    const double tmu = 2.0 * p.mu + p.lambda_visc;
    const double smu = 2.0 * p.lambda_visc + 4.0 * p.mu;
    std::vector<double> lower(N, 0.0), diag(N, 0.0), upper(N, 0.0), rhs(N, 0.0);
    auto R = [&s](std::size_t j) { return s.r_face[j]; };
    for (std::size_t j = 1; j <= N; ++j) {
      const std::size_t k = j - 1;  // row index
      const double r2 = R(j) * R(j);
      double dl = 0.0, dd = 0.0, du = 0.0;
      if (j < N) {
        dd -= r2 * tmu / g.dx * (1.0 / rx[j] + 1.0 / rx[j - 1]);
        du += r2 * tmu / (g.dx * rx[j]);
        if (j > 1) dl += r2 * tmu / (g.dx * rx[j - 1]);
        if (j == 1) {
          // qc_1 - qc_0 = (q_2 - q_1)/2 with the center-limit convention
          dd -= r2 * smu / (2.0 * R(1));
          du += r2 * smu / (2.0 * R(2));
        } else {
          dl -= r2 * smu / (2.0 * R(j - 1));
          du += r2 * smu / (2.0 * R(j + 1));
        }
      } else {
        // surface face: B = 0 outside, one-sided 4 mu r^2 (v/r)_x
        dd -= r2 * tmu / (g.dx * rx[N - 1]);
        dl += r2 * tmu / (g.dx * rx[N - 1]);
        dd += (2.0 * p.mu - p.lambda_visc) * R(N);
        dl -= (2.0 * p.mu + p.lambda_visc) * r2 / (2.0 * R(N - 1));
      }
      lower[k] = -dt * dl;
      diag[k] = forces.inertia[j] - dt * dd;
      upper[k] = -dt * du;
      rhs[k] = forces.inertia[j] * s.v_face[j] + dt * forces.force[j];
    }
    std::vector<double> lo = lower, di = diag, up = upper, x = rhs;
    detail::solve_tridiagonal(lo, di, up, x);
    double scale = 0.0, resid = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
      double ax = diag[k] * x[k];
      if (k > 0) ax += lower[k] * x[k - 1];
      if (k + 1 < N) ax += upper[k] * x[k + 1];
      resid = std::max(resid, std::abs(ax - rhs[k]));
      scale = std::max(scale, std::abs(rhs[k]));
      if (!std::isfinite(x[k])) throw SolverDiverged("evolver: momentum solve non-finite");
    }
    if (resid > cfg.implicit_solver_tol * std::max(scale, 1e-300) + 1e-300 &&
        resid > 1e-10 * std::max(scale, 1.0))
      throw SolverDiverged("evolver: momentum solve residual " + std::to_string(resid));
    for (std::size_t j = 1; j <= N; ++j) v_new[j] = x[j - 1];
  }
  v_new[0] = 0.0;

  // --- (2) geometry ---
  for (std::size_t j = 1; j <= N; ++j) s.r_face[j] += dt * v_new[j];
  s.v_face = std::move(v_new);
  const auto rx = detail::cell_rx(s, g);  // throws InversionError on r_x <= 0

  // --- (3) energy ---
  const auto q = detail::face_ratio(s, N);
  std::vector<double> lower(N, 0.0), diag(N, 0.0), upper(N, 0.0), rhs(N, 0.0);
  std::vector<double> kappa(N + 1, 0.0);
  for (std::size_t j = 1; j < N; ++j)
    kappa[j] = s.r_face[j] * s.r_face[j] / (0.5 * (rx[j - 1] + rx[j]));
  kappa[N] = s.r_face[N] * s.r_face[N] / rx[N - 1];
  for (std::size_t i = 0; i < N; ++i) {
    const double a = g.x_cell[i] * g.x_cell[i] * g.rho0_cell[i];
    const double vx = (s.v_face[i + 1] - s.v_face[i]) / g.dx;
    const double qc = 0.5 * (q[i] + q[i + 1]);
    const double div = vx / rx[i] + 2.0 * qc;
    const double mass = p.c_nu * a * g.dx / dt;
    diag[i] = mass + p.K * a * div * g.dx;
    // conduction, backward Euler
    if (i > 0) {
      diag[i] += kappa[i] / g.dx;
      lower[i] = -kappa[i] / g.dx;
    }
    if (i + 1 < N) {
      diag[i] += kappa[i + 1] / g.dx;
      upper[i] = -kappa[i + 1] / g.dx;
    } else {
      diag[i] += 2.0 * kappa[N] / g.dx;  // Dirichlet ghost at the surface
    }
    double src = p.epsilon * a * g.dx;
    if (visc) {
      const double rc = 0.5 * (s.r_face[i] + s.r_face[i + 1]);
      const double vxrx = vx / rx[i];
      src += (2.0 * p.mu * rc * rc * rx[i] * (vxrx * vxrx + 2.0 * qc * qc) +
              p.lambda_visc * rc * rc * rx[i] * (vxrx + 2.0 * qc) * (vxrx + 2.0 * qc)) *
             g.dx;
    }
    rhs[i] = mass * s.Theta_cell[i] + src;
  }
  std::vector<double> lo = lower, di = diag, up = upper, x = rhs;
  detail::solve_tridiagonal(lo, di, up, x);
  double scale = 0.0, resid = 0.0, theta_max = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    double ax = diag[i] * x[i];
    if (i > 0) ax += lower[i] * x[i - 1];
    if (i + 1 < N) ax += upper[i] * x[i + 1];
    resid = std::max(resid, std::abs(ax - rhs[i]));
    scale = std::max(scale, std::abs(rhs[i]));
    if (!std::isfinite(x[i])) throw SolverDiverged("evolver: energy solve non-finite");
    theta_max = std::max(theta_max, x[i]);
  }
  if (resid > cfg.implicit_solver_tol * std::max(scale, 1e-300) + 1e-300 &&
      resid > 1e-10 * std::max(scale, 1.0))
    throw SolverDiverged("evolver: energy solve residual " + std::to_string(resid));
  for (std::size_t i = 0; i < N; ++i) {
    if (x[i] < -1e-12 * theta_max)
      throw NegativeTemperature("evolver: Theta = " + std::to_string(x[i]) + " in cell " +
                                std::to_string(i));
    if (x[i] < 0.0) {
      x[i] = cfg.theta_floor;
      if (stats) ++stats->clipped_cells;
    }
  }
  s.Theta_cell = std::move(x);
  s.t += dt;
}

/// Snapshot record of a run. When a run halts early on a solver failure the
/// partial snapshot list is kept and error_message is set.
struct Trajectory {
  std::vector<double> times;
  std::vector<LagrangianState> snapshots;
  bool completed = true;
  std::string error_message;
};

/// Discrete energy ledger pieces: kinetic + thermal + potential energy and
/// the instantaneous source power (interior heating + surface heat flux).
struct EnergyBudget {
  double kinetic = 0.0;
  double thermal = 0.0;
  double potential = 0.0;
  double total() const { return kinetic + thermal + potential; }
};

inline EnergyBudget energy_budget(const LagrangianState& s, const LagrangianGrid& g,
                                  const StarParams& p) {
  EnergyBudget e;
  const std::size_t N = g.N;
  for (std::size_t j = 1; j <= N; ++j)
    e.kinetic += 0.5 * g.dual_mass(j) * s.v_face[j] * s.v_face[j];
  for (std::size_t i = 0; i < N; ++i) {
    const double a = g.x_cell[i] * g.x_cell[i] * g.rho0_cell[i];
    const double rc = 0.5 * (s.r_face[i] + s.r_face[i + 1]);
    e.thermal += p.c_nu * a * s.Theta_cell[i] * g.dx;
    e.potential -= a * g.m_cell[i] / rc * g.dx;
  }
  return e;
}

/// Interior heating power plus the (signed) surface conduction flux.
inline double source_power(const LagrangianState& s, const LagrangianGrid& g,
                           const StarParams& p) {
  double heat = 0.0;
  for (std::size_t i = 0; i < g.N; ++i)
    heat += p.epsilon * g.x_cell[i] * g.x_cell[i] * g.rho0_cell[i] * g.dx;
  const double rxN = (s.r_face[g.N] - s.r_face[g.N - 1]) / g.dx;
  const double flux =
      s.r_face[g.N] * s.r_face[g.N] / rxN * (-2.0 * s.Theta_cell[g.N - 1]) / g.dx;
  return heat + flux;
}

}  // namespace radstar
