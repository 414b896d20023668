#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "radstar/errors.hpp"
#include "radstar/lane_emden.hpp"
#include "radstar/params.hpp"
#include "radstar/quadrature.hpp"

namespace radstar {

/// Full steady-star profile assembled from a Lane-Emden solution through the
/// reduction identities rho = u^alpha_eps, theta = eps*K_bar*u, together with
/// the gravitational potential and the reduced mass integral.
struct SteadyProfile {
  StarParams params;
  DerivedExponents exponents;
  std::vector<double> r_grid;
  std::vector<double> u;
  std::vector<double> du;
  std::vector<double> rho;
  std::vector<double> theta;
  std::vector<double> psi;
  double R = 0.0;
  double mass_tilde = 0.0;   // integral of rho r^2 dr
  double rho_c = 0.0;
  double theta_c = 0.0;
  double theta_slope_at_R = 0.0;  // one-sided d(theta)/dr at R, < 0

  double dr() const { return r_grid.size() > 1 ? r_grid[1] - r_grid[0] : 0.0; }
  double total_mass_4pi() const { return 4.0 * std::numbers::pi * mass_tilde; }

  /// Hermite interpolation of the Lane-Emden variable (0 beyond R).
  std::pair<double, double> u_at(double r) const {
    if (r < 0.0) throw RangeError("SteadyProfile::u_at: r < 0");
    if (r >= R) return {0.0, du.back()};
    std::size_t j = static_cast<std::size_t>(r / dr());
    if (j >= r_grid.size() - 1) j = r_grid.size() - 2;
    double uu, dd;
    detail::hermite_eval(r_grid[j], r_grid[j + 1], u[j], du[j], u[j + 1], du[j + 1], r,
                         uu, dd);
    return {uu, dd};
  }
  double rho_at(double r) const {
    const double uu = std::max(u_at(r).first, 0.0);
    return std::pow(uu, exponents.alpha_eps);
  }
  double theta_at(double r) const {
    return params.epsilon * exponents.K_bar * std::max(u_at(r).first, 0.0);
  }
};

struct MassPair {
  double mass_tilde;
  double M;  // 4*pi*mass_tilde
};

/// Reduced and 4*pi-normalized total mass by Simpson quadrature of rho r^2.
inline MassPair total_mass(const SteadyProfile& prof) {
  if (prof.r_grid.size() < 3) return {0.0, 0.0};
  std::vector<double> f(prof.r_grid.size());
  for (std::size_t j = 0; j < f.size(); ++j)
    f[j] = prof.rho[j] * prof.r_grid[j] * prof.r_grid[j];
  const double mt = composite_simpson(f, prof.dr());
  return {mt, 4.0 * std::numbers::pi * mt};
}

/// Potential from the algebraic identity theta + eps*psi = const, anchored to
/// the exterior value psi(R) = -mass_tilde/R so that psi matches -mass_tilde/r
/// continuously at the surface. (Normalization: Delta psi = rho, no 4*pi.)
inline void potential_profile(SteadyProfile& prof) {
  prof.psi.resize(prof.r_grid.size());
  const double eps = prof.params.epsilon;
  const double psi_R = -prof.mass_tilde / prof.R;
  for (std::size_t j = 0; j < prof.psi.size(); ++j)
    prof.psi[j] = psi_R - prof.theta[j] / eps;  // theta(R) = 0 anchors the constant
}

/// Build a steady profile for entropy constant S and central Lane-Emden value
/// u0. Throws RegimeError outside 1/6 < epsK < 1.
inline SteadyProfile build_steady_profile(const StarParams& params, double S, double u0,
                                          std::size_t N = 4096) {
  const Regime reg = classify_regime(params);
  if (!regime_exists(reg))
    throw RegimeError("build_steady_profile: no steady state for epsilon*K = " +
                      std::to_string(params.epsK()));
  if (!(u0 > 0.0)) throw DomainError("build_steady_profile: u0 must be > 0");
  const DerivedExponents d = derived_exponents(params, S);

  const LaneEmdenProblem lep{d.alpha_eps, d.K_bar, u0};
  LaneEmdenProfile le = integrate_to_first_zero(lep, N);

  SteadyProfile prof;
  prof.params = params;
  prof.exponents = d;
  prof.r_grid = std::move(le.r_grid);
  prof.u = std::move(le.u);
  prof.du = std::move(le.du);
  prof.R = le.R;
  const double eK = params.epsilon * d.K_bar;  // = S^{1/(1-epsK)}
  prof.rho.resize(prof.u.size());
  prof.theta.resize(prof.u.size());
  for (std::size_t j = 0; j < prof.u.size(); ++j) {
    const double uj = std::max(prof.u[j], 0.0);
    prof.rho[j] = std::pow(uj, d.alpha_eps);
    prof.theta[j] = eK * uj;
  }
  prof.rho_c = prof.rho[0];
  prof.theta_c = prof.theta[0];
  prof.theta_slope_at_R = eK * le.dU_at_R;
  prof.mass_tilde = total_mass(prof).mass_tilde;
  potential_profile(prof);
  return prof;
}

namespace detail {

/// Reduced mass of the alpha=3, coefficient-4 normalization (u0 = 1), i.e.
/// 4(u'' + 2u'/r) + u^3 = 0. Computed once and cached.
inline double critical_mass_m1() {
  static const double m1 = [] {
    const LaneEmdenProblem p{3.0, 4.0, 1.0};
    const LaneEmdenProfile le = integrate_to_first_zero(p, 8192);
    std::vector<double> f(le.u.size());
    for (std::size_t j = 0; j < f.size(); ++j) {
      const double uj = std::max(le.u[j], 0.0);
      f[j] = uj * uj * uj * le.r_grid[j] * le.r_grid[j];
    }
    return 4.0 * std::numbers::pi * composite_simpson(f, le.dr());
  }();
  return m1;
}

}  // namespace detail

/// Critical-mass law at gamma = 4/3: M_c(K_tilde) = K_tilde^{3/2} * M_1.
inline double critical_mass(double K_tilde) {
  if (!(K_tilde > 0.0)) throw DomainError("critical_mass: K_tilde must be > 0");
  return std::pow(K_tilde, 1.5) * detail::critical_mass_m1();
}

/// Homology action rho_s(r) = s^3 rho(sr), theta_s(r) = s theta(sr),
/// psi_s(r) = s psi(sr), R_s = R/s. The reduced mass is invariant.
inline SteadyProfile homology_rescale(const SteadyProfile& prof, double s) {
  if (!(s > 0.0)) throw DomainError("homology_rescale: s must be > 0");
  SteadyProfile out = prof;
  const double ek = prof.params.epsK();
  const double s3 = s * s * s;
  out.R = prof.R / s;
  for (std::size_t j = 0; j < prof.r_grid.size(); ++j) {
    out.r_grid[j] = prof.r_grid[j] / s;
    out.rho[j] = s3 * prof.rho[j];
    out.theta[j] = s * prof.theta[j];
    out.psi[j] = s * prof.psi[j];
  }
  out.rho_c = out.rho[0];
  out.theta_c = out.theta[0];
  out.theta_slope_at_R = s * s * prof.theta_slope_at_R;
  // The entropy constant transforms as S_s = s^{1-4 epsK} S.
  const double S_new = std::pow(s, 1.0 - 4.0 * ek) * prof.exponents.S;
  out.exponents = derived_exponents(prof.params, S_new);
  const double eK_old = prof.params.epsilon * prof.exponents.K_bar;
  const double eK = prof.params.epsilon * out.exponents.K_bar;
  for (std::size_t j = 0; j < out.u.size(); ++j) {
    out.u[j] = out.theta[j] / eK;
    out.du[j] = s * s * eK_old * prof.du[j] / eK;
  }
  out.mass_tilde = total_mass(out).mass_tilde;
  return out;
}

/// Steady profile with prescribed total mass M_target = 4*pi*mass_tilde.
///
/// Away from the critical index the entropy is fixed at S = 1 and the central
/// value is chosen through the scaling mass_tilde ~ u0^{(3-alpha)/2}. At the
/// critical index the mass pins S instead and u0 = 1 is the representative
/// (homology_rescale selects the radius afterwards).
inline SteadyProfile solve_for_mass(const StarParams& params, double M_target,
                                    std::size_t N = 4096) {
  const Regime reg = classify_regime(params);
  if (!regime_exists(reg))
    throw RegimeError("solve_for_mass: no steady state for epsilon*K = " +
                      std::to_string(params.epsK()));
  if (!(M_target > 0.0)) throw DomainError("solve_for_mass: M_target must be > 0");

  if (reg == Regime::Critical) {
    const double S = std::sqrt(M_target / (std::pow(params.K, 1.5) * critical_mass(1.0)));
    return build_steady_profile(params, S, 1.0, N);
  }
  const SteadyProfile ref = build_steady_profile(params, 1.0, 1.0, N);
  const double alpha = ref.exponents.alpha_eps;
  const double target_mt = M_target / (4.0 * std::numbers::pi);
  const double u0 = std::pow(target_mt / ref.mass_tilde, 2.0 / (3.0 - alpha));
  return build_steady_profile(params, 1.0, u0, N);
}

struct BoundaryFit {
  double rho_exponent;           // log-log slope of rho vs sigma = R - r
  double theta_slope_at_R;       // finite, negative
  double theta_over_sigma_limit; // finite, positive
};

/// Least-squares fit of the vacuum-boundary exponents over the outer 5% of
/// the radius (last node excluded). Throws InsufficientResolution if the fit
/// window holds fewer than 16 nodes.
inline BoundaryFit fit_boundary_exponents(const SteadyProfile& prof) {
  const double r_lo = 0.95 * prof.R;
  std::vector<double> lx, ly;
  for (std::size_t j = 0; j + 1 < prof.r_grid.size(); ++j) {
    if (prof.r_grid[j] >= r_lo && prof.rho[j] > 0.0) {
      const double sigma = prof.R - prof.r_grid[j];
      lx.push_back(std::log(sigma));
      ly.push_back(std::log(prof.rho[j]));
    }
  }
  if (lx.size() < 16)
    throw InsufficientResolution("fit_boundary_exponents: only " +
                                 std::to_string(lx.size()) + " nodes in fit window");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double n = static_cast<double>(lx.size());
  BoundaryFit fit;
  fit.rho_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.theta_slope_at_R = prof.theta_slope_at_R;
  const std::size_t last = prof.r_grid.size() - 2;
  fit.theta_over_sigma_limit = prof.theta[last] / (prof.R - prof.r_grid[last]);
  return fit;
}

}  // namespace radstar
