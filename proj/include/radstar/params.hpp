#pragma once

#include <cmath>
#include <string>

#include "radstar/errors.hpp"

namespace radstar {

/// Physical constants of the radiational gas star model.
///
/// K is the ideal-gas constant in P = K*rho*theta, epsilon the uniform rate
/// of energy generation, c_nu the specific heat, mu/lambda_visc the shear
/// and bulk viscosities, and iota the viscous switch (0 inviscid, 1 viscous).
struct StarParams {
  double K = 1.0;
  double epsilon = 0.5;
  double c_nu = 1.0;
  double mu = 0.0;
  double lambda_visc = 0.0;
  int iota = 0;

  double epsK() const { return epsilon * K; }

  void validate() const {
    if (!(K > 0.0)) throw DomainError("StarParams: K must be > 0");
    if (!(epsilon > 0.0)) throw DomainError("StarParams: epsilon must be > 0");
    if (!(c_nu > 0.0)) throw DomainError("StarParams: c_nu must be > 0");
    if (mu < 0.0 || lambda_visc < 0.0)
      throw DomainError("StarParams: viscosities must be >= 0");
    if (iota != 0 && iota != 1) throw DomainError("StarParams: iota must be 0 or 1");
    if (iota == 1 && !(mu > 0.0))
      throw DomainError("StarParams: viscous case requires mu > 0");
  }
};

/// Exponents and constants of the Lane-Emden reduction.
///
/// gamma_eps = 1/(1-epsK) is the effective adiabatic exponent,
/// alpha_eps = (1-epsK)/epsK the polytropic index, S the entropy-like
/// constant rho^{-epsK} theta^{1-epsK}, and K_bar = S^{1/(1-epsK)}/epsilon
/// the coefficient of the reduced ODE.
struct DerivedExponents {
  double gamma_eps;
  double alpha_eps;
  double S;
  double K_bar;
};

/// Existence regime of the steady problem as a function of epsK.
enum class Regime {
  Subcritical,     // 1/6 < epsK < 1/4
  Critical,        // epsK = 1/4
  Supercritical,   // 1/4 < epsK < 1
  NoSolutionLow,   // epsK <= 1/6
  NoSolutionHigh,  // epsK >= 1
};

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::Subcritical: return "Subcritical";
    case Regime::Critical: return "Critical";
    case Regime::Supercritical: return "Supercritical";
    case Regime::NoSolutionLow: return "NoSolutionLow";
    case Regime::NoSolutionHigh: return "NoSolutionHigh";
  }
  return "?";
}

inline constexpr double kCriticalTol = 1e-12;

/// Bucket epsilon*K into the existence partition. Total on valid params.
/// The comparison against 1/4 is made up to a relative tolerance so that the
/// critical-mass branch is selected deterministically from user input.
inline Regime classify_regime(const StarParams& p) {
  p.validate();
  const double ek = p.epsK();
  if (ek >= 1.0) return Regime::NoSolutionHigh;
  if (ek <= 1.0 / 6.0) return Regime::NoSolutionLow;
  if (std::abs(ek - 0.25) <= kCriticalTol * std::max(1.0, ek)) return Regime::Critical;
  return ek < 0.25 ? Regime::Subcritical : Regime::Supercritical;
}

inline bool regime_exists(Regime r) {
  return r == Regime::Subcritical || r == Regime::Critical || r == Regime::Supercritical;
}

/// Derived exponents for a given entropy constant S.
/// Throws RegimeError unless 1/6 < epsK < 1.
inline DerivedExponents derived_exponents(const StarParams& p, double S) {
  p.validate();
  if (!(S > 0.0)) throw DomainError("derived_exponents: S must be > 0");
  const double ek = p.epsK();
  if (!(ek > 1.0 / 6.0 && ek < 1.0))
    throw RegimeError("derived_exponents: epsilon*K = " + std::to_string(ek) +
                      " outside (1/6, 1)");
  DerivedExponents d;
  d.gamma_eps = 1.0 / (1.0 - ek);
  d.alpha_eps = (1.0 - ek) / ek;
  d.S = S;
  d.K_bar = std::pow(S, 1.0 / (1.0 - ek)) / p.epsilon;
  return d;
}

/// Entropy constant from central data: S = rho_c^{-epsK} * theta_c^{1-epsK}.
inline double entropy_from_central(const StarParams& p, double rho_c, double theta_c) {
  p.validate();
  if (!(rho_c > 0.0) || !(theta_c > 0.0))
    throw DomainError("entropy_from_central: central data must be positive");
  const double ek = p.epsK();
  return std::pow(rho_c, -ek) * std::pow(theta_c, 1.0 - ek);
}

}  // namespace radstar
