#pragma once

// Independent test oracles. These deliberately avoid the library's own
// integration machinery: fixed-step RK4 at a much finer step, simple
// trapezoid/linear zero location, and direct quadrature for the potential.

#include <cmath>
#include <cstddef>
#include <vector>

namespace oracles {

struct FirstZero {
  double R;
  double dU;
  double mass_integral;  // integral of u^alpha r^2 dr, from R^2 |u'(R)| K_bar
};

/// Fixed-step RK4 for K_bar(u'' + 2u'/r) + u^alpha = 0, u(0)=u0, series start
/// at r = 1e-3, linear zero location within the bracketing step.
inline FirstZero lane_emden_fine(double alpha, double K_bar, double u0,
                                 double h = 1e-6) {
  const double c = 1.0 / K_bar;
  double r = 1e-3;
  double u = u0 - c * std::pow(u0, alpha) * r * r / 6.0 +
             alpha * c * c * std::pow(u0, 2.0 * alpha - 1.0) * r * r * r * r / 120.0;
  double w = -c * std::pow(u0, alpha) * r / 3.0 +
             alpha * c * c * std::pow(u0, 2.0 * alpha - 1.0) * r * r * r / 30.0;
  const auto f = [&](double rr, double uu, double ww, double& du, double& dw) {
    du = ww;
    dw = -2.0 / rr * ww - c * (uu > 0.0 ? std::pow(uu, alpha) : 0.0);
  };
  for (;;) {
    double k1u, k1w, k2u, k2w, k3u, k3w, k4u, k4w;
    f(r, u, w, k1u, k1w);
    f(r + 0.5 * h, u + 0.5 * h * k1u, w + 0.5 * h * k1w, k2u, k2w);
    f(r + 0.5 * h, u + 0.5 * h * k2u, w + 0.5 * h * k2w, k3u, k3w);
    f(r + h, u + h * k3u, w + h * k3w, k4u, k4w);
    const double un = u + h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    const double wn = w + h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
    r += h;
    if (un <= 0.0) {
      const double frac = u / (u - un);
      FirstZero z;
      z.R = r - h + frac * h;
      z.dU = w + frac * (wn - w);
      z.mass_integral = -z.R * z.R * z.dU * K_bar;
      return z;
    }
    u = un;
    w = wn;
  }
}

/// Potential by direct quadrature: psi(r) = -mt/R - int_r^R m(s)/s^2 ds with
/// m and the outer integral both by the trapezoid rule on the given grid.
inline std::vector<double> potential_fine(const std::vector<double>& r,
                                          const std::vector<double>& rho) {
  const std::size_t n = r.size();
  std::vector<double> m(n, 0.0), psi(n, 0.0);
  for (std::size_t j = 1; j < n; ++j)
    m[j] = m[j - 1] + 0.5 * (r[j] - r[j - 1]) *
                          (rho[j - 1] * r[j - 1] * r[j - 1] + rho[j] * r[j] * r[j]);
  psi[n - 1] = -m[n - 1] / r[n - 1];
  for (std::size_t j = n - 1; j-- > 0;) {
    const double g_hi = m[j + 1] / (r[j + 1] * r[j + 1]);
    const double g_lo = r[j] > 0.0 ? m[j] / (r[j] * r[j]) : 0.0;
    psi[j] = psi[j + 1] - 0.5 * (r[j + 1] - r[j]) * (g_lo + g_hi);
  }
  return psi;
}

}  // namespace oracles
