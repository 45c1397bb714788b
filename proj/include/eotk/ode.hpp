#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

// Adaptive embedded Runge-Kutta integrator (Cash-Karp 4/5 pair) for the
// small stiff-free ODE systems in this library. The integrator lands exactly
// on the requested end time, so callers can chain segments across
// discontinuities in the right-hand side.
namespace eotk::ode {

// deriv(t, y, dydt) fills dydt; y and dydt have the same size.
template <typename Deriv>
void integrate(Deriv&& deriv, std::vector<double>& y, double t0, double t1,
               double rel_tol = 1e-8, double abs_tol = 1e-30) {
  if (!(t1 > t0)) {
    if (t1 == t0) return;
    throw std::invalid_argument("ode::integrate: end time precedes start time");
  }
  static constexpr double a2 = 0.2, a3 = 0.3, a4 = 0.6, a5 = 1.0, a6 = 0.875;
  static constexpr double b21 = 0.2;
  static constexpr double b31 = 3.0 / 40.0, b32 = 9.0 / 40.0;
  static constexpr double b41 = 0.3, b42 = -0.9, b43 = 1.2;
  static constexpr double b51 = -11.0 / 54.0, b52 = 2.5, b53 = -70.0 / 27.0,
                          b54 = 35.0 / 27.0;
  static constexpr double b61 = 1631.0 / 55296.0, b62 = 175.0 / 512.0,
                          b63 = 575.0 / 13824.0, b64 = 44275.0 / 110592.0,
                          b65 = 253.0 / 4096.0;
  static constexpr double c1 = 37.0 / 378.0, c3 = 250.0 / 621.0, c4 = 125.0 / 594.0,
                          c6 = 512.0 / 1771.0;
  static constexpr double d1 = c1 - 2825.0 / 27648.0, d3 = c3 - 18575.0 / 48384.0,
                          d4 = c4 - 13525.0 / 55296.0, d5 = -277.0 / 14336.0,
                          d6 = c6 - 0.25;

  const std::size_t n = y.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), yt(n), ynew(n);
  double t = t0;
  double h = (t1 - t0) / 64.0;
  const double h_min = 1e-14 * (t1 - t0);

  while (t < t1) {
    h = std::min(h, t1 - t);
    deriv(t, y, k1);
    for (std::size_t i = 0; i < n; ++i) yt[i] = y[i] + h * b21 * k1[i];
    deriv(t + a2 * h, yt, k2);
    for (std::size_t i = 0; i < n; ++i) yt[i] = y[i] + h * (b31 * k1[i] + b32 * k2[i]);
    deriv(t + a3 * h, yt, k3);
    for (std::size_t i = 0; i < n; ++i) {
      yt[i] = y[i] + h * (b41 * k1[i] + b42 * k2[i] + b43 * k3[i]);
    }
    deriv(t + a4 * h, yt, k4);
    for (std::size_t i = 0; i < n; ++i) {
      yt[i] = y[i] + h * (b51 * k1[i] + b52 * k2[i] + b53 * k3[i] + b54 * k4[i]);
    }
    deriv(t + a5 * h, yt, k5);
    for (std::size_t i = 0; i < n; ++i) {
      yt[i] = y[i] + h * (b61 * k1[i] + b62 * k2[i] + b63 * k3[i] + b64 * k4[i] +
                          b65 * k5[i]);
    }
    deriv(t + a6 * h, yt, k6);

    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      ynew[i] = y[i] + h * (c1 * k1[i] + c3 * k3[i] + c4 * k4[i] + c6 * k6[i]);
      const double ei =
          h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i]);
      const double scale = abs_tol + rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err = std::max(err, std::abs(ei) / scale);
    }

    if (err <= 1.0) {
      t += h;
      y = ynew;
      const double grow = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
      h *= std::clamp(grow, 0.2, 5.0);
    } else {
      h *= std::clamp(0.9 * std::pow(err, -0.25), 0.1, 0.9);
      if (h < h_min) {
        throw std::runtime_error("ode::integrate: step size collapsed at t = " +
                                 std::to_string(t));
      }
    }
  }
}

}  // namespace eotk::ode
