#pragma once

#include <functional>
#include <vector>

// Small numerics toolbox: bracketed root finding, adaptive quadrature and
// 1-d minimization. Everything is deterministic and exception-based; callers
// are expected to supply valid brackets.
namespace eotk::numerics {

// Brent's method. f(lo) and f(hi) must have opposite signs.
double find_root(const std::function<double(double)>& f, double lo, double hi,
                 double rel_tol = 1e-13, int max_iter = 200);

// Bisection for monotone functions; returns midpoint of the final bracket.
double bisect(const std::function<double(double)>& f, double lo, double hi,
              double rel_tol = 1e-13, int max_iter = 200);

// Adaptive Gauss-Kronrod (G7,K15) on a finite interval. rel_tol is applied
// against the accumulated integral estimate with an absolute floor.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-10, double abs_tol = 0.0, int max_depth = 30);

// Golden-section minimization of a unimodal function on [a, b].
double minimize_golden(const std::function<double(double)>& f, double a, double b,
                       double rel_tol = 1e-10, int max_iter = 200);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};

// Ordinary least squares line through (x, y).
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace eotk::numerics
