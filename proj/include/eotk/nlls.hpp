#pragma once

#include <functional>
#include <vector>

// Small dense Levenberg-Marquardt least-squares solver with box constraints,
// a fixed-parameter mask and covariance-based standard errors. Sized for the
// handful-of-parameters fits in this library, not for large problems.
namespace eotk::nlls {

// Residual vector r(p); the fit minimizes sum r_i^2.
using ResidualFn = std::function<std::vector<double>(const std::vector<double>&)>;

// Optional analytic Jacobian, row-major m x n with J[i*n + j] = dr_i/dp_j.
// When absent the solver falls back to forward finite differences.
using JacobianFn = std::function<std::vector<double>(const std::vector<double>&)>;

struct Options {
  int max_iter = 500;
  double cost_tol = 1e-10;  // relative cost-change convergence threshold
  double step_tol = 1e-12;  // relative parameter-step convergence threshold
  double fd_step = 1e-7;    // relative forward-difference step
};

struct Problem {
  ResidualFn residuals;
  JacobianFn jacobian;               // leave empty for finite differences
  std::vector<double> lower, upper;  // box constraints; empty means unbounded
  std::vector<char> fixed;           // nonzero entries hold that parameter
};

struct Result {
  std::vector<double> params;
  std::vector<double> stderrs;  // zero for fixed parameters
  double cost = 0.0;            // sum of squared residuals at the solution
  int iterations = 0;
  bool converged = false;
  bool at_bound = false;    // some free parameter ended on a box face
  bool degenerate = false;  // normal matrix was singular; stderrs unreliable
};

Result fit(const Problem& prob, std::vector<double> start, const Options& opts = Options{});

}  // namespace eotk::nlls
