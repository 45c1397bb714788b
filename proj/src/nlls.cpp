#include "eotk/nlls.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace eotk::nlls {

namespace {

// Cholesky factorization A = L L^T of a symmetric positive-definite matrix
// stored dense row-major. Returns false when A is not positive definite.
bool cholesky(std::vector<double>& a, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j * n + j];
    for (std::size_t k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
    if (!(d > 0.0)) return false;
    const double ljj = std::sqrt(d);
    a[j * n + j] = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
      a[i * n + j] = s / ljj;
    }
  }
  return true;
}

// Solve L L^T x = b in place given the factor from cholesky().
void cholesky_solve(const std::vector<double>& l, std::size_t n, std::vector<double>& b) {
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= l[i * n + k] * b[k];
    b[i] = s / l[i * n + i];
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= l[k * n + ii] * b[k];
    b[ii] = s / l[ii * n + ii];
  }
}

double cost_of(const std::vector<double>& r) {
  double c = 0.0;
  for (double v : r) c += v * v;
  return c;
}

}  // namespace

Result fit(const Problem& prob, std::vector<double> start, const Options& opts) {
  if (!prob.residuals) throw std::invalid_argument("nlls::fit: residual function missing");
  const std::size_t n = start.size();
  if (n == 0) throw std::invalid_argument("nlls::fit: empty parameter vector");
  const bool bounded = !prob.lower.empty() || !prob.upper.empty();
  if (bounded && (prob.lower.size() != n || prob.upper.size() != n)) {
    throw std::invalid_argument("nlls::fit: bounds must match the parameter count");
  }
  if (!prob.fixed.empty() && prob.fixed.size() != n) {
    throw std::invalid_argument("nlls::fit: fixed mask must match the parameter count");
  }

  const double neg_inf = -std::numeric_limits<double>::infinity();
  const double pos_inf = std::numeric_limits<double>::infinity();
  const auto lo = [&](std::size_t j) { return bounded ? prob.lower[j] : neg_inf; };
  const auto hi = [&](std::size_t j) { return bounded ? prob.upper[j] : pos_inf; };
  const auto clamp = [&](std::vector<double>& p) {
    for (std::size_t j = 0; j < n; ++j) p[j] = std::min(std::max(p[j], lo(j)), hi(j));
  };
  clamp(start);

  std::vector<std::size_t> free_idx;
  for (std::size_t j = 0; j < n; ++j) {
    if (prob.fixed.empty() || !prob.fixed[j]) free_idx.push_back(j);
  }
  const std::size_t nf = free_idx.size();
  if (nf == 0) throw std::invalid_argument("nlls::fit: every parameter is fixed");

  Result out;
  out.params = start;
  std::vector<double> r = prob.residuals(out.params);
  const std::size_t m = r.size();
  if (m < nf) throw std::invalid_argument("nlls::fit: fewer residuals than free parameters");
  out.cost = cost_of(r);

  // Jacobian restricted to the free parameters, row-major m x nf. Finite
  // differences reuse `r`, the residual at p, as the base point.
  std::vector<double> jac(m * nf);
  const auto eval_jacobian = [&](const std::vector<double>& p) {
    if (prob.jacobian) {
      const std::vector<double> full = prob.jacobian(p);
      if (full.size() != m * n) {
        throw std::invalid_argument("nlls::fit: jacobian shape mismatch");
      }
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t c = 0; c < nf; ++c) jac[i * nf + c] = full[i * n + free_idx[c]];
      }
      return;
    }
    std::vector<double> pt = p;
    for (std::size_t c = 0; c < nf; ++c) {
      const std::size_t j = free_idx[c];
      double h = opts.fd_step * std::max(std::abs(p[j]), 1.0);
      if (p[j] + h > hi(j)) h = -h;  // step inward when sitting on the upper face
      pt[j] = p[j] + h;
      const std::vector<double> rt = prob.residuals(pt);
      pt[j] = p[j];
      const double inv_h = 1.0 / h;
      for (std::size_t i = 0; i < m; ++i) jac[i * nf + c] = (rt[i] - r[i]) * inv_h;
    }
  };

  double lambda = 1e-3;
  std::vector<double> jtj(nf * nf), jtr(nf), a(nf * nf), step(nf);
  bool jacobian_fresh = false;
  for (out.iterations = 0; out.iterations < opts.max_iter; ++out.iterations) {
    if (!jacobian_fresh) {
      eval_jacobian(out.params);
      std::fill(jtj.begin(), jtj.end(), 0.0);
      std::fill(jtr.begin(), jtr.end(), 0.0);
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t c = 0; c < nf; ++c) {
          const double jic = jac[i * nf + c];
          jtr[c] += jic * r[i];
          for (std::size_t d = c; d < nf; ++d) jtj[c * nf + d] += jic * jac[i * nf + d];
        }
      }
      for (std::size_t c = 0; c < nf; ++c) {
        for (std::size_t d = 0; d < c; ++d) jtj[c * nf + d] = jtj[d * nf + c];
      }
      jacobian_fresh = true;
    }

    a = jtj;
    for (std::size_t c = 0; c < nf; ++c) {
      a[c * nf + c] += lambda * std::max(jtj[c * nf + c], 1e-30);
    }
    for (std::size_t c = 0; c < nf; ++c) step[c] = -jtr[c];
    if (!cholesky(a, nf)) {
      lambda *= 10.0;
      if (lambda > 1e14) break;
      continue;
    }
    cholesky_solve(a, nf, step);

    std::vector<double> trial = out.params;
    for (std::size_t c = 0; c < nf; ++c) trial[free_idx[c]] += step[c];
    clamp(trial);
    const std::vector<double> rt = prob.residuals(trial);
    const double trial_cost = cost_of(rt);

    if (trial_cost < out.cost) {
      double max_rel_step = 0.0;
      for (std::size_t c = 0; c < nf; ++c) {
        const std::size_t j = free_idx[c];
        max_rel_step = std::max(max_rel_step, std::abs(trial[j] - out.params[j]) /
                                                  std::max(std::abs(out.params[j]), 1.0));
      }
      const double drop = out.cost - trial_cost;
      out.params = trial;
      r = rt;
      out.cost = trial_cost;
      lambda = std::max(lambda * 0.35, 1e-12);
      jacobian_fresh = false;
      if (drop <= opts.cost_tol * std::max(out.cost, 1e-300) ||
          max_rel_step <= opts.step_tol) {
        out.converged = true;
        break;
      }
    } else {
      lambda *= 10.0;
      if (lambda > 1e14) {
        // No descent direction left at machine scale: accept the point as a
        // stationary solution rather than flagging an error.
        out.converged = true;
        break;
      }
    }
  }

  // Covariance-based standard errors from the final Jacobian.
  eval_jacobian(out.params);
  std::fill(jtj.begin(), jtj.end(), 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t c = 0; c < nf; ++c) {
      for (std::size_t d = c; d < nf; ++d) {
        jtj[c * nf + d] += jac[i * nf + c] * jac[i * nf + d];
      }
    }
  }
  for (std::size_t c = 0; c < nf; ++c) {
    for (std::size_t d = 0; d < c; ++d) jtj[c * nf + d] = jtj[d * nf + c];
  }
  out.stderrs.assign(n, 0.0);
  a = jtj;
  if (cholesky(a, nf)) {
    const double dof = static_cast<double>(m > nf ? m - nf : 1);
    const double sigma2 = out.cost / dof;
    // Invert via nf solves against unit vectors; only the diagonal is kept.
    std::vector<double> e(nf);
    for (std::size_t c = 0; c < nf; ++c) {
      std::fill(e.begin(), e.end(), 0.0);
      e[c] = 1.0;
      cholesky_solve(a, nf, e);
      out.stderrs[free_idx[c]] = std::sqrt(std::max(e[c], 0.0) * sigma2);
    }
  } else {
    out.degenerate = true;
  }

  if (bounded) {
    // Steps are clamped by projection, so a pinned parameter sits exactly on its
    // bound; the tolerance only has to absorb rounding.  It must scale with the
    // parameter and the bound themselves, not with the box width: one-sided boxes
    // use a huge sentinel for the open side, and a width-relative tolerance would
    // mark every value as touching a zero bound.
    const auto near_bound = [](double p, double b) {
      return std::abs(p - b) <= 1e-9 * std::max(std::abs(p), std::abs(b));
    };
    for (std::size_t c = 0; c < nf; ++c) {
      const std::size_t j = free_idx[c];
      if (std::isfinite(lo(j)) && near_bound(out.params[j], lo(j))) out.at_bound = true;
      if (std::isfinite(hi(j)) && near_bound(out.params[j], hi(j))) out.at_bound = true;
    }
  }
  return out;
}

}  // namespace eotk::nlls
