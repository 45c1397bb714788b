#include "eotk/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace eotk::numerics {

double find_root(const std::function<double(double)>& f, double lo, double hi,
                 double rel_tol, int max_iter) {
  double a = lo, b = hi;
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) {
    throw std::invalid_argument("find_root: endpoints do not bracket a root");
  }
  double c = a, fc = fa;
  double d = b - a, e = d;
  for (int it = 0; it < max_iter; ++it) {
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol = 2.0 * rel_tol * std::max(1.0, std::abs(b)) * 0.5;
    const double m = 0.5 * (c - b);
    if (std::abs(m) <= tol || fb == 0.0) return b;
    if (std::abs(e) < tol || std::abs(fa) <= std::abs(fb)) {
      d = m; e = m;  // bisection
    } else {
      double p, q;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        const double qq = fa / fc, r = fb / fc;
        p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q; else p = -p;
      if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
        e = d; d = p / q;  // accept interpolation
      } else {
        d = m; e = m;
      }
    }
    a = b; fa = fb;
    b += (std::abs(d) > tol) ? d : (m > 0.0 ? tol : -tol);
    fb = f(b);
    if ((fb > 0.0) == (fc > 0.0)) { c = a; fc = fa; }
  }
  return b;
}

double bisect(const std::function<double(double)>& f, double lo, double hi,
              double rel_tol, int max_iter) {
  double flo = f(lo);
  if (flo == 0.0) return lo;
  double fhi = f(hi);
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw std::invalid_argument("bisect: endpoints do not bracket a root");
  }
  for (int it = 0; it < max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) { lo = mid; flo = fm; }
    else { hi = mid; }
    if (hi - lo <= rel_tol * std::max(1.0, std::abs(mid))) break;
  }
  return 0.5 * (lo + hi);
}

namespace {

// Kronrod 15-point nodes/weights on [-1, 1] and the embedded Gauss-7 weights.
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct PanelResult {
  double kronrod;
  double err;
};

PanelResult gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * kXgk[i]);
    fv[14 - i] = f(c + h * kXgk[i]);
  }
  fv[7] = f(c);
  double resk = 0.0, resg = 0.0;
  for (int i = 0; i < 7; ++i) resk += kWgk[i] * (fv[i] + fv[14 - i]);
  resk += kWgk[7] * fv[7];
  for (int i = 0; i < 3; ++i) resg += kWg[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
  resg += kWg[3] * fv[7];
  return {resk * h, std::abs((resk - resg) * h)};
}

struct AdaptState {
  const std::function<double(double)>* f;
  double rel_tol;
  double abs_tol;
  double scale;  // running magnitude estimate for the relative test
};

double adapt(AdaptState& st, double a, double b, const PanelResult& whole, int depth) {
  const double tol = std::max(st.abs_tol, st.rel_tol * std::max(st.scale, std::abs(whole.kronrod)));
  if (whole.err <= tol || depth <= 0) return whole.kronrod;
  const double m = 0.5 * (a + b);
  const PanelResult left = gk15(*st.f, a, m);
  const PanelResult right = gk15(*st.f, m, b);
  return adapt(st, a, m, left, depth - 1) + adapt(st, m, b, right, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol, double abs_tol, int max_depth) {
  if (a == b) return 0.0;
  AdaptState st{&f, rel_tol, abs_tol, 0.0};
  const PanelResult whole = gk15(f, a, b);
  st.scale = std::abs(whole.kronrod);
  return adapt(st, a, b, whole, max_depth);
}

double minimize_golden(const std::function<double(double)>& f, double a, double b,
                       double rel_tol, int max_iter) {
  constexpr double invphi = 0.6180339887498949;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < max_iter; ++it) {
    if (b - a <= rel_tol * std::max(1.0, std::abs(a) + std::abs(b))) break;
    if (f1 < f2) {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("fit_line: need at least two matching points");
  }
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i]; sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("fit_line: degenerate abscissa");
  LinearFit out;
  out.slope = (n * sxy - sx * sy) / denom;
  out.intercept = (sy - out.slope * sx) / n;
  return out;
}

}  // namespace eotk::numerics
