#include "rwrs/quadrature.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rwrs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double simpson_rec(const std::function<double(double)>& f, double a, double fa,
                   double b, double fb, double m, double fm, double whole,
                   double tol, int depth) {
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double rel_tol) {
  double m = 0.5 * (a + b);
  double fa = f(a), fb = f(b), fm = f(m);
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  double scale = std::abs(whole) + std::abs(b - a) * (std::abs(fm) + 1e-300);
  return simpson_rec(f, a, fa, b, fb, m, fm, whole,
                     rel_tol * (scale > 0 ? scale : 1.0), 48);
}

double log_integral_exp(const std::function<double(double)>& phi, double lo,
                        double hi, double guess, double rel_tol) {
  // Bracket the maximum around guess, walking outward geometrically but never
  // past the domain bounds.
  auto clamp = [&](double t) { return t < lo ? lo : (t > hi ? hi : t); };
  double step = 1.0;
  double m = clamp(guess), fm = phi(m);
  double a = clamp(m - step), b = clamp(m + step);
  double fa = phi(a), fb = phi(b);
  for (int i = 0; i < 400 && (fa > fm || fb > fm); ++i) {
    if (fa > fm) {
      b = m;
      fb = fm;
      m = a;
      fm = fa;
      step *= 2.0;
      a = clamp(m - step);
      fa = phi(a);
    } else {
      a = m;
      fa = fm;
      m = b;
      fm = fb;
      step *= 2.0;
      b = clamp(m + step);
      fb = phi(b);
    }
  }
  // Golden-section refinement of the peak.
  const double gr = 0.6180339887498949;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = phi(x1), f2 = phi(x2);
  for (int i = 0; i < 200 && (b - a) > 1e-11 * (1.0 + std::abs(a) + std::abs(b));
       ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = phi(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = phi(x1);
    }
  }
  double peak = 0.5 * (a + b);
  double fpeak = phi(peak);

  // Cutoffs where the integrand has dropped by ~50 nats.
  const double drop = 50.0;
  auto find_cut = [&](int dir) {
    double bound = dir < 0 ? lo : hi;
    double t = peak, s = 1.0;
    for (int i = 0; i < 300; ++i) {
      double cand = peak + dir * s;
      bool clipped = false;
      if (std::isfinite(bound) &&
          ((dir < 0 && cand < bound) || (dir > 0 && cand > bound))) {
        cand = bound;
        clipped = true;
      }
      if (phi(cand) < fpeak - drop) {
        double in = t, out = cand;
        for (int j = 0; j < 60; ++j) {
          double mid = 0.5 * (in + out);
          if (phi(mid) < fpeak - drop)
            out = mid;
          else
            in = mid;
        }
        return out;
      }
      if (clipped) return bound;
      t = cand;
      s *= 2.0;
    }
    return t;
  };
  double cut_lo = find_cut(-1);
  double cut_hi = find_cut(+1);
  if (!(cut_hi > cut_lo)) throw std::runtime_error("log_integral_exp: empty range");

  auto g = [&](double t) { return std::exp(phi(t) - fpeak); };
  // Split at the peak so the kink of |t|^alpha-type integrands sits on a node.
  double integral = adaptive_simpson(g, cut_lo, peak, rel_tol) +
                    adaptive_simpson(g, peak, cut_hi, rel_tol);
  return fpeak + std::log(integral);
}

double log_gamma_q(double a, double x) {
  if (a <= 0.0) throw std::invalid_argument("log_gamma_q: a must be > 0");
  if (x < 0.0) throw std::invalid_argument("log_gamma_q: x must be >= 0");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) {
    // Series for P(a, x), then Q = 1 - P.
    double ap = a;
    double term = 1.0 / a;
    double sum = term;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    double log_p = -x + a * std::log(x) - std::lgamma(a) + std::log(sum);
    double p = std::exp(log_p);
    if (p >= 1.0) return -kInf;
    return std::log1p(-p);
  }
  // Lentz continued fraction for Q(a, x).
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return -x + a * std::log(x) - std::lgamma(a) + std::log(h);
}

}  // namespace rwrs
