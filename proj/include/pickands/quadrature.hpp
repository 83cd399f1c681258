#pragma once

#include <cmath>
#include <stdexcept>

namespace pickands {

namespace detail {

template <class F>
double adapt_simpson(const F& f, double a, double fa, double m, double fm,
                     double b, double fb, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adapt_simpson(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1) +
         adapt_simpson(f, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson with absolute tolerance. Desk-scale workhorse for the
// quadrature oracles and the reflection-principle curve; not a general
// quadrature library.
template <class F>
double integrate(const F& f, double a, double b, double tol = 1e-10,
                 int max_depth = 48) {
  if (!(b >= a)) throw std::invalid_argument("integrate: require b >= a");
  if (!(tol > 0.0)) throw std::invalid_argument("integrate: require tol > 0");
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::adapt_simpson(f, a, fa, m, fm, b, fb, whole, tol, max_depth);
}

// Tensor product of two adaptive passes (outer in x, inner in y).
template <class F>
double integrate2d(const F& f, double ax, double bx, double ay, double by,
                   double tol = 1e-9) {
  const double inner_tol = tol * 1e-2;
  return integrate(
      [&](double x) {
        return integrate([&](double y) { return f(x, y); }, ay, by, inner_tol);
      },
      ax, bx, tol);
}

}  // namespace pickands
