// Independent numerical oracles used by the tests. Everything here is kept
// deliberately separate from the library's own quadrature paths: adaptive
// Simpson for integrals, the Dawson function for Gaussian Hilbert transforms,
// and a symmetric-exclusion principal value.
#pragma once

#include <cmath>
#include <functional>
#include <vector>

namespace oracles {

inline double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                          double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6 * (fa + 4 * flm + fm);
  const double right = (b - m) / 6 * (fm + 4 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15 * tol)
    return left + right + (left + right - whole) / 15;
  return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6 * (fa + 4 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

/// Dawson function D(x) = e^{-x^2} int_0^x e^{t^2} dt.
inline double dawson(double x) {
  if (x == 0) return 0;
  const double i = integrate([](double t) { return std::exp(t * t); }, 0, std::abs(x), 1e-14);
  return (x > 0 ? 1 : -1) * std::exp(-x * x) * i;
}

/// H[g'](u) for g(v) = e^{-v^2}: the closed form -(2/sqrt(pi)) (1 - 2 u D(u)).
inline double hilbert_gaussian_prime(double u) {
  return -(2.0 / std::sqrt(M_PI)) * (1.0 - 2.0 * u * dawson(u));
}

/// PV int g(v)/(v-u) dv on [-V, V] by symmetric exclusion plus the leading
/// correction 2 delta g'(u). Independent of the library's subtraction path.
inline double pv_cauchy(const std::function<double(double)>& g,
                        const std::function<double(double)>& gp, double u, double V,
                        double delta = 1e-3) {
  auto f = [&](double v) { return g(v) / (v - u); };
  const double outer = integrate(f, -V, u - delta, 1e-13) + integrate(f, u + delta, V, 1e-13);
  return outer + 2 * delta * gp(u);
}

/// argmax of the Dawson function (where 1 - 2xD(x) changes sign), bisected.
inline double dawson_peak() {
  double a = 0.75, b = 1.0;
  for (int i = 0; i < 60; ++i) {
    const double m = 0.5 * (a + b);
    (1 - 2 * m * dawson(m) > 0 ? a : b) = m;
  }
  return 0.5 * (a + b);
}

}  // namespace oracles
