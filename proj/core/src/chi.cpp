#include "vpstab/chi.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vpstab {

namespace {

double xlogx(double x) { return x == 0 ? 0.0 : x * std::log(std::abs(x)); }

// Linear pieces of chi on its support: value = a + b*(v - center).
struct Piece {
  double v1, v2;  // relative to center
  double a, b;
};

std::vector<Piece> pieces(const ChiParams& p) {
  const double B = p.support_radius();
  const double ramp0 = p.h + p.d / 2 + p.eps / 2;
  return {
      {-B, -(p.d + p.eps), -ramp0, -0.5},
      {-(p.d + p.eps), -p.eps, -p.h, 0.0},
      {-p.eps, p.eps, 0.0, p.h / p.eps},
      {p.eps, p.d + p.eps, p.h, 0.0},
      {p.d + p.eps, B, ramp0, -0.5},
  };
}

}  // namespace

ChiParams ChiParams::with_defaults(double h, double center) {
  if (!(h > 0)) throw std::invalid_argument("chi: h must be positive");
  ChiParams p;
  p.h = h;
  p.d = h;
  p.eps = std::max(std::exp(-1.0 / h), 1e-300);
  p.center = center;
  return p;
}

ChiParams ChiParams::with_defaults(double h, const VelocityGrid& grid, double center) {
  ChiParams p = with_defaults(h, center);
  p.eps = std::max(p.eps, grid.spacing() / 4);
  return p;
}

double chi(double v, const ChiParams& p) {
  const double x = v - p.center;
  const double ax = std::abs(x);
  if (ax < p.eps) return p.h * x / p.eps;
  if (ax <= p.d + p.eps) return p.h * (x > 0 ? 1.0 : -1.0);
  if (ax <= p.support_radius()) {
    const double ramp = p.h + p.d / 2 + p.eps / 2 - ax / 2;
    return x > 0 ? ramp : -ramp;
  }
  return 0.0;
}

double chi_prime(double v, const ChiParams& p) {
  const double ax = std::abs(v - p.center);
  if (ax < p.eps) return p.h / p.eps;
  if (ax <= p.d + p.eps) return 0.0;
  if (ax <= p.support_radius()) return -0.5;
  return 0.0;
}

double chi_antiderivative(double v, const ChiParams& p) {
  const double x = v - p.center;
  const double B = p.support_radius();
  if (x <= -B) return 0.0;
  double acc = 0.0;
  for (const Piece& q : pieces(p)) {
    const double hi = std::min(x, q.v2);
    if (hi <= q.v1) break;
    acc += q.a * (hi - q.v1) + q.b * (hi * hi - q.v1 * q.v1) / 2;
  }
  return acc;
}

double chi_hilbert(double u, const ChiParams& p) {
  const double x = u - p.center;
  const double h = p.h, d = p.d, e = p.eps;
  double s = (h / e) * (xlogx(x - e) - xlogx(x + e));
  s += -0.5 * xlogx(d + x + e) - 0.5 * xlogx(d - x + e);
  s += 0.5 * xlogx(d + x + e + 2 * h) + 0.5 * xlogx(d - x + e + 2 * h);
  return s;
}

std::complex<double> chi_cauchy(std::complex<double> u, const ChiParams& p, int order) {
  if (!(u.imag() > 0)) throw std::domain_error("chi_cauchy: Im u must be positive");
  if (order != 1 && order != 2) throw std::invalid_argument("chi_cauchy: order must be 1 or 2");
  const std::complex<double> x = u - p.center;
  std::complex<double> s = 0;
  for (const Piece& q : pieces(p)) {
    const std::complex<double> l1 = std::log(q.v1 - x);
    const std::complex<double> l2 = std::log(q.v2 - x);
    if (order == 1) {
      s += q.b * (q.v2 - q.v1) + (q.a + q.b * x) * (l2 - l1);
    } else {
      s += q.b * (l2 - l1) + (q.a + q.b * x) * (1.0 / (q.v1 - x) - 1.0 / (q.v2 - x));
    }
  }
  return s;
}

double chi_norm_w11(const ChiParams& p) {
  return 2 * p.h * p.h + 2 * p.h * p.d + p.h * p.eps + 4 * p.h;
}

std::vector<double> chi_breakpoints(const ChiParams& p) {
  const double B = p.support_radius();
  return {-B, -(p.d + p.eps), -p.eps, 0.0, p.eps, p.d + p.eps, B};
}

}  // namespace vpstab
