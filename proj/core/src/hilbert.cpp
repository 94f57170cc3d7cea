#include "vpstab/hilbert.hpp"

#include <cmath>
#include <stdexcept>

namespace vpstab {

namespace detail {

double pv_integral_raw(std::span<const double> values, const VelocityGrid& grid, double u,
                       double gu, double gpu) {
  const int n = grid.n();
  const double h = grid.spacing();
  const double near = 1e-4 * h;  // below this, (g(v)-g(u))/(v-u) is replaced by g'(u)
  double s = 0;
  for (int i = 0; i < n; ++i) {
    const double dv = grid.node(i) - u;
    const double f = std::abs(dv) < near ? gpu : (values[i] - gu) / dv;
    s += (i == 0 || i == n - 1) ? 0.5 * f : f;
  }
  s *= h;
  s += gu * std::log(std::abs((grid.v_max() - u) / (grid.v_max() + u)));
  return s;
}

double cauchy_tail_raw(std::span<const double> values, const VelocityGrid& grid, double u) {
  const int n = grid.n();
  double s = 0;
  for (int i = 0; i < n; ++i) {
    const double f = values[i] / (grid.node(i) - u);
    s += (i == 0 || i == n - 1) ? 0.5 * f : f;
  }
  return s * grid.spacing();
}

std::complex<double> cauchy_uhp_raw(std::span<const double> values, const VelocityGrid& grid,
                                    std::complex<double> u, int order) {
  const int n = grid.n();
  std::complex<double> s = 0;
  if (order == 1) {
    for (int i = 0; i < n; ++i) {
      const std::complex<double> f = values[i] / (grid.node(i) - u);
      s += (i == 0 || i == n - 1) ? 0.5 * f : f;
    }
  } else {
    for (int i = 0; i < n; ++i) {
      const std::complex<double> d = grid.node(i) - u;
      const std::complex<double> f = values[i] / (d * d);
      s += (i == 0 || i == n - 1) ? 0.5 * f : f;
    }
  }
  return s * grid.spacing();
}

}  // namespace detail

double pv_hilbert(const SampledFunction& g, double u) {
  if (!(std::abs(u) < g.grid().v_max())) throw std::domain_error("pv_hilbert: |u| must be below v_max");
  return pv_hilbert(g, u, g.value(u), g.derivative(u));
}

double pv_hilbert(const SampledFunction& g, double u, double gu, double gpu) {
  if (!(std::abs(u) < g.grid().v_max())) throw std::domain_error("pv_hilbert: |u| must be below v_max");
  return detail::pv_integral_raw(g.values(), g.grid(), u, gu, gpu) / M_PI;
}

std::complex<double> cauchy_uhp(const SampledFunction& g, std::complex<double> u, int order) {
  if (!(u.imag() > 0))
    throw std::domain_error("cauchy_uhp: Im u must be positive (use pv_hilbert on the boundary)");
  if (order != 1 && order != 2) throw std::invalid_argument("cauchy_uhp: order must be 1 or 2");
  return detail::cauchy_uhp_raw(g.values(), g.grid(), u, order);
}

}  // namespace vpstab
