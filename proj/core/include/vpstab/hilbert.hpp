#pragma once

#include <complex>
#include <span>

#include "vpstab/grid.hpp"

namespace vpstab {

/// Hilbert transform H[g](u) = (1/pi) PV int g(v)/(v-u) dv on the truncated
/// domain [-v_max, v_max], by singularity subtraction:
///   PV int g/(v-u) = int (g(v)-g(u))/(v-u) dv + g(u) log|(v_max-u)/(v_max+u)|
/// with the removable point filled by g'(u). Composite trapezoid on the grid.
/// Requires |u| < v_max.
double pv_hilbert(const SampledFunction& g, double u);

/// Same with g(u), g'(u) supplied (avoids interpolation when they are known).
double pv_hilbert(const SampledFunction& g, double u, double gu, double gpu);

/// int g(v)/(v-u)^order dv for Im u > 0, order in {1,2}; plain trapezoid
/// (the path never meets the pole).
std::complex<double> cauchy_uhp(const SampledFunction& g, std::complex<double> u, int order = 1);

namespace detail {
/// PV integral (no 1/pi) over raw samples; node index ju < 0 means u is not a
/// node. Used by the dispersion kernels where g(u), g'(u) are precomputed.
double pv_integral_raw(std::span<const double> values, const VelocityGrid& grid, double u,
                       double gu, double gpu);

/// Plain trapezoid of g(v)/(v-u) for real u with |u| > v_max (no singularity).
double cauchy_tail_raw(std::span<const double> values, const VelocityGrid& grid, double u);

std::complex<double> cauchy_uhp_raw(std::span<const double> values, const VelocityGrid& grid,
                                    std::complex<double> u, int order);
}  // namespace detail

}  // namespace vpstab
