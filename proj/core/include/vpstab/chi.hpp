#pragma once

#include <complex>
#include <vector>

#include "vpstab/grid.hpp"

namespace vpstab {

/// Parameters of the piecewise-linear destabilizing function chi(v):
/// a steep odd core of half-width eps and slope h/eps, plateaus at +-h of
/// width d, and linear ramps back to zero, all centered at `center`.
/// Support is |v - center| <= 2h + d + eps.
struct ChiParams {
  double h = 0.1;
  double d = 0.1;
  double eps = 0;
  double center = 0;

  /// d = h and eps = e^{-1/h}, guarded against underflow.
  static ChiParams with_defaults(double h, double center = 0);

  /// Same, but eps additionally floored at spacing/4 so a grid-sampled core
  /// stays meaningful after local refinement.
  static ChiParams with_defaults(double h, const VelocityGrid& grid, double center = 0);

  double support_radius() const { return 2 * h + d + eps; }
  bool valid() const { return h > 0 && d > 0 && eps > 0; }
};

/// chi(v) for the given parameters.
double chi(double v, const ChiParams& p);

/// dchi/dv (piecewise constant; at a breakpoint the right-hand value).
double chi_prime(double v, const ChiParams& p);

/// int_{-inf}^{v} chi dv' (an even, compactly supported bump).
double chi_antiderivative(double v, const ChiParams& p);

/// PV integral of chi(v)/(v-u) over the real line, in closed form as a
/// combination of x log x terms. Log singularities are filled by the
/// continuous limit x log x -> 0. Note: no 1/pi factor.
double chi_hilbert(double u, const ChiParams& p);

/// Exact Cauchy integral of chi(v)/(v-u)^order for Im u > 0 (each linear
/// piece integrates in closed form against the kernel).
std::complex<double> chi_cauchy(std::complex<double> u, const ChiParams& p, int order = 1);

/// The W^{1,1} norm of chi: 2h^2 + 2hd + h eps + 4h.
double chi_norm_w11(const ChiParams& p);

/// Breakpoints of chi relative to `center` (sorted), for refined quadrature.
std::vector<double> chi_breakpoints(const ChiParams& p);

}  // namespace vpstab
