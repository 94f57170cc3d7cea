#pragma once

#include <utility>

#include "vpstab/chi.hpp"
#include "vpstab/dispersion.hpp"
#include "vpstab/equilibrium.hpp"

namespace vpstab {

enum class PerturbationKind { additive_w11, rearrangement, k0_pair, embedded };

/// A perturbed equilibrium together with the W^{1,1} size of the perturbation
/// of f0' (int |delta f0'| + |delta f0''| dv).
struct PerturbedProfile {
  EquilibriumProfile profile;
  EquilibriumProfile base;
  PerturbationKind kind;
  double norm_w11 = 0;
};

/// Area-preserving rearrangement V(v) = v + a s(v) with s the standard
/// compactly supported bump; admissible iff V' = 1 + a s' > 0 everywhere.
struct RearrangementMap {
  double center = 0;
  double radius = 1;
  double amplitude = 0;

  double shape(double v) const;
  double shape_prime(double v) const;
  double shape_second(double v) const;
  double map(double v) const { return v + amplitude * shape(v); }
  double map_prime(double v) const { return 1 + amplitude * shape_prime(v); }
  double map_second(double v) const { return amplitude * shape_second(v); }
  bool admissible_on(const VelocityGrid& g) const;
};

/// Smooth compactly supported bump, amplitude * exp(1 - 1/(1 - x^2)).
struct Bump {
  double center = 0;
  double radius = 1;
  double amplitude = 1;

  double value(double v) const;
  double derivative(double v) const;
};

struct DestabilizeResult {
  PerturbedProfile perturbed;
  StabilityReport before{}, after{};
  int winding_before = 0;
  int winding_after = 0;
  double k_reported = 0;  // a wavenumber inside the reported unstable band
  std::pair<double, double> unstable_k_band{0, 0};
  int zero_count_delta = 0;    // change in the number of zeros of f0'
  double truncation_error = 0; // k0 kind: sup of the tail of delta f0' cut by the window
  double sup_delta_fp = 0;     // measured sup |delta f0'| on the grid
  ChiParams chi_used{};        // additive kinds
};

/// f0(V(v)) for an admissible map; derivatives by the chain rule. The zero
/// count of f0' is invariant (V is a diffeomorphism).
PerturbedProfile rearrange(const EquilibriumProfile& p, const RearrangementMap& map);

/// Additive W^{1,1} destabilization: f0' + chi(.-u0) at a crossing u0 with
/// f0''(u0) < 0 and H[f0'](u0) < 0. eps is tightened (below e^{-1/h}) until
/// the chi Hilbert boost at u0 exceeds pi |H[f0'](u0)| by a unit margin, so
/// the perturbed profile violates the Penrose criterion at u0.
DestabilizeResult destabilize_w11(const EquilibriumProfile& p, double u0, double h);

/// First-order realization of the destabilizing rearrangement at a valley-side
/// crossing vc with f0''(vc) < 0 on a profile with several zeros of f0'.
/// The measured zero-count delta is reported (the exact rearrangement would
/// preserve it; the first-order form adds the documented pair).
DestabilizeResult destabilize_rearrangement(const EquilibriumProfile& p, double vc, double h);

/// k = 0 critical-state destabilization: delta f0' = -H[delta h] for a smooth
/// symmetric bump delta h centered at a point with f0'(u) = H[f0'](u) = 0.
/// The sampled delta is windowed to vanish beyond 3x the bump radius.
DestabilizeResult destabilize_k0(const EquilibriumProfile& p, double u, const Bump& bump);

/// Embedded-mode destabilization: the dynamically accessible delta f = h f0'
/// perturbs f0' by (h f0')', splitting the tangency into transverse crossings.
DestabilizeResult destabilize_embedded(const EquilibriumProfile& p, const Bump& hfunc);

/// Test fixture: a Maxwellian plus a tail Gaussian solved in closed form so
/// that f0'(u*) = f0''(u*) = 0 with pi H[f0'](u*) > 0 (an embedded mode at
/// k* = sqrt(pi H)). Verified via embedded_mode_scan before returning.
EquilibriumProfile make_synthetic_tangency(double base_width, double u_star);

}  // namespace vpstab
