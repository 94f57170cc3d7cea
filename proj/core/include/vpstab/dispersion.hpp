#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "vpstab/equilibrium.hpp"

namespace vpstab {

struct DispersionSample {
  double u;
  std::complex<double> eps;
};

/// Image of the (compactified) real u-line under eps(k, u + i0), sampled over
/// the velocity grid, extended along the tails until |eps - 1| < 1e-3, and
/// closed through the point eps = 1 (u = +-infinity).
struct PenroseContour {
  double k = 0;
  std::vector<DispersionSample> samples;
  std::complex<double> closure{1.0, 0.0};
};

struct Violation {
  double u;
  double pv;  // PV int f0'/(v-u) dv = pi H[f0'](u)
};

struct PerKResult {
  double k;
  int winding = 0;
  std::vector<std::complex<double>> roots;  // u with Im u > 0
  bool origin_touch = false;     // contour landed on the origin (critical k)
  bool roots_unresolved = false; // Nyquist count > 0 but Newton could not pin
                                 // roots hugging the axis below grid resolution
};

struct EmbeddedMode {
  double u;
  double k;
};

struct StabilityReport {
  enum class Verdict { stable, unstable };
  Verdict verdict = Verdict::stable;
  std::vector<Violation> violations;
  std::vector<std::pair<double, double>> unstable_k_bands;  // (0, sqrt(pv)) per violation
  std::vector<PerKResult> per_k;
  std::vector<EmbeddedMode> embedded_modes;  // critical states (k != 0)
  std::vector<double> k0_points;             // critical states (k = 0)

  bool unstable() const { return verdict == Verdict::unstable; }
  bool critical() const { return !embedded_modes.empty() || !k0_points.empty(); }
};

enum class SpectrumClass { point, continuous, residual, resolvent };

/// H[f0'](u) for the full profile: quadrature for the sampled part plus
/// closed forms for chi terms.
double hilbert_f0p(const EquilibriumProfile& p, double u);

/// int f0'(v)/(v-u)^order dv for Im u > 0.
std::complex<double> cauchy_f0p(const EquilibriumProfile& p, std::complex<double> u,
                                int order = 1);

/// Boundary value eps(k, u + i0) = 1 - (pi/k^2) (H[f0'](u) + i f0'(u)).
std::complex<double> epsilon_boundary(const EquilibriumProfile& p, double k, double u);

/// Winding number of a closed contour about the origin by accumulated
/// argument. Throws CriticalContourError when a sample sits within 1e-12 of
/// the origin, InvariantViolationError when the accumulation is ambiguous.
int winding_number(const PenroseContour& c);

/// Winding number from the crossing sum: over crossings u of f0' with
/// eps_re(k,u) < 0, +1 when f0' crosses upward, -1 downward, 0 for tangencies.
int winding_by_crossings(const EquilibriumProfile& p, double k);

/// Penrose criterion: unstable iff some crossing u has pv = pi H[f0'](u) > 0.
/// Crossings with |pv| below 1e-8 of the crossing scale are routed to the
/// k0-critical list instead of deciding the verdict.
StabilityReport penrose_test(const EquilibriumProfile& p);

/// Tangency points with pi H[f0'](u) > 0 paired with k = sqrt(pi H), so that
/// eps(k, u) = 0 exactly on the real axis.
std::vector<EmbeddedMode> embedded_mode_scan(const EquilibriumProfile& p);

/// Crossings where H[f0'] also vanishes (relative threshold 1e-8): the
/// critical state for a bifurcation entering through k = 0.
std::vector<double> k0_critical_scan(const EquilibriumProfile& p);

/// Bi-Maxwellian separation c* where the PV integral at the central zero
/// vanishes, bisected from the bracket [0.75, 1.0] * width until
/// |pv(c*)| < 1e-8 (c* is then resolved well below 1e-6).
double critical_separation(double width);

struct SweepRow {
  double c_lo, c_hi, pv_mid;
};
double critical_separation(double width, double lo, double hi, std::vector<SweepRow>* log);

/// Log-spaced k scan, default [0.05, 5] with 60 points.
std::vector<double> default_k_scan(double k_lo = 0.05, double k_hi = 5.0, int count = 60);

/// Precomputes H[f0'] on the grid once so that per-k contours, windings and
/// root hunts reuse it. Construction is the only non-const phase; all methods
/// are const and safe to call concurrently.
class Analyzer {
public:
  explicit Analyzer(EquilibriumProfile profile);

  const EquilibriumProfile& profile() const { return p_; }
  const std::vector<CriticalPoint>& critical_points() const { return crits_; }

  std::complex<double> epsilon(double k, double u) const;
  PenroseContour contour(double k) const;
  int winding(double k) const;

  /// Nyquist-guided Newton with deflation: locates as many UHP roots as the
  /// winding number promises; residual target |eps| < 1e-10. Throws
  /// SolverError (carrying the Nyquist count) on non-convergence.
  std::vector<std::complex<double>> roots(double k) const;

  SpectrumClass classify(double k, std::complex<double> lambda) const;

  /// Full report over a k scan: Penrose test, per-k windings and roots where
  /// unstable, critical-state scans. The winding scan must agree with the
  /// Penrose verdict (InvariantViolationError otherwise).
  StabilityReport analyze(const std::vector<double>& k_scan) const;

private:
  double hilbert_at(double u) const;
  std::complex<double> eps_tail(double k, double u) const;  // |u| > v_max, Im part zero

  EquilibriumProfile p_;
  std::vector<double> H_;         // H[f0'] at grid nodes (interior; ends unused)
  std::vector<double> f0p_full_;  // f0' at nodes including chi terms
  std::vector<CriticalPoint> crits_;
};

PenroseContour penrose_contour(const EquilibriumProfile& p, double k);
std::vector<std::complex<double>> find_roots_uhp(const EquilibriumProfile& p, double k);
SpectrumClass classify_lambda(const EquilibriumProfile& p, double k, std::complex<double> lambda);
StabilityReport analyze(const EquilibriumProfile& p, const std::vector<double>& k_scan);

}  // namespace vpstab
