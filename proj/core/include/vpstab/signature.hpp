#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "vpstab/equilibrium.hpp"

namespace vpstab {

struct SignatureInterval {
  double u_lo, u_hi;
  int sign;  // -sgn(u f0'(u)) sampled at the interval midpoint
};

/// Krein signature of the continuous spectrum, partitioned into intervals of
/// constant sign by the zeros of f0' and the point u = 0.
struct SignatureMap {
  std::vector<SignatureInterval> intervals;
  std::vector<double> zeros;
};

/// Signature of the point u of the continuous spectrum: -sgn(u f0'(u)) in a
/// frame with f0'(0) = 0 (the profile is auto-shifted to put the global
/// maximum of f0 at the origin when that does not hold). Returns 0 exactly
/// when u = 0 or f0'(u) = 0 within tolerance.
int continuum_signature(const EquilibriumProfile& p, double u);

/// The frame used by the signature operations (identity when f0'(0) = 0).
EquilibriumProfile signature_frame(const EquilibriumProfile& p);

SignatureMap signature_map(const EquilibriumProfile& p);

/// Boundaries between intervals of opposite signature.
std::vector<double> signature_change_points(const EquilibriumProfile& p);

/// -sgn(u f0') per grid node in the signature frame (for export).
std::vector<int> signature_samples(const EquilibriumProfile& p);

/// Signature of an embedded mode: sgn(u * d(eps_re)/du) with a centered
/// difference of step 4 * grid spacing. (u, k) must satisfy eps(k,u) = 0 and
/// f0'(u) = 0 within tolerance, else std::domain_error.
int embedded_signature(const EquilibriumProfile& p, double k, double u);

struct SignatureCheckEntry {
  double u;
  double f0pp;
  double hilbert;  // H[f0'](u)
};

struct SignatureCheckReport {
  bool skipped_unstable = false;  // precondition (spectral stability) failed
  std::vector<SignatureCheckEntry> checked;
};

/// On a stable profile, asserts that no crossing has f0'' < 0 together with
/// H[f0'] > 0; a violation would contradict spectral stability and is raised
/// as InvariantViolationError (a numerics bug, not bad input).
SignatureCheckReport opposite_signature_check(const EquilibriumProfile& p);

/// Three discrete modes in a frame where all frequencies are positive,
/// ordered by frequency, each carrying a signature sign.
class ModeTriplet {
public:
  ModeTriplet(std::array<double, 3> frequencies, std::array<int, 3> signs);

  /// Parse "+-+"-style sign strings (frequencies default to 1, 2, 3).
  static ModeTriplet from_signs(const std::string& s);

  const std::array<double, 3>& frequencies() const { return freq_; }
  const std::array<int, 3>& signs() const { return signs_; }

private:
  std::array<double, 3> freq_;
  std::array<int, 3> signs_;
};

struct FrameShiftResult {
  bool definite_achievable = false;
  std::optional<int> witness_g;  // how many low-frequency modes to push negative
  /// The transitional sequence as the frame accelerates: for each g = 1..3,
  /// the state with mode g at zero frequency, then with its sign flipped.
  std::vector<std::array<int, 3>> shift_sequence;
};

/// Little-big-man test: a frame shift pushing the g lowest-frequency modes to
/// negative frequency flips their signature; definite_achievable iff some
/// g in {0,1,2,3} makes all three signs equal.
FrameShiftResult little_big_man(const ModeTriplet& t);

}  // namespace vpstab
