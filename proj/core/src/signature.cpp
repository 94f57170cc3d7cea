#include "vpstab/signature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vpstab/dispersion.hpp"
#include "vpstab/errors.hpp"

namespace vpstab {

namespace {

constexpr double kZeroFraction = 1e-9;  // |f0'| below this times max|f0'| counts as zero

int sign(double x) { return (x > 0) - (x < 0); }

double max_abs_f0p(const EquilibriumProfile& p) {
  double m = 0;
  for (int i = 0; i < p.grid().n(); ++i) m = std::max(m, std::abs(p.eval(p.grid().node(i), 1)));
  return m;
}

// Origin of the signature frame, in the profile's own coordinates: 0 when
// f0'(0) = 0 already, otherwise the location of the global maximum of f0.
// All signature quantities are reported in profile coordinates, so they are
// covariant under Galilean shifts of the profile.
double frame_origin(const EquilibriumProfile& p, double max_fp) {
  if (max_fp == 0 || std::abs(p.eval(0.0, 1)) <= kZeroFraction * max_fp) return 0.0;
  double best_u = 0, best_f = -1;
  for (const auto& c : find_critical_points(p)) {
    if (c.kind != CriticalKind::crossing_down) continue;
    const double f = p.eval(c.u, 0);
    if (f > best_f) {
      best_f = f;
      best_u = c.u;
    }
  }
  if (best_f < 0) throw std::domain_error("signature: profile has no maximum to anchor the frame");
  return best_u;
}

}  // namespace

EquilibriumProfile signature_frame(const EquilibriumProfile& p) {
  const double U = frame_origin(p, max_abs_f0p(p));
  return U == 0 ? p : shift_frame(p, U);
}

int continuum_signature(const EquilibriumProfile& p, double u) {
  const double mfp = max_abs_f0p(p);
  const double U = frame_origin(p, mfp);
  if (u == U) return 0;
  const double fp = p.eval(u, 1);
  if (std::abs(fp) <= kZeroFraction * mfp) return 0;
  return -sign((u - U) * fp);
}

SignatureMap signature_map(const EquilibriumProfile& p) {
  const double mfp = max_abs_f0p(p);
  const double U = frame_origin(p, mfp);

  std::vector<double> zeros;
  for (const auto& c : find_critical_points(p)) zeros.push_back(c.u);
  zeros.push_back(U);  // the frame origin, where the u factor vanishes
  std::sort(zeros.begin(), zeros.end());
  zeros.erase(std::unique(zeros.begin(), zeros.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-9; }),
              zeros.end());

  std::vector<double> bounds;
  bounds.push_back(-p.grid().v_max());
  for (double z : zeros) bounds.push_back(z);
  bounds.push_back(p.grid().v_max());

  SignatureMap m;
  m.zeros = zeros;
  for (size_t i = 0; i + 1 < bounds.size(); ++i) {
    const double mid = 0.5 * (bounds[i] + bounds[i + 1]);
    const double fp = p.eval(mid, 1);
    int s = 0;
    if (std::abs(fp) > kZeroFraction * mfp) s = -sign((mid - U) * fp);
    m.intervals.push_back({bounds[i], bounds[i + 1], s});
  }
  return m;
}

std::vector<double> signature_change_points(const EquilibriumProfile& p) {
  const SignatureMap m = signature_map(p);
  std::vector<double> out;
  for (size_t i = 0; i + 1 < m.intervals.size(); ++i) {
    const int a = m.intervals[i].sign, b = m.intervals[i + 1].sign;
    if (a != 0 && b != 0 && a != b) out.push_back(m.intervals[i].u_hi);
  }
  return out;
}

std::vector<int> signature_samples(const EquilibriumProfile& p) {
  const double mfp = max_abs_f0p(p);
  const double U = frame_origin(p, mfp);
  std::vector<int> out(p.grid().n(), 0);
  for (int i = 0; i < p.grid().n(); ++i) {
    const double u = p.grid().node(i);
    const double fp = p.eval(u, 1);
    if (u != U && std::abs(fp) > kZeroFraction * mfp) out[i] = -sign((u - U) * fp);
  }
  return out;
}

int embedded_signature(const EquilibriumProfile& p, double k, double u) {
  const double step = 4 * p.grid().spacing();
  if (std::abs(u) + step >= p.grid().v_max())
    throw std::domain_error("embedded_signature: mode too close to the grid edge");
  if (std::abs(p.eval(u, 1)) > kZeroFraction * max_abs_f0p(p))
    throw std::domain_error("embedded_signature: f0'(u) does not vanish");
  if (std::abs(epsilon_boundary(p, k, u)) > 1e-6)
    throw std::domain_error("embedded_signature: (u,k) is not a mode within tolerance");
  const double d =
      (epsilon_boundary(p, k, u + step).real() - epsilon_boundary(p, k, u - step).real()) /
      (2 * step);
  const int s = sign(u * d);
  if (s == 0) throw std::domain_error("embedded_signature: degenerate slope");
  return s;
}

SignatureCheckReport opposite_signature_check(const EquilibriumProfile& p) {
  SignatureCheckReport rep;
  if (penrose_test(p).unstable()) {
    rep.skipped_unstable = true;
    return rep;
  }
  const auto crits = find_critical_points(p);
  double scale = 0;
  for (const auto& c : crits)
    if (c.is_crossing()) scale = std::max(scale, std::abs(hilbert_f0p(p, c.u)));
  for (const auto& c : crits) {
    if (!c.is_crossing()) continue;
    const double H = hilbert_f0p(p, c.u);
    rep.checked.push_back({c.u, c.f0pp, H});
    if (c.f0pp < 0 && H > 1e-8 * scale)
      throw InvariantViolationError(
          "opposite_signature_check: stable profile has a crossing with f0''<0 and H[f0']>0");
  }
  return rep;
}

ModeTriplet::ModeTriplet(std::array<double, 3> frequencies, std::array<int, 3> signs)
    : freq_(frequencies), signs_(signs) {
  if (!(freq_[0] > 0 && freq_[0] < freq_[1] && freq_[1] < freq_[2]))
    throw std::invalid_argument("ModeTriplet: frequencies must be positive and strictly increasing");
  for (int s : signs_)
    if (s != 1 && s != -1) throw std::invalid_argument("ModeTriplet: signs must be +-1");
}

ModeTriplet ModeTriplet::from_signs(const std::string& s) {
  if (s.size() != 3) throw std::invalid_argument("ModeTriplet: want exactly 3 signs");
  std::array<int, 3> signs{};
  for (int i = 0; i < 3; ++i) {
    if (s[i] == '+')
      signs[i] = 1;
    else if (s[i] == '-')
      signs[i] = -1;
    else
      throw std::invalid_argument("ModeTriplet: signs must be '+' or '-'");
  }
  return ModeTriplet({1.0, 2.0, 3.0}, signs);
}

FrameShiftResult little_big_man(const ModeTriplet& t) {
  FrameShiftResult r;
  const auto& s0 = t.signs();
  for (int g = 0; g <= 3; ++g) {
    std::array<int, 3> s = s0;
    for (int i = 0; i < g; ++i) s[i] = -s[i];
    if (g > 0) {
      std::array<int, 3> zero_state = s0;
      for (int i = 0; i + 1 < g; ++i) zero_state[i] = -zero_state[i];
      zero_state[g - 1] = 0;
      r.shift_sequence.push_back(zero_state);
      r.shift_sequence.push_back(s);
    }
    if (!r.definite_achievable && s[0] == s[1] && s[1] == s[2]) {
      r.definite_achievable = true;
      r.witness_g = g;
    }
  }
  return r;
}

}  // namespace vpstab
