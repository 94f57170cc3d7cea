#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace vpstab {

/// Uniform velocity grid on [-v_max, v_max], symmetric about 0 with an odd
/// number of nodes so that v = 0 is itself a node.
class VelocityGrid {
public:
  VelocityGrid(double v_max, int n) : v_max_(v_max), n_(n) {
    if (!(v_max > 0)) throw std::invalid_argument("VelocityGrid: v_max must be positive");
    if (n < 101 || n % 2 == 0) throw std::invalid_argument("VelocityGrid: n must be odd and >= 101");
    spacing_ = 2.0 * v_max / (n - 1);
  }

  double v_max() const { return v_max_; }
  int n() const { return n_; }
  double spacing() const { return spacing_; }

  /// Node i as an exact multiple of the spacing; node((n-1)/2) == 0 exactly.
  double node(int i) const { return (i - (n_ - 1) / 2) * spacing_; }

  /// Index of the nearest node to u (clamped to the grid).
  int nearest(double u) const {
    int i = static_cast<int>(std::lround(u / spacing_)) + (n_ - 1) / 2;
    return i < 0 ? 0 : (i >= n_ ? n_ - 1 : i);
  }

  bool contains(double u) const { return std::abs(u) <= v_max_; }

  std::vector<double> nodes() const {
    std::vector<double> v(n_);
    for (int i = 0; i < n_; ++i) v[i] = node(i);
    return v;
  }

  bool operator==(const VelocityGrid& o) const { return v_max_ == o.v_max_ && n_ == o.n_; }

private:
  double v_max_;
  int n_;
  double spacing_;
};

/// Real-valued function sampled on a velocity grid. Off-node evaluation is
/// 4-point (cubic) Lagrange interpolation; derivatives come from centered
/// differences of the samples.
class SampledFunction {
public:
  SampledFunction(VelocityGrid grid, std::vector<double> values)
      : grid_(grid), values_(std::move(values)) {
    if (static_cast<int>(values_.size()) != grid_.n())
      throw std::invalid_argument("SampledFunction: size mismatch with grid");
    for (double x : values_)
      if (!std::isfinite(x)) throw std::invalid_argument("SampledFunction: non-finite sample");
  }

  const VelocityGrid& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  double operator[](int i) const { return values_[i]; }

  double value(double u) const { return interp(values_, u); }

  /// Centered-difference derivative samples (second-order one-sided at the ends).
  std::vector<double> derivative_samples() const;

  /// Derivative at u, interpolating centered differences computed locally
  /// (no caching, so concurrent calls stay safe).
  double derivative(double u) const;

  double integrate_trapezoid() const {
    double s = 0.5 * (values_.front() + values_.back());
    for (int i = 1; i + 1 < grid_.n(); ++i) s += values_[i];
    return s * grid_.spacing();
  }

private:
  double interp(const std::vector<double>& a, double u) const;

  VelocityGrid grid_;
  std::vector<double> values_;
};

inline std::vector<double> SampledFunction::derivative_samples() const {
  const int n = grid_.n();
  const double h = grid_.spacing();
  std::vector<double> d(n);
  for (int i = 1; i + 1 < n; ++i) d[i] = (values_[i + 1] - values_[i - 1]) / (2 * h);
  d[0] = (-3 * values_[0] + 4 * values_[1] - values_[2]) / (2 * h);
  d[n - 1] = (3 * values_[n - 1] - 4 * values_[n - 2] + values_[n - 3]) / (2 * h);
  return d;
}

inline double SampledFunction::derivative(double u) const {
  const int n = grid_.n();
  const double h = grid_.spacing();
  if (!grid_.contains(u)) throw std::domain_error("SampledFunction: u outside grid");
  double s = u / h + (n - 1) / 2;
  int i = static_cast<int>(std::floor(s));
  if (i < 1) i = 1;
  if (i > n - 3) i = n - 3;
  const double x = s - i;
  auto d_at = [&](int j) {
    if (j == 0) return (-3 * values_[0] + 4 * values_[1] - values_[2]) / (2 * h);
    if (j == n - 1) return (3 * values_[n - 1] - 4 * values_[n - 2] + values_[n - 3]) / (2 * h);
    return (values_[j + 1] - values_[j - 1]) / (2 * h);
  };
  const double wm1 = -x * (x - 1) * (x - 2) / 6;
  const double w0 = (x * x - 1) * (x - 2) / 2;
  const double w1 = -x * (x + 1) * (x - 2) / 2;
  const double w2 = x * (x * x - 1) / 6;
  return wm1 * d_at(i - 1) + w0 * d_at(i) + w1 * d_at(i + 1) + w2 * d_at(i + 2);
}

inline double SampledFunction::interp(const std::vector<double>& a, double u) const {
  const int n = grid_.n();
  const double h = grid_.spacing();
  if (!grid_.contains(u)) throw std::domain_error("SampledFunction: u outside grid");
  double s = u / h + (n - 1) / 2;  // fractional index
  int i = static_cast<int>(std::floor(s));
  if (i < 1) i = 1;
  if (i > n - 3) i = n - 3;
  const double x = s - i;  // in [0,1] away from the ends
  const double wm1 = -x * (x - 1) * (x - 2) / 6;
  const double w0 = (x * x - 1) * (x - 2) / 2;
  const double w1 = -x * (x + 1) * (x - 2) / 2;
  const double w2 = x * (x * x - 1) / 6;
  return wm1 * a[i - 1] + w0 * a[i] + w1 * a[i + 1] + w2 * a[i + 2];
}

}  // namespace vpstab
