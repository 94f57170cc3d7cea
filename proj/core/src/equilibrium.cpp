#include "vpstab/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vpstab/errors.hpp"

namespace vpstab {

namespace {

constexpr int kDefaultN = 4001;
constexpr double kTailFraction = 1e-12;    // analytic tails must sit below this times the peak
constexpr double kRootTol = 1e-10;         // bisection tolerance for crossings
constexpr double kTangencyFraction = 1e-9; // |f0'| threshold relative to max|f0'|

int sign(double x) { return (x > 0) - (x < 0); }

class GaussianSumModel final : public DistributionModel {
public:
  explicit GaussianSumModel(std::vector<GaussianComponent> comps) : comps_(std::move(comps)) {
    for (const auto& c : comps_)
      if (!(c.width > 0)) throw std::invalid_argument("gaussian component: width must be positive");
  }

  double eval(double v, int order) const override {
    double s = 0;
    for (const auto& c : comps_) {
      const double x = (v - c.center) / c.width;
      const double e = std::exp(-x * x);
      switch (order) {
        case 0: s += c.weight * e; break;
        case 1: s += c.weight * (-2 * x) * e / c.width; break;
        case 2: s += c.weight * (4 * x * x - 2) * e / (c.width * c.width); break;
        default: throw std::invalid_argument("eval: order must be 0, 1 or 2");
      }
    }
    return s;
  }

  const std::vector<GaussianComponent>& components() const { return comps_; }

private:
  std::vector<GaussianComponent> comps_;
};

// Tabulated data resampled onto the profile grid; derivatives by centered
// differences, zero outside the grid.
class TabulatedModel final : public DistributionModel {
public:
  TabulatedModel(SampledFunction f0, SampledFunction fp, SampledFunction fpp)
      : f0_(std::move(f0)), fp_(std::move(fp)), fpp_(std::move(fpp)) {}

  double eval(double v, int order) const override {
    if (!f0_.grid().contains(v)) return 0.0;
    switch (order) {
      case 0: return f0_.value(v);
      case 1: return fp_.value(v);
      case 2: return fpp_.value(v);
      default: throw std::invalid_argument("eval: order must be 0, 1 or 2");
    }
  }

private:
  SampledFunction f0_, fp_, fpp_;
};

class ShiftedModel final : public DistributionModel {
public:
  ShiftedModel(std::shared_ptr<const DistributionModel> base, double shift)
      : base_(std::move(base)), shift_(shift) {}
  double eval(double v, int order) const override { return base_->eval(v + shift_, order); }

private:
  std::shared_ptr<const DistributionModel> base_;
  double shift_;
};

// 4-point Lagrange interpolation on (possibly nonuniform) tabulated data.
double lagrange4(const std::vector<double>& xs, const std::vector<double>& ys, double u) {
  const int n = static_cast<int>(xs.size());
  int j = static_cast<int>(std::upper_bound(xs.begin(), xs.end(), u) - xs.begin()) - 1;
  int i0 = std::clamp(j - 1, 0, n - 4);
  double s = 0;
  for (int a = i0; a < i0 + 4; ++a) {
    double w = 1;
    for (int b = i0; b < i0 + 4; ++b)
      if (b != a) w *= (u - xs[b]) / (xs[a] - xs[b]);
    s += w * ys[a];
  }
  return s;
}

VelocityGrid resolve_grid(const GridSpec& gs, double default_vmax) {
  const double v_max = gs.v_max.value_or(default_vmax);
  const int n = gs.n.value_or(kDefaultN);
  return VelocityGrid(v_max, n);
}

double default_vmax_for(const std::vector<GaussianComponent>& comps) {
  double extent = 0, wmax = 0;
  for (const auto& c : comps) {
    extent = std::max(extent, std::abs(c.center));
    wmax = std::max(wmax, c.width);
  }
  return extent + 8 * wmax;
}

std::string format_components(const std::vector<GaussianComponent>& comps) {
  char buf[64];
  std::string s = "sum:";
  for (size_t i = 0; i < comps.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%g,%g,%g", comps[i].weight, comps[i].center, comps[i].width);
    if (i) s += ';';
    s += buf;
  }
  return s;
}

detail::SampledDelta build_sampled_delta(const VelocityGrid& grid, std::vector<double> values) {
  SampledFunction fp(grid, std::move(values));
  SampledFunction fpp(grid, fp.derivative_samples());
  std::vector<double> cum(grid.n(), 0.0);
  const double h = grid.spacing();
  for (int i = 1; i < grid.n(); ++i) cum[i] = cum[i - 1] + 0.5 * h * (fp[i - 1] + fp[i]);
  SampledFunction f(grid, std::move(cum));
  return {std::move(fp), std::move(fpp), std::move(f)};
}

}  // namespace

EquilibriumProfile::EquilibriumProfile(std::shared_ptr<const DistributionModel> model,
                                       VelocityGrid grid, std::string label,
                                       bool validate_analytic, bool grid_explicit)
    : model_(std::move(model)), grid_(grid), label_(std::move(label)),
      grid_explicit_(grid_explicit) {
  rebuild_samples();
  for (double x : f0_samples_)
    if (!std::isfinite(x)) throw std::invalid_argument("profile: non-finite f0 sample");
  if (validate_analytic) {
    double lo = 0;
    for (double x : f0_samples_) lo = std::min(lo, x);
    if (lo < -kTailFraction * peak_f0_)
      throw std::invalid_argument("profile: f0 must be nonnegative");
    if (f0_samples_.front() > kTailFraction * peak_f0_ ||
        f0_samples_.back() > kTailFraction * peak_f0_)
      throw std::invalid_argument("profile: tails not resolved; increase v_max");
    // Centered differences of the sampled f0 must reproduce the analytic f0'.
    const double h = grid_.spacing();
    double err = 0, f3max = 0;
    for (int i = 1; i + 1 < grid_.n(); ++i) {
      const double fd = (f0_samples_[i + 1] - f0_samples_[i - 1]) / (2 * h);
      err = std::max(err, std::abs(fd - model_->eval(grid_.node(i), 1)));
      const double f3 = (model_->eval(grid_.node(i + 1), 2) - model_->eval(grid_.node(i - 1), 2)) / (2 * h);
      f3max = std::max(f3max, std::abs(f3));
    }
    if (err > 10 * h * h * f3max + 1e-12 * peak_f0_)
      throw InvariantViolationError("profile: analytic derivatives inconsistent with samples");
  }
}

void EquilibriumProfile::rebuild_samples() {
  const int n = grid_.n();
  f0_samples_.assign(n, 0.0);
  f0p_quad_.assign(n, 0.0);
  peak_f0_ = 0;
  for (int i = 0; i < n; ++i) {
    const double v = grid_.node(i);
    double f0 = model_->eval(v, 0);
    double fp = model_->eval(v, 1);
    for (const auto& sd : sampled_terms_) {
      f0 += sd.f.value(v);
      fp += sd.fp.value(v);
    }
    for (const auto& c : chi_terms_) f0 += chi_antiderivative(v, c);
    f0_samples_[i] = f0;
    f0p_quad_[i] = fp;
    peak_f0_ = std::max(peak_f0_, std::abs(f0));
  }
}

double EquilibriumProfile::eval(double u, int order) const {
  if (!grid_.contains(u)) throw std::domain_error("profile eval: u outside [-v_max, v_max]");
  double s = model_->eval(u, order);
  for (const auto& c : chi_terms_) {
    switch (order) {
      case 0: s += chi_antiderivative(u, c); break;
      case 1: s += chi(u, c); break;
      case 2: s += chi_prime(u, c); break;
      default: throw std::invalid_argument("eval: order must be 0, 1 or 2");
    }
  }
  for (const auto& sd : sampled_terms_) {
    switch (order) {
      case 0: s += sd.f.value(u); break;
      case 1: s += sd.fp.value(u); break;
      case 2: s += sd.fpp.value(u); break;
      default: break;
    }
  }
  return s;
}

double EquilibriumProfile::f0p_quad_value(double u) const {
  double s = model_->eval(u, 1);
  for (const auto& sd : sampled_terms_) s += sd.fp.value(u);
  return s;
}

double EquilibriumProfile::f0p_quad_deriv(double u) const {
  double s = model_->eval(u, 2);
  for (const auto& sd : sampled_terms_) s += sd.fpp.value(u);
  return s;
}

EquilibriumProfile EquilibriumProfile::with_chi_term(const ChiParams& p) const {
  if (!p.valid()) throw std::invalid_argument("with_chi_term: invalid chi parameters");
  if (std::abs(p.center) + p.support_radius() >= grid_.v_max())
    throw std::invalid_argument("with_chi_term: chi support must fit inside the grid");
  EquilibriumProfile out = *this;
  out.chi_terms_.push_back(p);
  // Zero structure inside the support can be finer than the grid; register
  // scan points at resolution h/8.
  const double step = std::min(grid_.spacing(), p.h / 8);
  const double r = p.support_radius() + grid_.spacing();
  for (double x = -r; x <= r; x += step) out.scan_hints_.push_back(p.center + x);
  std::sort(out.scan_hints_.begin(), out.scan_hints_.end());
  out.rebuild_samples();
  return out;
}

EquilibriumProfile EquilibriumProfile::with_sampled_delta(std::vector<double> delta_fp) const {
  if (static_cast<int>(delta_fp.size()) != grid_.n())
    throw std::invalid_argument("with_sampled_delta: size mismatch");
  EquilibriumProfile out = *this;
  out.sampled_terms_.push_back(build_sampled_delta(grid_, std::move(delta_fp)));
  out.rebuild_samples();
  return out;
}

EquilibriumProfile make_gaussian_mixture(std::vector<GaussianComponent> comps, const GridSpec& gs) {
  if (comps.empty()) throw std::invalid_argument("mixture: no components");
  const double vmax = default_vmax_for(comps);
  auto grid = resolve_grid(gs, vmax);
  std::string label = format_components(comps);
  auto model = std::make_shared<GaussianSumModel>(std::move(comps));
  EquilibriumProfile p(model, grid, std::move(label), /*validate_analytic=*/true,
                       gs.v_max.has_value() || gs.n.has_value());
  p.gaussian_family_ = model->components();
  return p;
}

EquilibriumProfile make_maxwellian(double center, double width, const GridSpec& gs) {
  auto p = make_gaussian_mixture({{1.0, center, width}}, gs);
  char buf[64];
  std::snprintf(buf, sizeof buf, "maxwellian:%g,%g", center, width);
  p.label_ = buf;
  return p;
}

EquilibriumProfile make_bi_maxwellian(double separation, double width, const GridSpec& gs) {
  if (!(separation >= 0)) throw std::invalid_argument("bi_maxwellian: separation must be >= 0");
  auto p = make_gaussian_mixture({{1.0, -separation, width}, {1.0, separation, width}}, gs);
  char buf[64];
  std::snprintf(buf, sizeof buf, "bimax:%g,%g", separation, width);
  p.label_ = buf;
  return p;
}

EquilibriumProfile make_tabulated(std::vector<double> v, std::vector<double> f0,
                                  const GridSpec& gs) {
  if (v.size() != f0.size() || v.size() < 4)
    throw std::invalid_argument("tabulated: need matching v/f0 columns with at least 4 rows");
  for (size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) throw std::invalid_argument("tabulated: v must be strictly increasing");
  for (double y : f0) {
    if (!std::isfinite(y)) throw std::invalid_argument("tabulated: non-finite f0");
    if (y < 0) throw std::invalid_argument("tabulated: f0 must be nonnegative");
  }
  const double vmax = std::max(std::abs(v.front()), std::abs(v.back()));
  auto grid = resolve_grid(gs, vmax);

  std::vector<double> samples(grid.n(), 0.0);
  for (int i = 0; i < grid.n(); ++i) {
    const double u = grid.node(i);
    if (u >= v.front() && u <= v.back()) samples[i] = lagrange4(v, f0, u);
  }
  SampledFunction sf(grid, std::move(samples));
  SampledFunction sfp(grid, sf.derivative_samples());
  SampledFunction sfpp(grid, sfp.derivative_samples());
  auto model = std::make_shared<TabulatedModel>(sf, sfp, sfpp);

  EquilibriumProfile p(model, grid, "tabulated", /*validate_analytic=*/false,
                       gs.v_max.has_value() || gs.n.has_value());
  p.tab_v_ = std::move(v);
  p.tab_f_ = std::move(f0);
  return p;
}

EquilibriumProfile make_from_model(std::shared_ptr<const DistributionModel> model,
                                   VelocityGrid grid, std::string label, bool validate_analytic) {
  return EquilibriumProfile(std::move(model), grid, std::move(label), validate_analytic, true);
}

EquilibriumProfile shift_frame(const EquilibriumProfile& p, double U) {
  if (!(std::abs(U) < p.grid().v_max() / 2))
    throw std::domain_error("shift_frame: |U| must be below v_max/2");

  EquilibriumProfile out = [&]() {
    if (!p.gaussian_family_.empty()) {
      auto comps = p.gaussian_family_;
      for (auto& c : comps) c.center -= U;
      GridSpec gs;
      if (p.grid_explicit_) {
        gs.v_max = p.grid().v_max();
        gs.n = p.grid().n();
      }
      return make_gaussian_mixture(std::move(comps), gs);
    }
    if (!p.tab_v_.empty()) {
      auto tv = p.tab_v_;
      for (auto& x : tv) x -= U;
      GridSpec gs;
      if (p.grid_explicit_) {
        gs.v_max = p.grid().v_max();
        gs.n = p.grid().n();
      }
      return make_tabulated(std::move(tv), p.tab_f_, gs);
    }
    auto model = std::make_shared<ShiftedModel>(p.model_ptr(), U);
    return make_from_model(model, p.grid(), p.label() + "|shifted", false);
  }();

  for (const auto& c : p.chi_terms_) {
    ChiParams cc = c;
    cc.center -= U;
    out = out.with_chi_term(cc);
  }
  for (const auto& sd : p.sampled_terms_) {
    std::vector<double> vals(out.grid().n(), 0.0);
    for (int i = 0; i < out.grid().n(); ++i) {
      const double v = out.grid().node(i) + U;
      if (sd.fp.grid().contains(v)) vals[i] = sd.fp.value(v);
    }
    out = out.with_sampled_delta(std::move(vals));
  }
  return out;
}

std::vector<CriticalPoint> find_critical_points(const EquilibriumProfile& p) {
  const VelocityGrid& g = p.grid();
  const int n = g.n();

  // Scan abscissae: interior grid nodes merged with any registered hints.
  std::vector<double> xs;
  xs.reserve(n + p.scan_hints().size());
  for (int i = 1; i + 1 < n; ++i) xs.push_back(g.node(i));
  for (double h : p.scan_hints())
    if (std::abs(h) < g.v_max() - g.spacing()) xs.push_back(h);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  const int m = static_cast<int>(xs.size());

  std::vector<double> fp(m), fpp(m);
  double maxfp = 0;
  for (int i = 0; i < m; ++i) {
    fp[i] = p.eval(xs[i], 1);
    fpp[i] = p.eval(xs[i], 2);
    maxfp = std::max(maxfp, std::abs(fp[i]));
  }
  if (maxfp == 0) return {};
  const double ztol = kTangencyFraction * maxfp;
  const double f0_floor = kTailFraction * p.peak_f0();

  auto bisect_fp = [&](double a, double b) {
    double fa = p.eval(a, 1);
    for (int it = 0; it < 80 && b - a > kRootTol; ++it) {
      const double mid = 0.5 * (a + b);
      const double fm = p.eval(mid, 1);
      if (fm == 0) return mid;
      if (sign(fm) == sign(fa)) {
        a = mid;
        fa = fm;
      } else {
        b = mid;
      }
    }
    return 0.5 * (a + b);
  };
  auto bisect_fpp = [&](double a, double b) {
    double fa = p.eval(a, 2);
    for (int it = 0; it < 90 && b - a > 1e-13 * (1 + std::abs(a)); ++it) {
      const double mid = 0.5 * (a + b);
      const double fm = p.eval(mid, 2);
      if (fm == 0) return mid;
      if (sign(fm) == sign(fa)) {
        a = mid;
        fa = fm;
      } else {
        b = mid;
      }
    }
    return 0.5 * (a + b);
  };

  std::vector<CriticalPoint> out;
  auto push = [&](double u, CriticalKind kind) {
    // A zero created by a chi core sits within O(eps) of the chi center --
    // far below bisection resolution -- so snap to the center exactly; the
    // Hilbert boost of the core is only visible there.
    for (const auto& t : p.chi_terms())
      if (std::abs(u - t.center) < 4 * kRootTol) u = t.center;
    for (const auto& c : out)
      if (std::abs(c.u - u) < 1e-8) return;
    out.push_back({u, kind, p.eval(u, 2)});
  };

  // Crossings: strict sign changes, plus exact zeros sitting on scan points.
  for (int i = 0; i < m; ++i) {
    if (fp[i] == 0 || std::abs(fp[i]) < 1e-15 * maxfp) {
      int l = i - 1, r = i + 1;
      while (l >= 0 && sign(fp[l]) == 0) --l;
      while (r < m && sign(fp[r]) == 0) ++r;
      const int sl = l >= 0 ? sign(fp[l]) : 0;
      const int sr = r < m ? sign(fp[r]) : 0;
      if (sl * sr < 0) {
        push(xs[i], sl < 0 ? CriticalKind::crossing_up : CriticalKind::crossing_down);
      } else if (p.eval(xs[i], 0) > f0_floor) {
        push(xs[i], CriticalKind::tangency);
      }
    }
  }
  for (int i = 0; i + 1 < m; ++i) {
    const int sa = sign(fp[i]), sb = sign(fp[i + 1]);
    if (sa * sb < 0) {
      const double u = bisect_fp(xs[i], xs[i + 1]);
      push(u, sa < 0 ? CriticalKind::crossing_up : CriticalKind::crossing_down);
    }
  }

  // Tangencies away from scan points: f0'' changes sign while |f0'| stays
  // below the tangency threshold.
  for (int i = 0; i + 1 < m; ++i) {
    if (sign(fpp[i]) * sign(fpp[i + 1]) < 0) {
      const double u = bisect_fpp(xs[i], xs[i + 1]);
      if (std::abs(p.eval(u, 1)) < ztol && p.eval(u, 0) > f0_floor) push(u, CriticalKind::tangency);
    }
  }

  std::sort(out.begin(), out.end(), [](const CriticalPoint& a, const CriticalPoint& b) { return a.u < b.u; });
  return out;
}

}  // namespace vpstab
