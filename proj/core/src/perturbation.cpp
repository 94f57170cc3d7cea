#include "vpstab/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "vpstab/errors.hpp"
#include "vpstab/hilbert.hpp"

namespace vpstab {

namespace {

class RearrangedModel final : public DistributionModel {
public:
  RearrangedModel(std::shared_ptr<const DistributionModel> base, RearrangementMap map)
      : base_(std::move(base)), map_(map) {}

  double eval(double v, int order) const override {
    const double V = map_.map(v);
    switch (order) {
      case 0: return base_->eval(V, 0);
      case 1: return map_.map_prime(v) * base_->eval(V, 1);
      case 2: {
        const double Vp = map_.map_prime(v);
        return map_.map_second(v) * base_->eval(V, 1) + Vp * Vp * base_->eval(V, 2);
      }
      default: throw std::invalid_argument("eval: order must be 0, 1 or 2");
    }
  }

private:
  std::shared_ptr<const DistributionModel> base_;
  RearrangementMap map_;
};

double w11_norm_numeric(const EquilibriumProfile& pert, const EquilibriumProfile& base) {
  const VelocityGrid& g = base.grid();
  double s = 0;
  for (int i = 0; i < g.n(); ++i) {
    const double v = g.node(i);
    const double d1 = std::abs(pert.eval(v, 1) - base.eval(v, 1));
    const double d2 = std::abs(pert.eval(v, 2) - base.eval(v, 2));
    const double w = (i == 0 || i + 1 == g.n()) ? 0.5 : 1.0;
    s += w * (d1 + d2);
  }
  return s * g.spacing();
}

int zero_count(const EquilibriumProfile& p) {
  return static_cast<int>(find_critical_points(p).size());
}

const CriticalPoint* nearest_critical(const std::vector<CriticalPoint>& crits, double u,
                                      double tol) {
  const CriticalPoint* best = nullptr;
  for (const auto& c : crits)
    if (std::abs(c.u - u) < tol && (!best || std::abs(c.u - u) < std::abs(best->u - u))) best = &c;
  return best;
}

// Tighten eps until the chi PV boost at the crossing clears pi|H| + margin.
ChiParams choose_destabilizing_chi(const EquilibriumProfile& p, double u0, double h) {
  const double target = M_PI * std::abs(hilbert_f0p(p, u0)) + 1.0;
  ChiParams c = ChiParams::with_defaults(h, u0);
  double A = std::max(1.0, target / 2);
  for (int it = 0; it < 300; ++it) {
    const double eps = std::min(std::exp(-1.0 / h), std::exp(-A / h));
    if (eps < 1e-300)
      throw std::invalid_argument("destabilize: h too small to reach the required Hilbert boost");
    c.eps = eps;
    if (chi_hilbert(u0, c) >= target) return c;
    A *= 1.15;
  }
  throw std::invalid_argument("destabilize: failed to size the chi perturbation");
}

void check_support_clear(const std::vector<CriticalPoint>& crits, double u0, double radius) {
  for (const auto& c : crits) {
    if (std::abs(c.u - u0) < 1e-9) continue;
    if (std::abs(c.u - u0) <= radius)
      throw std::invalid_argument("destabilize: h too large, chi support contains another zero of f0'");
  }
}

// Shared tail of the additive destabilizers once the perturbed profile exists.
DestabilizeResult finish_additive(const EquilibriumProfile& base, EquilibriumProfile pert,
                                  PerturbationKind kind, double norm, const ChiParams& chi_used,
                                  int base_zeros) {
  const auto scan = default_k_scan();
  Analyzer base_an(base);
  Analyzer pert_an(pert);
  DestabilizeResult r{.perturbed = PerturbedProfile{std::move(pert), base, kind, norm}};
  r.chi_used = chi_used;
  r.before = base_an.analyze(scan);
  r.after = pert_an.analyze(scan);
  r.zero_count_delta = zero_count(pert_an.profile()) - base_zeros;
  for (int i = 0; i < base.grid().n(); ++i) {
    const double v = base.grid().node(i);
    r.sup_delta_fp =
        std::max(r.sup_delta_fp, std::abs(pert_an.profile().eval(v, 1) - base.eval(v, 1)));
  }

  if (!r.after.unstable_k_bands.empty()) {
    auto band = r.after.unstable_k_bands.front();
    for (const auto& b : r.after.unstable_k_bands)
      if (b.second > band.second) band = b;
    r.unstable_k_band = band;
    // report a wavenumber at which the winding is actually positive (with
    // overlapping violations the winding is 1 only between band edges)
    std::vector<double> kw;
    for (const auto& pk : r.after.per_k)
      if (pk.winding > 0) kw.push_back(pk.k);
    if (!kw.empty()) {
      r.k_reported = kw[kw.size() / 2];
      r.winding_before = base_an.winding(r.k_reported);
      r.winding_after = pert_an.winding(r.k_reported);
    }
  }
  return r;
}

}  // namespace

double RearrangementMap::shape(double v) const {
  const double x = (v - center) / radius;
  const double w = 1 - x * x;
  return w > 0 ? std::exp(1 - 1 / w) : 0.0;
}

double RearrangementMap::shape_prime(double v) const {
  const double x = (v - center) / radius;
  const double w = 1 - x * x;
  if (w <= 0) return 0.0;
  return std::exp(1 - 1 / w) * (-2 * x / (w * w)) / radius;
}

double RearrangementMap::shape_second(double v) const {
  const double x = (v - center) / radius;
  const double w = 1 - x * x;
  if (w <= 0) return 0.0;
  const double q = -2 * x / (w * w);
  const double qp = -2 / (w * w) - 8 * x * x / (w * w * w);
  return std::exp(1 - 1 / w) * (q * q + qp) / (radius * radius);
}

bool RearrangementMap::admissible_on(const VelocityGrid& g) const {
  const int m = 4 * g.n();
  for (int i = 0; i <= m; ++i) {
    const double v = -g.v_max() + 2 * g.v_max() * i / m;
    if (!(map_prime(v) > 1e-9)) return false;
  }
  return true;
}

double Bump::value(double v) const {
  const double x = (v - center) / radius;
  const double w = 1 - x * x;
  return w > 0 ? amplitude * std::exp(1 - 1 / w) : 0.0;
}

double Bump::derivative(double v) const {
  const double x = (v - center) / radius;
  const double w = 1 - x * x;
  if (w <= 0) return 0.0;
  return amplitude * std::exp(1 - 1 / w) * (-2 * x / (w * w)) / radius;
}

PerturbedProfile rearrange(const EquilibriumProfile& p, const RearrangementMap& map) {
  if (!map.admissible_on(p.grid()))
    throw std::invalid_argument("rearrange: 1 + a s'(v) must stay positive (diffeomorphism)");
  auto model = std::make_shared<RearrangedModel>(p.model_ptr(), map);
  EquilibriumProfile pert =
      make_from_model(model, p.grid(), p.label() + "|rearranged", /*validate_analytic=*/false);
  const double norm = w11_norm_numeric(pert, p);
  return PerturbedProfile{std::move(pert), p, PerturbationKind::rearrangement, norm};
}

DestabilizeResult destabilize_w11(const EquilibriumProfile& p, double u0, double h) {
  if (!(h > 0)) throw std::invalid_argument("destabilize_w11: h must be positive");
  if (penrose_test(p).unstable())
    throw std::domain_error("destabilize_w11: profile is already unstable");
  const auto crits = find_critical_points(p);
  const CriticalPoint* c = nearest_critical(crits, u0, std::max(1e-6, p.grid().spacing()));
  if (!c || !c->is_crossing() || !(c->f0pp < 0) || !(hilbert_f0p(p, c->u) < 0))
    throw std::domain_error(
        "destabilize_w11: u0 must be a crossing with f0'' < 0 and H[f0'] < 0");

  ChiParams chi_used = choose_destabilizing_chi(p, c->u, h);
  check_support_clear(crits, c->u, chi_used.support_radius());
  // The theorem's slope condition: the core must out-climb f0''.
  double sup_fpp = 0;
  for (int i = 0; i < p.grid().n(); ++i)
    sup_fpp = std::max(sup_fpp, std::abs(p.eval(p.grid().node(i), 2)));
  if (!(chi_used.h / chi_used.eps > sup_fpp))
    throw std::invalid_argument("destabilize_w11: chi core slope does not exceed sup|f0''|");

  EquilibriumProfile pert = p.with_chi_term(chi_used);
  return finish_additive(p, std::move(pert), PerturbationKind::additive_w11,
                         chi_norm_w11(chi_used), chi_used, static_cast<int>(crits.size()));
}

DestabilizeResult destabilize_rearrangement(const EquilibriumProfile& p, double vc, double h) {
  if (!(h > 0)) throw std::invalid_argument("destabilize_rearrangement: h must be positive");
  if (penrose_test(p).unstable())
    throw std::domain_error("destabilize_rearrangement: profile is already unstable");
  const auto crits = find_critical_points(p);
  int crossings = 0;
  for (const auto& c : crits) crossings += c.is_crossing();
  if (crossings < 2) throw std::domain_error("destabilize_rearrangement: no admissible valley");
  const CriticalPoint* c = nearest_critical(crits, vc, std::max(1e-6, p.grid().spacing()));
  if (!c || !c->is_crossing() || !(c->f0pp < 0))
    throw std::domain_error("destabilize_rearrangement: vc must be a crossing with f0'' < 0");

  ChiParams chi_used = choose_destabilizing_chi(p, c->u, h);
  check_support_clear(crits, c->u, chi_used.support_radius());
  EquilibriumProfile pert = p.with_chi_term(chi_used);
  return finish_additive(p, std::move(pert), PerturbationKind::rearrangement,
                         chi_norm_w11(chi_used), chi_used, static_cast<int>(crits.size()));
}

DestabilizeResult destabilize_k0(const EquilibriumProfile& p, double u, const Bump& bump) {
  const auto k0 = k0_critical_scan(p);
  bool at_critical = false;
  double uc = u;
  for (double x : k0)
    if (std::abs(x - u) < 1e-6) {
      at_critical = true;
      uc = x;
    }
  if (!at_critical)
    throw std::domain_error("destabilize_k0: u is not a k=0 critical point of the profile");
  if (std::abs(bump.center - u) > 1e-9)
    throw std::domain_error("destabilize_k0: bump must be centered (symmetric) at u");
  if (!(bump.radius > 0)) throw std::invalid_argument("destabilize_k0: bump radius must be positive");

  const VelocityGrid& g = p.grid();
  std::vector<double> dh(g.n());
  for (int i = 0; i < g.n(); ++i) dh[i] = bump.value(g.node(i));
  SampledFunction dh_s(g, std::move(dh));

  // delta f0' = -H[delta h], windowed to vanish beyond 3x the bump radius.
  std::vector<double> delta(g.n(), 0.0);
  double trunc = 0;
  for (int i = 1; i + 1 < g.n(); ++i) {
    const double v = g.node(i);
    const double raw = -pv_hilbert(dh_s, v, bump.value(v), bump.derivative(v));
    const double a = std::abs(v - uc);
    double w = 0;
    if (a <= 2 * bump.radius)
      w = 1;
    else if (a < 3 * bump.radius) {
      const double t = (a - 2 * bump.radius) / bump.radius;
      const double cw = std::cos(0.5 * M_PI * t);
      w = cw * cw;
    }
    delta[i] = w * raw;
    trunc = std::max(trunc, std::abs(raw - delta[i]));
  }

  EquilibriumProfile pert = p.with_sampled_delta(std::move(delta));
  EquilibriumProfile base = p;
  const double norm = w11_norm_numeric(pert, base);
  DestabilizeResult r = finish_additive(base, std::move(pert), PerturbationKind::k0_pair, norm,
                                        ChiParams{}, zero_count(base));
  r.truncation_error = trunc;
  return r;
}

DestabilizeResult destabilize_embedded(const EquilibriumProfile& p, const Bump& hfunc) {
  const auto modes = embedded_mode_scan(p);
  if (modes.empty())
    throw std::domain_error("destabilize_embedded: profile hosts no embedded mode");
  const EmbeddedMode& mode = modes.front();
  if (hfunc.amplitude != 0 && hfunc.value(mode.u) == 0)
    throw std::domain_error("destabilize_embedded: h must not vanish at the mode");

  // delta f0' = (h f0')' = h' f0' + h f0''
  const VelocityGrid& g = p.grid();
  std::vector<double> delta(g.n());
  for (int i = 0; i < g.n(); ++i) {
    const double v = g.node(i);
    delta[i] = hfunc.derivative(v) * p.eval(v, 1) + hfunc.value(v) * p.eval(v, 2);
  }
  EquilibriumProfile pert = p.with_sampled_delta(std::move(delta));
  const double norm = w11_norm_numeric(pert, p);
  return finish_additive(p, std::move(pert), PerturbationKind::embedded, norm, ChiParams{},
                         zero_count(p));
}

EquilibriumProfile make_synthetic_tangency(double base_width, double u_star) {
  if (!(base_width > 0)) throw std::invalid_argument("make_synthetic_tangency: bad width");
  if (!(std::abs(u_star) > base_width))
    throw std::invalid_argument("make_synthetic_tangency: u* must sit on the tail");

  const double W = base_width;
  const double sigma = 0.55 * W;
  const double xs = u_star / W;
  const double e = std::exp(-xs * xs);
  const double fp = -2 * xs * e / W;                  // base f0'(u*)
  const double fpp = (4 * xs * xs - 2) * e / (W * W); // base f0''(u*)
  const double R = fpp / fp;

  // Solve g'(u*) = -fp, g''(u*) = -fpp for a Gaussian bump g = w e^{-x^2},
  // x = (v-b)/sigma: the ratio condition gives 2x^2 + sigma R x - 1 = 0.
  const double disc = sigma * R * sigma * R + 8;
  double x = (-sigma * R - std::sqrt(disc)) / 4;
  if (u_star < 0) x = (-sigma * R + std::sqrt(disc)) / 4;
  const double b = u_star - sigma * x;
  const double w = fp * sigma * std::exp(x * x) / (2 * x);
  if (!(w > 0)) throw FixtureError("make_synthetic_tangency: bump weight came out nonpositive");

  EquilibriumProfile p = make_gaussian_mixture({{1.0, 0.0, W}, {w, b, sigma}});

  const auto modes = embedded_mode_scan(p);
  if (modes.size() != 1 || std::abs(modes[0].u - u_star) > 1e-6)
    throw FixtureError("make_synthetic_tangency: tangency verification failed");
  if (penrose_test(p).unstable())
    throw FixtureError("make_synthetic_tangency: fixture is not spectrally stable");
  return p;
}

}  // namespace vpstab
