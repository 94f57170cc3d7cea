#include "vpstab/dispersion.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <thread>

#include "vpstab/errors.hpp"
#include "vpstab/hilbert.hpp"

namespace vpstab {

namespace {

constexpr double kOriginTol = 1e-12;     // sample this close to the origin => critical state
constexpr double kMaxArgStep = M_PI / 8; // refinement target per contour segment
constexpr double kAxisHugProximity = 1e-6;  // stop refining same-side axis passes inside this
constexpr double kClosureTol = 1e-3;     // tails are extended until |eps - 1| falls below this
constexpr double kK0Fraction = 1e-8;     // |pv| below this times the crossing scale => k0-critical
constexpr double kRootResidual = 1e-10;
constexpr int kNewtonMaxIter = 50;

// Infinitesimal imaginary part carried by tail-extension samples: beyond the
// grid f0' underflows, but its sign is structural (f0 >= 0 and decaying), and
// the winding accumulation needs the side of the real axis.
constexpr double kTailSide = 1e-300;

// PV int f0'/(v-u) dv over the full profile (chi terms in closed form).
double pv_integral_profile(const EquilibriumProfile& p, double u) {
  double s = detail::pv_integral_raw(p.f0p_quadrature_samples(), p.grid(), u,
                                     p.f0p_quad_value(u), p.f0p_quad_deriv(u));
  for (const auto& t : p.chi_terms()) s += chi_hilbert(u, t);
  return s;
}

// Ordinary int f0'/(v-u) dv for real |u| > v_max.
double tail_integral_profile(const EquilibriumProfile& p, double u) {
  double s = detail::cauchy_tail_raw(p.f0p_quadrature_samples(), p.grid(), u);
  for (const auto& t : p.chi_terms()) s += chi_hilbert(u, t);
  return s;
}

void parallel_for(int count, const std::function<void(int)>& fn) {
  unsigned hw = std::thread::hardware_concurrency();
  int T = std::min<int>(hw ? static_cast<int>(hw) : 1, count);
  if (T <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errs(T);
  std::vector<std::thread> threads;
  threads.reserve(T);
  for (int t = 0; t < T; ++t) {
    threads.emplace_back([&, t] {
      try {
        for (int i; (i = next.fetch_add(1)) < count;) fn(i);
      } catch (...) {
        errs[t] = std::current_exception();
      }
    });
  }
  for (auto& th : threads) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

}  // namespace

double hilbert_f0p(const EquilibriumProfile& p, double u) {
  if (!(std::abs(u) < p.grid().v_max())) throw std::domain_error("hilbert_f0p: |u| must be below v_max");
  return pv_integral_profile(p, u) / M_PI;
}

std::complex<double> cauchy_f0p(const EquilibriumProfile& p, std::complex<double> u, int order) {
  if (!(u.imag() > 0)) throw std::domain_error("cauchy_f0p: Im u must be positive");
  std::complex<double> s = detail::cauchy_uhp_raw(p.f0p_quadrature_samples(), p.grid(), u, order);
  for (const auto& t : p.chi_terms()) s += chi_cauchy(u, t, order);
  return s;
}

std::complex<double> epsilon_boundary(const EquilibriumProfile& p, double k, double u) {
  if (!(k > 0)) throw std::domain_error("epsilon_boundary: k must be positive");
  if (!(std::abs(u) < p.grid().v_max()))
    throw std::domain_error("epsilon_boundary: |u| must be below v_max");
  const double k2 = k * k;
  return {1.0 - pv_integral_profile(p, u) / k2, -M_PI * p.eval(u, 1) / k2};
}

int winding_number(const PenroseContour& c) {
  if (c.samples.size() < 2) throw std::invalid_argument("winding_number: contour too short");
  double total = 0;
  const size_t m = c.samples.size();
  auto at = [&](size_t i) { return i < m ? c.samples[i].eps : c.closure; };
  for (size_t i = 0; i <= m; ++i) {
    const std::complex<double> a = at(i % (m + 1));
    const std::complex<double> b = at((i + 1) % (m + 1));
    if (std::abs(a) < kOriginTol)
      throw CriticalContourError("Penrose contour touches the origin (critical state)");
    total += std::arg(b / a);
  }
  const double w = total / (2 * M_PI);
  const int W = static_cast<int>(std::lround(w));
  if (std::abs(w - W) > 0.1)
    throw InvariantViolationError("winding_number: argument accumulation exceeds error budget");
  return W;
}

int winding_by_crossings(const EquilibriumProfile& p, double k) {
  if (!(k > 0)) throw std::domain_error("winding_by_crossings: k must be positive");
  int W = 0;
  for (const auto& c : find_critical_points(p)) {
    if (!c.is_crossing()) continue;
    const double eps_re = 1.0 - pv_integral_profile(p, c.u) / (k * k);
    if (eps_re < 0) W += c.orientation();
  }
  return W;
}

namespace {

// The k0 guard: |pv| below kK0Fraction of the largest crossing |pv| means the
// point sits at the k=0 critical state rather than deciding the verdict.
struct PvTable {
  std::vector<CriticalPoint> crits;
  std::vector<double> pv;  // per critical point (crossings and tangencies alike)
  double crossing_scale = 0;
};

PvTable pv_at_critical_points(const EquilibriumProfile& p) {
  PvTable t;
  t.crits = find_critical_points(p);
  t.pv.reserve(t.crits.size());
  for (const auto& c : t.crits) {
    const double pv = pv_integral_profile(p, c.u);
    t.pv.push_back(pv);
    if (c.is_crossing()) t.crossing_scale = std::max(t.crossing_scale, std::abs(pv));
  }
  return t;
}

}  // namespace

StabilityReport penrose_test(const EquilibriumProfile& p) {
  StabilityReport r;
  const PvTable t = pv_at_critical_points(p);
  const double k0_tol = kK0Fraction * t.crossing_scale;
  for (size_t i = 0; i < t.crits.size(); ++i) {
    const auto& c = t.crits[i];
    if (!c.is_crossing()) continue;
    if (std::abs(t.pv[i]) <= k0_tol) {
      r.k0_points.push_back(c.u);
    } else if (t.pv[i] > 0) {
      r.violations.push_back({c.u, t.pv[i]});
      r.unstable_k_bands.emplace_back(0.0, std::sqrt(t.pv[i]));
    }
  }
  r.verdict = r.violations.empty() ? StabilityReport::Verdict::stable
                                   : StabilityReport::Verdict::unstable;
  return r;
}

std::vector<EmbeddedMode> embedded_mode_scan(const EquilibriumProfile& p) {
  std::vector<EmbeddedMode> out;
  const PvTable t = pv_at_critical_points(p);
  for (size_t i = 0; i < t.crits.size(); ++i) {
    if (t.crits[i].is_crossing()) continue;
    if (t.pv[i] > 0) out.push_back({t.crits[i].u, std::sqrt(t.pv[i])});
  }
  return out;
}

std::vector<double> k0_critical_scan(const EquilibriumProfile& p) {
  std::vector<double> out;
  const PvTable t = pv_at_critical_points(p);
  const double k0_tol = kK0Fraction * t.crossing_scale;
  for (size_t i = 0; i < t.crits.size(); ++i)
    if (t.crits[i].is_crossing() && std::abs(t.pv[i]) <= k0_tol) out.push_back(t.crits[i].u);
  return out;
}

double critical_separation(double width) { return critical_separation(width, 0.75, 1.0, nullptr); }

double critical_separation(double width, double lo, double hi, std::vector<SweepRow>* log) {
  if (!(width > 0)) throw std::domain_error("critical_separation: width must be positive");
  auto pv0 = [&](double c) {
    return pv_integral_profile(make_bi_maxwellian(c * width, width), 0.0);
  };
  double a = lo, b = hi;
  double fa = pv0(a), fb = pv0(b);
  if (!(fa < 0 && fb > 0))
    throw SolverError("critical_separation: bracket does not straddle a sign change", 0);
  double mid = 0.5 * (a + b), fm = 0;
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (a + b);
    fm = pv0(mid);
    if (log) log->push_back({a, b, fm});
    if (std::abs(fm) < 1e-8 && b - a < 1e-7) break;
    if (fm < 0)
      a = mid;
    else
      b = mid;
  }
  return mid * width;
}

std::vector<double> default_k_scan(double k_lo, double k_hi, int count) {
  if (!(k_lo > 0 && k_hi > k_lo && count >= 2)) throw std::invalid_argument("bad k scan");
  std::vector<double> ks(count);
  const double r = std::log(k_hi / k_lo) / (count - 1);
  for (int i = 0; i < count; ++i) ks[i] = k_lo * std::exp(r * i);
  return ks;
}

Analyzer::Analyzer(EquilibriumProfile profile) : p_(std::move(profile)) {
  const VelocityGrid& g = p_.grid();
  const int n = g.n();
  const auto& q = p_.f0p_quadrature_samples();
  H_.assign(n, 0.0);
  for (int i = 1; i + 1 < n; ++i) {
    const double u = g.node(i);
    double s = detail::pv_integral_raw(q, g, u, q[i], p_.f0p_quad_deriv(u));
    for (const auto& t : p_.chi_terms()) s += chi_hilbert(u, t);
    H_[i] = s / M_PI;
  }
  f0p_full_.resize(n);
  for (int i = 0; i < n; ++i) f0p_full_[i] = p_.eval(g.node(i), 1);
  crits_ = find_critical_points(p_);
}

double Analyzer::hilbert_at(double u) const {
  const VelocityGrid& g = p_.grid();
  const int i = g.nearest(u);
  if (i > 0 && i + 1 < g.n() && std::abs(g.node(i) - u) < 1e-12) return H_[i];
  return pv_integral_profile(p_, u) / M_PI;
}

std::complex<double> Analyzer::epsilon(double k, double u) const {
  if (!(k > 0)) throw std::domain_error("epsilon: k must be positive");
  if (!(std::abs(u) < p_.grid().v_max())) throw std::domain_error("epsilon: |u| must be below v_max");
  const double k2 = k * k;
  return {1.0 - M_PI * hilbert_at(u) / k2, -M_PI * p_.eval(u, 1) / k2};
}

std::complex<double> Analyzer::eps_tail(double k, double u) const {
  return {1.0 - tail_integral_profile(p_, u) / (k * k), 0.0};
}

PenroseContour Analyzer::contour(double k) const {
  if (!(k > 0)) throw std::domain_error("contour: k must be positive");
  const VelocityGrid& g = p_.grid();
  const int n = g.n();
  const double k2 = k * k;

  // Seed abscissae: interior nodes, registered hints, and the zeros of f0'.
  // The zeros pin the contour's real-axis touches; crossings whose eps_re dip
  // is narrower than any resolvable u interval are captured exactly this way.
  std::vector<double> us;
  us.reserve(n + p_.scan_hints().size() + crits_.size());
  for (int i = 1; i + 1 < n; ++i) us.push_back(g.node(i));
  const double interior = g.v_max() - g.spacing() / 2;
  for (double x : p_.scan_hints())
    if (std::abs(x) < interior) us.push_back(x);
  for (const auto& c : crits_)
    if (std::abs(c.u) < interior) us.push_back(c.u);
  std::sort(us.begin(), us.end());
  us.erase(std::unique(us.begin(), us.end()), us.end());

  std::vector<DispersionSample> seed(us.size());
  for (size_t j = 0; j < us.size(); ++j) {
    const double u = us[j];
    seed[j] = {u, {1.0 - M_PI * hilbert_at(u) / k2, -M_PI * p_.eval(u, 1) / k2}};
  }

  PenroseContour out;
  out.k = k;
  out.samples.reserve(seed.size() + 256);

  // Left tail, walked outward then reversed into ascending-u order.
  std::vector<DispersionSample> tail_left, tail_right;
  for (int side = 0; side < 2; ++side) {
    auto& tail = side == 0 ? tail_left : tail_right;
    const double sgn_u = side == 0 ? -1.0 : 1.0;
    const double im = side == 0 ? -kTailSide : kTailSide;  // sign of -f0' on that tail
    double u = g.v_max() + g.spacing();
    for (int j = 0; j < 400; ++j) {
      std::complex<double> e = eps_tail(k, sgn_u * u);
      if (std::abs(e.real()) < 1e-9) {  // do not park a sample on the axis zero
        u *= 1.003;
        e = eps_tail(k, sgn_u * u);
      }
      tail.push_back({sgn_u * u, {e.real(), im}});
      if (std::abs(e - out.closure) < kClosureTol) break;
      u *= 1.06;
    }
  }
  std::reverse(tail_left.begin(), tail_left.end());
  for (const auto& s : tail_left) out.samples.push_back(s);

  // Interior with adaptive bisection refinement in u. Between consecutive
  // samples Im(eps) keeps one sign (its zeros are pinned as seeds), so a
  // chord never aliases the winding; refinement only sharpens the argument
  // accumulation. Where the contour hugs the axis on one side we therefore
  // stop descending rather than manufacture samples arbitrarily close to the
  // origin (the tail of f0' makes such passes exponentially shallow).
  int budget = 30000;
  std::function<void(const DispersionSample&, const DispersionSample&, int)> refine =
      [&](const DispersionSample& a, const DispersionSample& b, int depth) {
        const double da = std::abs(std::arg(b.eps / a.eps));
        const bool same_side = (a.eps.imag() > 0 && b.eps.imag() > 0) ||
                               (a.eps.imag() < 0 && b.eps.imag() < 0);
        const bool axis_hug =
            same_side && std::min(std::abs(a.eps), std::abs(b.eps)) < kAxisHugProximity;
        if (da < kMaxArgStep || axis_hug || depth >= 48 || budget <= 0 ||
            b.u - a.u < 4e-16 * std::max(1.0, std::abs(a.u))) {
          out.samples.push_back(b);
          return;
        }
        --budget;
        const double um = 0.5 * (a.u + b.u);
        const DispersionSample mid{um,
                                   {1.0 - M_PI * hilbert_at(um) / k2, -M_PI * p_.eval(um, 1) / k2}};
        refine(a, mid, depth + 1);
        refine(mid, b, depth + 1);
      };

  out.samples.push_back(seed.front());
  for (size_t j = 0; j + 1 < seed.size(); ++j) refine(seed[j], seed[j + 1], 0);

  for (const auto& s : tail_right) out.samples.push_back(s);
  return out;
}

int Analyzer::winding(double k) const { return winding_number(contour(k)); }

std::vector<std::complex<double>> Analyzer::roots(double k) const {
  const int W = winding(k);
  if (W <= 0) return {};

  const VelocityGrid& g = p_.grid();
  const double k2 = k * k;

  // Start near the boundary minimum of |eps|.
  double best = 1e300;
  std::vector<std::pair<double, double>> mins;  // (|eps|, u)
  for (int i = 1; i + 1 < g.n(); ++i) {
    const std::complex<double> e{1.0 - M_PI * H_[i] / k2, -M_PI * f0p_full_[i] / k2};
    const double a = std::abs(e);
    best = std::min(best, a);
    mins.emplace_back(a, g.node(i));
  }
  double centroid = 0;
  int cnt = 0;
  for (const auto& [a, u] : mins)
    if (a <= 1.02 * best + 1e-300) {
      centroid += u;
      ++cnt;
    }
  centroid /= std::max(cnt, 1);

  auto eps_at = [&](std::complex<double> u) { return 1.0 - cauchy_f0p(p_, u, 1) / k2; };
  auto eps_prime_at = [&](std::complex<double> u) { return -cauchy_f0p(p_, u, 2) / k2; };

  // Roots emerge from the crossings that the winding counts; probe a ladder
  // of heights above each and start where |eps| is already smallest.
  std::vector<std::complex<double>> starts;
  for (const auto& c : crits_) {
    if (!c.is_crossing()) continue;
    if (!(1.0 - pv_integral_profile(p_, c.u) / k2 < 0)) continue;
    std::complex<double> best_u{c.u, 0.3};
    double best_a = 1e300;
    for (double y : {1.5, 0.8, 0.4, 0.2, 0.1, 0.05, 0.025, 0.012, 0.006}) {
      const double a = std::abs(eps_at({c.u, y}));
      if (a < best_a) {
        best_a = a;
        best_u = {c.u, y};
      }
    }
    starts.push_back(best_u);
  }
  std::vector<double> start_re{centroid};
  for (const auto& c : crits_) start_re.push_back(c.u);
  const double heights[] = {0.3, 0.1, 0.8, 1.5, 0.03, 0.008};
  for (double y : heights)
    for (double x : start_re) starts.push_back({x, y});

  std::vector<std::complex<double>> roots;
  auto newton_from = [&](std::complex<double> u0) -> bool {
    std::complex<double> u = u0;
    for (int it = 0; it < kNewtonMaxIter; ++it) {
      if (!std::isfinite(u.real()) || !std::isfinite(u.imag()) || !(u.imag() > 0)) return false;
      const std::complex<double> f = eps_at(u);
      if (std::abs(f) < kRootResidual) {
        roots.push_back(u);
        return true;
      }
      std::complex<double> corr = 0;
      for (const auto& r : roots) corr += 1.0 / (u - r);
      const std::complex<double> denom = eps_prime_at(u) - f * corr;
      if (denom == 0.0) return false;
      std::complex<double> step = -f / denom;
      // stay in the upper half plane
      int halvings = 0;
      while ((u + step).imag() <= 1e-14 && halvings < 40) {
        step *= 0.5;
        ++halvings;
      }
      if (halvings >= 40) return false;
      u += step;
      if (std::abs(step) < 1e-15 * (1.0 + std::abs(u))) {
        if (std::abs(eps_at(u)) < 1e3 * kRootResidual) {
          roots.push_back(u);
          return true;
        }
        return false;
      }
    }
    return false;
  };

  for (const auto& u0 : starts) {
    if (static_cast<int>(roots.size()) >= W) break;
    newton_from(u0);
  }
  if (static_cast<int>(roots.size()) < W)
    throw SolverError("find_roots_uhp: Newton failed to locate all Nyquist-counted roots", W);

  // polish without deflation
  for (auto& r : roots) {
    for (int it = 0; it < 4; ++it) {
      const std::complex<double> f = eps_at(r);
      const std::complex<double> fp = eps_prime_at(r);
      if (fp == 0.0) break;
      const std::complex<double> step = -f / fp;
      if ((r + step).imag() <= 0.0) break;
      r += step;
      if (std::abs(step) < 1e-15 * (1.0 + std::abs(r))) break;
    }
  }
  std::sort(roots.begin(), roots.end(), [](auto a, auto b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return roots;
}

SpectrumClass Analyzer::classify(double k, std::complex<double> lambda) const {
  if (!(k > 0)) throw std::domain_error("classify: k must be positive");
  const std::complex<double> u = lambda / std::complex<double>(0.0, k);
  const double eps_tol = 1e-8;

  if (std::abs(u.imag()) > 1e-12) {
    const std::complex<double> ue = u.imag() > 0 ? u : std::conj(u);  // conjugate-pair symmetry
    const std::complex<double> e = 1.0 - cauchy_f0p(p_, ue, 1) / (k * k);
    return std::abs(e) < eps_tol ? SpectrumClass::point : SpectrumClass::resolvent;
  }

  const double ur = u.real();
  std::complex<double> e;
  if (std::abs(ur) < p_.grid().v_max())
    e = epsilon(k, ur);
  else
    e = eps_tail(k, ur);
  if (std::abs(e) < eps_tol) return SpectrumClass::point;
  for (const auto& c : crits_)
    if (std::abs(c.u - ur) < 1e-8) return SpectrumClass::residual;
  return SpectrumClass::continuous;
}

StabilityReport Analyzer::analyze(const std::vector<double>& k_scan) const {
  StabilityReport r = penrose_test(p_);
  r.embedded_modes = embedded_mode_scan(p_);

  // Make sure every winding-constant window is probed: the winding changes
  // only at the band edges k = sqrt(pv) of the violations (with overlapping
  // violations the windings of up and down crossings can cancel between
  // edges), so probe below the smallest edge and between consecutive edges.
  std::vector<double> ks = k_scan;
  std::vector<double> edges;
  for (const auto& band : r.unstable_k_bands) edges.push_back(band.second);
  std::sort(edges.begin(), edges.end());
  if (!edges.empty()) {
    ks.push_back(edges.front() / std::sqrt(2.0));
    for (size_t j = 0; j + 1 < edges.size(); ++j)
      ks.push_back(std::sqrt(edges[j] * edges[j + 1]));
  }
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

  r.per_k.assign(ks.size(), {});
  parallel_for(static_cast<int>(ks.size()), [&](int i) {
    PerKResult& pk = r.per_k[i];
    pk.k = ks[i];
    try {
      pk.winding = winding(ks[i]);
      if (pk.winding > 0) {
        try {
          pk.roots = roots(ks[i]);
        } catch (const SolverError&) {
          pk.roots_unresolved = true;  // band-edge roots below grid resolution
        }
      }
    } catch (const CriticalContourError&) {
      pk.origin_touch = true;
      pk.winding = 0;
    }
  });

  bool any_winding = false;
  for (const auto& pk : r.per_k) any_winding |= pk.winding > 0;
  if (any_winding != r.unstable())
    throw InvariantViolationError("analyze: winding scan disagrees with the Penrose criterion");
  return r;
}

PenroseContour penrose_contour(const EquilibriumProfile& p, double k) {
  return Analyzer(p).contour(k);
}

std::vector<std::complex<double>> find_roots_uhp(const EquilibriumProfile& p, double k) {
  return Analyzer(p).roots(k);
}

SpectrumClass classify_lambda(const EquilibriumProfile& p, double k, std::complex<double> lambda) {
  return Analyzer(p).classify(k, lambda);
}

StabilityReport analyze(const EquilibriumProfile& p, const std::vector<double>& k_scan) {
  return Analyzer(p).analyze(k_scan);
}

}  // namespace vpstab
