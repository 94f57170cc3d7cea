#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "vpstab/dispersion.hpp"
#include "vpstab/equilibrium.hpp"
#include "vpstab/errors.hpp"
#include "vpstab/hilbert.hpp"
#include "vpstab/perturbation.hpp"

using namespace vpstab;

namespace {

// Exact PV int chi/(v-u) dv by parts: chi has compact support, so
// PV int chi/(v-u) = -int chi'(v) ln|v-u| dv, and chi' is constant on each
// piece. Every term is finite (x ln x -> 0), and the route is independent of
// the x log x closed form.
double chi_pv_oracle(double u, const ChiParams& p) {
  auto xlnx = [](double x) { return x == 0 ? 0.0 : x * std::log(std::abs(x)); };
  const auto bp = chi_breakpoints(p);
  double s = 0;
  for (size_t j = 0; j + 1 < bp.size(); ++j) {
    const double v1 = p.center + bp[j], v2 = p.center + bp[j + 1];
    const double slope = chi_prime(0.5 * (v1 + v2), p);
    s -= slope * (xlnx(v2 - u) - xlnx(v1 - u) - (v2 - v1));
  }
  return s;
}

double chi_norm_oracle(const ChiParams& p, const VelocityGrid& g) {
  // refined trapezoid of |chi| + total variation, on grid nodes merged with
  // the breakpoints (chi is piecewise linear, so this is exact up to roundoff)
  std::vector<double> xs;
  for (int i = 0; i < g.n(); ++i) xs.push_back(g.node(i));
  for (double b : chi_breakpoints(p)) {
    xs.push_back(p.center + b);
    xs.push_back(p.center + 0.5 * b);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  double l1 = 0, tv = 0;
  for (size_t i = 0; i + 1 < xs.size(); ++i) {
    const double f1 = chi(xs[i], p), f2 = chi(xs[i + 1], p);
    l1 += 0.5 * (std::abs(f1) + std::abs(f2)) * (xs[i + 1] - xs[i]);
    tv += std::abs(f2 - f1);
  }
  return l1 + tv;
}

}  // namespace

TEST_CASE("chi piecewise values and continuity") {
  auto p = ChiParams::with_defaults(0.1);
  CHECK(p.d == 0.1);
  CHECK(p.eps == doctest::Approx(std::exp(-10.0)));
  CHECK(chi(0.0, p) == 0.0);
  CHECK(chi(p.eps, p) == doctest::Approx(p.h));
  CHECK(chi(2 * p.h + p.d + p.eps, p) == doctest::Approx(0.0));
  for (double b : chi_breakpoints(p)) {
    // one-sided limits agree up to the local slope times the probe offset
    const double lo = chi(b - 1e-13, p), hi = chi(b + 1e-13, p);
    CHECK(std::abs(hi - lo) < 1e-12 + 3e-13 * (p.h / p.eps));
  }
  // odd function
  for (double v : {0.01, 0.05, 0.17, 0.3}) CHECK(chi(-v, p) == doctest::Approx(-chi(v, p)));
}

TEST_CASE("chi antiderivative vanishes at both ends") {
  auto p = ChiParams::with_defaults(0.05, 0.3);
  CHECK(chi_antiderivative(p.center - p.support_radius() - 0.1, p) == 0.0);
  CHECK(chi_antiderivative(p.center + p.support_radius() + 0.1, p) == doctest::Approx(0.0).epsilon(1e-14));
  // derivative of the antiderivative is chi (spot check by finite differences)
  for (double v : {0.25, 0.3, 0.35}) {
    const double fd =
        (chi_antiderivative(v + 1e-7, p) - chi_antiderivative(v - 1e-7, p)) / 2e-7;
    CHECK(fd == doctest::Approx(chi(v, p)).epsilon(1e-5));
  }
}

TEST_CASE("chi Hilbert transform against the piecewise-exact oracle") {
  for (double h : {0.1, 0.05, 0.02}) {
    auto p = ChiParams::with_defaults(h);
    p.eps = 1e-4;  // keep the oracle's logs finite at sane magnitudes
    for (double u : {0.0, 0.013, h / 2, 3 * h, -5 * h, 10 * h}) {
      CHECK(chi_hilbert(u, p) == doctest::Approx(chi_pv_oracle(u, p)).epsilon(1e-9));
    }
  }
}

TEST_CASE("chi Hilbert center value is 2 + O(h log h)") {
  auto p = ChiParams::with_defaults(0.01);
  CHECK(p.eps == doctest::Approx(std::exp(-100.0)));
  const double v = chi_hilbert(0.0, p);
  CHECK(v > 1.5);
  CHECK(v < 2.2);
  // even in u
  for (double u : {0.005, 0.02, 0.3}) CHECK(chi_hilbert(-u, p) == doctest::Approx(chi_hilbert(u, p)));
}

TEST_CASE("chi Hilbert transform matches pi * pv_hilbert on a core-resolving grid") {
  VelocityGrid g(8.0, 256001);
  for (double h : {0.1, 0.05, 0.02}) {
    ChiParams p = ChiParams::with_defaults(h);
    p.eps = std::max(p.eps, 8 * g.spacing());  // resolvable core
    std::vector<double> vals(g.n());
    for (int i = 0; i < g.n(); ++i) vals[i] = chi(g.node(i), p);
    SampledFunction f(g, std::move(vals));
    for (double u : {0.0, h / 2, 5 * h}) {
      const double quad = M_PI * pv_hilbert(f, u, chi(u, p), chi_prime(u, p));
      CHECK(std::abs(quad - chi_hilbert(u, p)) < 1e-3);
    }
  }
}

TEST_CASE("chi Hilbert decay outside the support") {
  for (double h : {0.1, 0.05, 0.02}) {
    auto p = ChiParams::with_defaults(h);
    const double c0 = chi_hilbert(0.0, p);
    for (double f : {3.5, 5.0, 8.0, 20.0}) {
      const double u = f * h;
      CHECK(std::abs(chi_hilbert(u, p)) < 2 * c0 * (3 * h / u));
    }
  }
}

TEST_CASE("chi W11 norm formula") {
  ChiParams p;
  p.h = 0.1;
  p.d = 0.1;
  p.eps = std::exp(-10.0);
  CHECK(chi_norm_w11(p) == doctest::Approx(0.4400045399929762).epsilon(1e-12));
  // vanishes with h
  CHECK(chi_norm_w11(ChiParams::with_defaults(1e-4)) < 5e-4);
  // matches refined numerical |chi| + TV
  auto m = make_maxwellian(0, 1);
  for (double h : {0.1, 0.03}) {
    auto q = ChiParams::with_defaults(h, m.grid());
    CHECK(chi_norm_w11(q) == doctest::Approx(chi_norm_oracle(q, m.grid())).epsilon(1e-4));
  }
}

TEST_CASE("chi Cauchy integral obeys the Plemelj limit and the derivative kernel") {
  auto p = ChiParams::with_defaults(0.05);
  p.eps = 1e-3;
  for (double u : {0.0, 0.02, -0.11}) {
    const std::complex<double> boundary{chi_hilbert(u, p), M_PI * chi(u, p)};
    double prev = 1e300;
    for (double d : {1e-2, 1e-3, 1e-4, 1e-5}) {
      const double gap = std::abs(chi_cauchy({u, d}, p, 1) - boundary);
      CHECK(gap < prev);
      prev = gap;
    }
    CHECK(prev < 2e-3);
  }
  const std::complex<double> u0{0.04, 0.2};
  const std::complex<double> fd =
      (chi_cauchy(u0 + 1e-6, p, 1) - chi_cauchy(u0 - 1e-6, p, 1)) / 2e-6;
  CHECK(std::abs(fd - chi_cauchy(u0, p, 2)) < 1e-6);
}

TEST_CASE("rearrangement maps") {
  RearrangementMap map{0.5, 1.0, 0.1};
  CHECK(map.shape(0.5) == doctest::Approx(1.0));
  CHECK(map.shape(1.6) == 0.0);
  CHECK(map.map(0.5) == doctest::Approx(0.6));
  CHECK(map.admissible_on(VelocityGrid(8, 4001)));
  RearrangementMap bad{0.5, 0.3, 0.3};  // steep: amplitude * max|s'| > 1
  CHECK_FALSE(bad.admissible_on(VelocityGrid(8, 4001)));

  auto m = make_maxwellian(0, 1);
  CHECK_THROWS_AS(rearrange(m, bad), std::invalid_argument);

  // a = 0 is the identity
  auto id = rearrange(m, {0.5, 1.0, 0.0});
  for (int i = 0; i < m.grid().n(); i += 101)
    CHECK(id.profile.f0_samples()[i] == doctest::Approx(m.f0_samples()[i]).epsilon(1e-14));
  CHECK(id.norm_w11 < 1e-12);
}

TEST_CASE("rearrangements preserve the zero count of f0'") {
  std::mt19937 rng(777);
  std::uniform_real_distribution<double> center(-2.0, 2.0), radius(0.4, 1.5), amp(-0.5, 0.5);
  auto m = make_maxwellian(0, 1);
  auto b = make_bi_maxwellian(1, 1);
  int checked = 0;
  for (int t = 0; t < 100; ++t) {
    RearrangementMap map{center(rng), radius(rng), amp(rng)};
    if (!map.admissible_on(m.grid())) continue;
    ++checked;
    const auto& base = (t % 2 == 0) ? m : b;
    const auto r = rearrange(base, map);
    CHECK(find_critical_points(r.profile).size() == find_critical_points(base).size());
  }
  CHECK(checked > 60);
}

TEST_CASE("rearrangements of the Maxwellian stay stable") {
  std::mt19937 rng(1234);
  std::uniform_real_distribution<double> center(-1.5, 1.5), radius(0.5, 1.2), amp(-0.4, 0.4);
  auto m = make_maxwellian(0, 1);
  for (int t = 0; t < 30; ++t) {
    RearrangementMap map{center(rng), radius(rng), amp(rng)};
    if (!map.admissible_on(m.grid())) continue;
    const auto r = rearrange(m, map);
    CHECK_FALSE(penrose_test(r.profile).unstable());
  }
}

TEST_CASE("destabilize_w11 reproduces the perturbed-Maxwellian scenario") {
  auto m = make_maxwellian(0, 1);
  const auto r = destabilize_w11(m, 0.0, 0.05);
  CHECK(r.after.unstable());
  CHECK_FALSE(r.before.unstable());
  CHECK(r.zero_count_delta == 2);
  CHECK(r.winding_before == 0);
  CHECK(r.winding_after == 1);
  CHECK(r.perturbed.norm_w11 == doctest::Approx(chi_norm_w11(r.chi_used)));
  CHECK(r.unstable_k_band.first == 0.0);
  CHECK(r.unstable_k_band.second > 0.5);

  // the perturbed contour gains two positive-axis crossings and one negative
  const auto crits = find_critical_points(r.perturbed.profile);
  REQUIRE(crits.size() == 3);
  int pos = 0, neg = 0;
  for (const auto& c : crits) {
    const double er = epsilon_boundary(r.perturbed.profile, r.k_reported, c.u).real();
    (er > 0 ? pos : neg) += 1;
  }
  CHECK(pos == 2);
  CHECK(neg == 1);

  CHECK_THROWS_AS(destabilize_w11(make_bi_maxwellian(1, 1), 0.0, 0.05), std::domain_error);
  CHECK_THROWS_AS(destabilize_w11(m, 3.0, 0.05), std::domain_error);
}

TEST_CASE("destabilize_w11 norm shrinks while instability persists") {
  auto m = make_maxwellian(0, 1);
  double prev = 1e300;
  for (double h : {0.05, 0.02, 0.01}) {
    const auto r = destabilize_w11(m, 0.0, h);
    CHECK(r.after.unstable());
    CHECK(r.perturbed.norm_w11 < prev);
    prev = r.perturbed.norm_w11;
  }
}

TEST_CASE("destabilize_rearrangement at a valley-side crossing") {
  auto b = make_bi_maxwellian(0.75, 1);
  const auto crits = find_critical_points(b);
  REQUIRE(crits.size() == 3);
  const auto r = destabilize_rearrangement(b, crits[2].u, 0.01);
  CHECK(r.after.unstable());
  CHECK(r.perturbed.norm_w11 < 0.05);
  CHECK(r.winding_after == 1);
  CHECK(r.zero_count_delta == 2);  // first-order realization: the documented pair

  CHECK_THROWS_WITH_AS(destabilize_rearrangement(make_maxwellian(0, 1), 0.0, 0.01),
                       "destabilize_rearrangement: no admissible valley", std::domain_error);
}

TEST_CASE("destabilize_k0 at the critical separation") {
  const double c_star = critical_separation(1.0);
  auto p = make_bi_maxwellian(c_star, 1);

  const auto r5 = destabilize_k0(p, 0.0, {0.0, 0.5, 0.05});
  const auto r2 = destabilize_k0(p, 0.0, {0.0, 0.5, 0.02});
  CHECK(r5.after.unstable());
  CHECK(r2.after.unstable());
  CHECK(r2.unstable_k_band.second < r5.unstable_k_band.second);
  CHECK(std::abs(r2.perturbed.profile.eval(0.0, 1)) < 1e-12);  // crossing preserved by symmetry
  CHECK(r2.truncation_error > 0);
  CHECK(r2.truncation_error < 0.1 * 0.02 * M_PI);

  // reported sup|delta f0'| scales linearly with the amplitude
  CHECK(r5.sup_delta_fp / r2.sup_delta_fp == doctest::Approx(2.5).epsilon(1e-6));
  CHECK(r5.sup_delta_fp < 0.05 * 3.0);  // bump-dependent constant stays modest

  // zero-amplitude bump leaves the profile unchanged
  const auto r0 = destabilize_k0(p, 0.0, {0.0, 0.5, 0.0});
  CHECK_FALSE(r0.after.unstable());
  CHECK(r0.perturbed.norm_w11 == doctest::Approx(0.0));

  CHECK_THROWS_AS(destabilize_k0(make_bi_maxwellian(1, 1), 0.0, {0.0, 0.5, 0.02}),
                  std::domain_error);
}

TEST_CASE("synthetic tangency fixture") {
  auto fx = make_synthetic_tangency(1.0, 2.0);
  const auto modes = embedded_mode_scan(fx);
  REQUIRE(modes.size() == 1);
  CHECK(modes[0].u == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(std::abs(epsilon_boundary(fx, modes[0].k, modes[0].u)) < 1e-8);
  double mn = 1e300;
  for (double x : fx.f0_samples()) mn = std::min(mn, x);
  CHECK(mn >= 0.0);
  CHECK_FALSE(penrose_test(fx).unstable());

  CHECK_THROWS_AS(make_synthetic_tangency(1.0, 0.5), std::invalid_argument);
}

TEST_CASE("destabilize_embedded splits the tangency into crossings") {
  auto fx = make_synthetic_tangency(1.0, 2.0);
  const auto r = destabilize_embedded(fx, {2.0, 0.4, 0.01});
  CHECK(r.after.unstable());
  CHECK(r.winding_after == 1);

  // C0 size scales linearly with the amplitude of h
  const auto r2 = destabilize_embedded(fx, {2.0, 0.4, 0.005});
  double s1 = 0, s2 = 0;
  for (int i = 0; i < fx.grid().n(); ++i) {
    const double v = fx.grid().node(i);
    s1 = std::max(s1, std::abs(r.perturbed.profile.eval(v, 1) - fx.eval(v, 1)));
    s2 = std::max(s2, std::abs(r2.perturbed.profile.eval(v, 1) - fx.eval(v, 1)));
  }
  CHECK(s1 / s2 == doctest::Approx(2.0).epsilon(1e-9));

  // zero h leaves the profile unchanged
  const auto r0 = destabilize_embedded(fx, {2.0, 0.4, 0.0});
  CHECK_FALSE(r0.after.unstable());
  CHECK(r0.perturbed.norm_w11 == doctest::Approx(0.0));

  CHECK_THROWS_AS(destabilize_embedded(make_maxwellian(0, 1), {0.0, 0.4, 0.01}),
                  std::domain_error);
}
