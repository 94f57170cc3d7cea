#include <doctest.h>

#include <cmath>
#include <complex>

#include "oracles.hpp"
#include "vpstab/dispersion.hpp"
#include "vpstab/equilibrium.hpp"
#include "vpstab/errors.hpp"

using namespace vpstab;
using cplx = std::complex<double>;

namespace {

EquilibriumProfile lorentzian_profile() {
  std::vector<double> v, f;
  for (int i = 0; i <= 4000; ++i) {
    const double x = -40.0 + 80.0 * i / 4000;
    v.push_back(x);
    f.push_back(1.0 / (M_PI * (1 + x * x)));
  }
  return make_tabulated(v, f, {.v_max = 40.0, .n = 4001});
}

}  // namespace

TEST_CASE("hilbert_f0p agrees with the Dawson closed form") {
  auto m = make_maxwellian(0, 1);
  for (double u : {0.0, 0.5, 1.3, -2.0}) {
    CHECK(hilbert_f0p(m, u) ==
          doctest::Approx(oracles::hilbert_gaussian_prime(u)).epsilon(1e-6));
  }
  auto b = make_bi_maxwellian(1, 1);
  const double want = oracles::hilbert_gaussian_prime(-1.0) + oracles::hilbert_gaussian_prime(1.0);
  CHECK(hilbert_f0p(b, 0.0) == doctest::Approx(want).epsilon(1e-6));
}

TEST_CASE("epsilon_boundary values") {
  auto m = make_maxwellian(0, 1);
  const cplx e = epsilon_boundary(m, 1.0, 0.0);
  CHECK(e.real() == doctest::Approx(1 + 2 * std::sqrt(M_PI)).epsilon(1e-8));
  CHECK(std::abs(e.imag()) < 1e-12);

  auto b = make_bi_maxwellian(1, 1);
  const cplx eb = epsilon_boundary(b, 0.4, 0.0);
  CHECK(std::abs(eb.imag()) < 1e-10);
  CHECK(eb.real() < 0);
  const double pv =
      M_PI * (oracles::hilbert_gaussian_prime(1.0) + oracles::hilbert_gaussian_prime(-1.0));
  CHECK(eb.real() == doctest::Approx(1 - pv / 0.16).epsilon(1e-6));

  CHECK_THROWS_AS(epsilon_boundary(m, -1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(epsilon_boundary(m, 1.0, 8.0), std::domain_error);
}

TEST_CASE("Penrose contours close at eps = 1 and wind correctly") {
  auto m = make_maxwellian(0, 1);
  Analyzer am(m);
  for (double k : {0.3, 1.0, 2.0}) {
    const auto c = am.contour(k);
    CHECK(std::abs(c.samples.front().eps - c.closure) < 1e-3);
    CHECK(std::abs(c.samples.back().eps - c.closure) < 1e-3);
    CHECK(winding_number(c) == 0);
  }

  auto b = make_bi_maxwellian(1, 1);
  Analyzer ab(b);
  CHECK(winding_number(ab.contour(0.3)) == 1);
  CHECK(winding_number(ab.contour(1.0)) == 0);
}

TEST_CASE("the zero profile maps to the constant contour at 1") {
  auto z = make_gaussian_mixture({{0.0, 0.0, 1.0}});
  CHECK(find_critical_points(z).empty());
  Analyzer an(z);
  const auto c = an.contour(0.7);
  for (size_t i = 0; i < c.samples.size(); i += 97)
    CHECK(std::abs(c.samples[i].eps - std::complex<double>(1, 0)) < 1e-250);
  CHECK(winding_number(c) == 0);
}

TEST_CASE("winding of synthetic contours") {
  PenroseContour c;
  c.k = 1;
  for (int j = 0; j < 64; ++j) {
    const double th = 2 * M_PI * j / 64;
    c.samples.push_back({static_cast<double>(j), cplx(1 + 0.5 * std::cos(th), 0.5 * std::sin(th))});
  }
  CHECK(winding_number(c) == 0);  // circle of radius 0.5 about 1: origin outside

  PenroseContour c2;
  c2.k = 1;
  c2.closure = {1.0, 0.0};
  for (int j = 0; j < 256; ++j) {
    const double th = 2 * M_PI * j / 256;
    c2.samples.push_back({static_cast<double>(j), cplx(std::cos(th), 1.2 * std::sin(th))});
  }
  CHECK(winding_number(c2) == 1);  // loop about the origin through the closure point

  PenroseContour c3 = c;
  c3.samples[10].eps = {1e-13, 0.0};
  CHECK_THROWS_AS(winding_number(c3), CriticalContourError);
}

TEST_CASE("winding_number equals winding_by_crossings across profiles and k") {
  std::vector<EquilibriumProfile> profiles;
  profiles.push_back(make_maxwellian(0, 1));
  for (double c : {0.5, 0.75, 1.0, 1.5}) profiles.push_back(make_bi_maxwellian(c, 1));
  for (const auto& p : profiles) {
    Analyzer an(p);
    for (double k : {0.1, 0.18, 0.3, 0.5, 0.85, 1.1, 1.7, 2.3, 3.1, 4.5}) {
      CHECK(an.winding(k) == winding_by_crossings(p, k));
    }
  }
}

TEST_CASE("penrose_test verdicts") {
  CHECK_FALSE(penrose_test(make_maxwellian(0, 1)).unstable());
  CHECK_FALSE(penrose_test(make_bi_maxwellian(0.75, 1)).unstable());

  const auto r = penrose_test(make_bi_maxwellian(1, 1));
  REQUIRE(r.unstable());
  REQUIRE(r.violations.size() == 1);
  CHECK(std::abs(r.violations[0].u) < 1e-8);
  const double pv = M_PI * 2 * oracles::hilbert_gaussian_prime(1.0);
  CHECK(r.violations[0].pv == doctest::Approx(pv).epsilon(1e-6));
  CHECK(r.unstable_k_bands[0].second == doctest::Approx(std::sqrt(pv)).epsilon(1e-6));
}

TEST_CASE("penrose_test verdict is scale invariant, bands scale as sqrt(alpha)") {
  auto p1 = make_gaussian_mixture({{1, -1, 1}, {1, 1, 1}});
  auto p2 = make_gaussian_mixture({{2, -1, 1}, {2, 1, 1}});
  const auto r1 = penrose_test(p1);
  const auto r2 = penrose_test(p2);
  CHECK(r1.unstable() == r2.unstable());
  REQUIRE(r1.unstable_k_bands.size() == r2.unstable_k_bands.size());
  CHECK(r2.unstable_k_bands[0].second ==
        doctest::Approx(std::sqrt(2.0) * r1.unstable_k_bands[0].second).epsilon(1e-9));

  auto s1 = make_bi_maxwellian(0.75, 1);
  auto s2 = make_gaussian_mixture({{0.5, -0.75, 1}, {0.5, 0.75, 1}});
  CHECK(penrose_test(s1).unstable() == penrose_test(s2).unstable());
}

TEST_CASE("find_roots_uhp") {
  auto m = make_maxwellian(0, 1);
  Analyzer am(m);
  CHECK(am.roots(0.5).empty());
  CHECK(am.roots(1.0).empty());

  auto b = make_bi_maxwellian(1, 1);
  Analyzer ab(b);
  for (double k : {0.2, 0.35, 0.6}) {
    const auto roots = ab.roots(k);
    REQUIRE(roots.size() == 1);
    CHECK(std::abs(roots[0].real()) < 1e-8);  // even profile: purely growing
    CHECK(roots[0].imag() > 0);
    CHECK(std::abs(1.0 - cauchy_f0p(b, roots[0], 1) / (k * k)) < 1e-10);
  }

  // Lorentzian: continuation roots sit in the lower half plane
  auto lor = lorentzian_profile();
  Analyzer al(lor);
  for (double k : {0.3, 1.0, 2.5}) CHECK(al.roots(k).empty());
}

TEST_CASE("deflation resolves a winding-2 root pair") {
  auto tri = make_gaussian_mixture({{1, -2, 0.8}, {0.8, 0, 0.8}, {1, 2, 0.8}});
  Analyzer an(tri);
  REQUIRE(an.winding(0.35) == 2);
  const auto roots = an.roots(0.35);
  REQUIRE(roots.size() == 2);
  CHECK(roots[0].real() == doctest::Approx(-roots[1].real()).epsilon(1e-8));
  CHECK(roots[0].imag() == doctest::Approx(roots[1].imag()).epsilon(1e-8));
  CHECK(roots[0].imag() > 0.1);
}

TEST_CASE("four-stream profile: winding 3 and a full root triple") {
  auto quad = make_gaussian_mixture({{1, -3, 0.7}, {0.9, -1, 0.7}, {0.9, 1, 0.7}, {1, 3, 0.7}});
  Analyzer an(quad);
  for (double k : {0.1, 0.35, 0.8}) {
    REQUIRE(an.winding(k) == 3);
    CHECK(winding_by_crossings(quad, k) == 3);
    const auto roots = an.roots(k);
    REQUIRE(roots.size() == 3);
    for (const auto& r : roots) {
      CHECK(r.imag() > 0);
      CHECK(std::abs(1.0 - cauchy_f0p(quad, r, 1) / (k * k)) < 1e-9);
    }
    // even profile: a purely growing root plus a conjugate-real pair
    CHECK(std::abs(roots[1].real()) < 1e-8);
    CHECK(roots[0].real() == doctest::Approx(-roots[2].real()).epsilon(1e-8));
  }
  CHECK(an.winding(2.0) == 0);
}

TEST_CASE("penrose verdict matches existence of unstable roots over the scan") {
  std::vector<EquilibriumProfile> profiles;
  profiles.push_back(make_maxwellian(0, 1));
  profiles.push_back(make_bi_maxwellian(0.75, 1));
  profiles.push_back(make_bi_maxwellian(1, 1));
  for (const auto& p : profiles) {
    Analyzer an(p);
    const auto rep = an.analyze(default_k_scan());
    bool any_roots = false;
    for (const auto& pk : rep.per_k) any_roots |= !pk.roots.empty() || pk.roots_unresolved;
    CHECK(any_roots == rep.unstable());
  }
}

TEST_CASE("classify_lambda") {
  auto m = make_maxwellian(0, 1);
  Analyzer am(m);
  CHECK(am.classify(1.0, {0.0, 0.0}) == SpectrumClass::residual);
  CHECK(am.classify(1.0, {0.0, 0.5}) == SpectrumClass::continuous);
  CHECK(am.classify(1.0, {1.0, 1.0}) == SpectrumClass::resolvent);

  auto b = make_bi_maxwellian(1, 1);
  Analyzer ab(b);
  const double k = 0.35;
  const auto roots = ab.roots(k);
  REQUIRE(roots.size() == 1);
  const cplx lambda = cplx(0, k) * roots[0];
  CHECK(ab.classify(k, lambda) == SpectrumClass::point);
  CHECK(ab.classify(k, std::conj(lambda)) == SpectrumClass::point);  // conjugate partner
}

TEST_CASE("analyzer epsilon agrees with the uncached boundary value") {
  auto b = make_bi_maxwellian(1, 1);
  Analyzer an(b);
  for (double k : {0.4, 1.3}) {
    for (double u : {0.0, 0.5, b.grid().node(1234), 1.23456789}) {
      const auto cached = an.epsilon(k, u);
      const auto fresh = epsilon_boundary(b, k, u);
      CHECK(std::abs(cached - fresh) < 1e-12 * (1 + std::abs(fresh)));
    }
  }
}

TEST_CASE("classification beyond the grid cutoff is continuous spectrum") {
  auto m = make_maxwellian(0, 1);
  Analyzer an(m);
  CHECK(an.classify(1.0, {0.0, 9.0}) == SpectrumClass::continuous);
  CHECK(an.classify(1.0, {0.0, -10.0}) == SpectrumClass::continuous);
}

TEST_CASE("embedded and k0 scans are empty away from critical states") {
  auto m = make_maxwellian(0, 1);
  CHECK(embedded_mode_scan(m).empty());
  CHECK(k0_critical_scan(m).empty());
  auto b = make_bi_maxwellian(1, 1);
  CHECK(embedded_mode_scan(b).empty());
  CHECK(k0_critical_scan(b).empty());
}

TEST_CASE("critical separation of the bi-Maxwellian") {
  std::vector<SweepRow> log;
  const double c_star = critical_separation(1.0, 0.75, 1.0, &log);
  CHECK(c_star > 0.75);
  CHECK(c_star < 1.0);
  CHECK(c_star == doctest::Approx(oracles::dawson_peak()).epsilon(2e-6));
  CHECK_FALSE(log.empty());

  // pv is monotone across the bracket
  double prev = -1e300;
  for (int i = 0; i < 20; ++i) {
    const double c = 0.75 + 0.25 * i / 19;
    const double pv = M_PI * hilbert_f0p(make_bi_maxwellian(c, 1), 0.0);
    CHECK(pv > prev);
    prev = pv;
  }

  // verdict flips across c*
  CHECK_FALSE(penrose_test(make_bi_maxwellian(c_star - 0.01, 1)).unstable());
  CHECK(penrose_test(make_bi_maxwellian(c_star + 0.01, 1)).unstable());
  // and at c* the k0 scan fires
  const auto k0 = k0_critical_scan(make_bi_maxwellian(c_star, 1));
  REQUIRE(k0.size() == 1);
  CHECK(std::abs(k0[0]) < 1e-8);

  CHECK_THROWS_AS(critical_separation(1.0, 0.1, 0.2, nullptr), SolverError);
}

TEST_CASE("width scaling of the critical separation") {
  const double c1 = critical_separation(1.0);
  const double c2 = critical_separation(2.0);
  CHECK(c2 == doctest::Approx(2 * c1).epsilon(1e-6));
}

TEST_CASE("analyze cross-checks and reports") {
  auto b = make_bi_maxwellian(1, 1);
  const auto rep = analyze(b, default_k_scan());
  CHECK(rep.unstable());
  CHECK(rep.violations.size() == 1);
  int in_band = 0, out_band = 0;
  const double kmax = rep.unstable_k_bands[0].second;
  for (const auto& pk : rep.per_k) {
    if (pk.k < 0.98 * kmax)
      in_band += pk.winding == 1;
    else if (pk.k > 1.02 * kmax)
      out_band += pk.winding != 0;
  }
  CHECK(in_band > 10);
  CHECK(out_band == 0);
}
