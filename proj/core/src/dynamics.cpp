#include "vpstab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vpstab {

namespace {

using cplx = std::complex<double>;

double trapezoid_weight(int i, int n) { return (i == 0 || i == n - 1) ? 0.5 : 1.0; }

// The w-form of the mode equation: with f = i k f0' w,
//   w_t = -i k v w + M / k^2,   M = int f dv = i k int f0' w dv.
struct WForm {
  double k;
  const VelocityGrid* grid;
  std::vector<double> f0p;

  cplx moment(const std::vector<cplx>& w) const {
    cplx s = 0;
    const int n = grid->n();
    for (int i = 0; i < n; ++i) s += trapezoid_weight(i, n) * f0p[i] * w[i];
    return cplx(0, k) * s * grid->spacing();
  }

  void rhs(const std::vector<cplx>& w, std::vector<cplx>& out) const {
    const cplx drive = moment(w) / (k * k);
    const int n = grid->n();
    for (int i = 0; i < n; ++i) out[i] = cplx(0, -k * grid->node(i)) * w[i] + drive;
  }
};

double norm_f(const WForm& m, const std::vector<cplx>& w) {
  double s = 0;
  const int n = m.grid->n();
  for (int i = 0; i < n; ++i) {
    const double a = m.k * m.f0p[i] * std::abs(w[i]);
    s += trapezoid_weight(i, n) * a * a;
  }
  return std::sqrt(s * m.grid->spacing());
}

ConservedQuantities invariants(const WForm& m, const std::vector<cplx>& w) {
  // H_L = -int v |f|^2/f0' + |M|^2/k^2 and P_L = int k |f|^2/f0', evaluated
  // through the factorization |f|^2/f0' = k^2 |w|^2 f0'.
  const int n = m.grid->n();
  double kinetic = 0, momentum = 0;
  for (int i = 0; i < n; ++i) {
    const double ww = std::norm(w[i]) * m.f0p[i];
    kinetic += trapezoid_weight(i, n) * m.grid->node(i) * ww;
    momentum += trapezoid_weight(i, n) * ww;
  }
  const double k2 = m.k * m.k;
  const double h = m.grid->spacing();
  const cplx M = m.moment(w);
  ConservedQuantities q;
  q.H_L = -k2 * kinetic * h + std::norm(M) / k2;
  q.P_L = m.k * k2 * momentum * h;
  return q;
}

}  // namespace

ModeState make_da_state(const EquilibriumProfile& p, double k, double g_center, double g_width,
                        double amplitude) {
  if (!(k > 0)) throw std::domain_error("make_da_state: k must be positive");
  ModeState s{k, p.grid(), {}, {}, 0.0};
  const int n = p.grid().n();
  s.f.resize(n);
  s.w.resize(n);
  for (int i = 0; i < n; ++i) {
    const double v = p.grid().node(i);
    const double x = (v - g_center) / g_width;
    const double g = amplitude * std::exp(-x * x);
    s.w[i] = g;
    s.f[i] = cplx(0, k) * g * p.eval(v, 1);
  }
  return s;
}

std::vector<cplx> rhs(const ModeState& s, const EquilibriumProfile& p) {
  if (!(s.k > 0)) throw std::domain_error("rhs: k must be positive");
  const int n = s.grid.n();
  if (static_cast<int>(s.f.size()) != n) throw std::invalid_argument("rhs: state size mismatch");
  cplx M = 0;
  for (int i = 0; i < n; ++i) M += trapezoid_weight(i, n) * s.f[i];
  M *= s.grid.spacing();
  std::vector<cplx> out(n);
  for (int i = 0; i < n; ++i) {
    const double v = s.grid.node(i);
    out[i] = cplx(0, -s.k * v) * s.f[i] + cplx(0, p.eval(v, 1) / s.k) * M;
  }
  return out;
}

ConservedQuantities conserved_quantities(const ModeState& s, const EquilibriumProfile& p) {
  if (s.w.empty()) throw std::invalid_argument("conserved_quantities: state lacks generator data");
  WForm m{s.k, &s.grid, {}};
  m.f0p.resize(s.grid.n());
  for (int i = 0; i < s.grid.n(); ++i) m.f0p[i] = p.eval(s.grid.node(i), 1);
  return invariants(m, s.w);
}

Trajectory integrate(ModeState state, const EquilibriumProfile& p, double dt, double t_end,
                     double output_every) {
  if (state.w.empty())
    throw std::invalid_argument("integrate: need dynamically accessible initial data (generator)");
  if (dt == 0 || (t_end - state.t) * dt <= 0)
    throw std::invalid_argument("integrate: dt must advance t toward t_end");
  const double dt_max = 0.2 / (state.k * state.grid.v_max());
  if (!(std::abs(dt) <= dt_max))
    throw std::invalid_argument("integrate: |dt| must be <= 0.2/(k v_max)");

  WForm m{state.k, &state.grid, {}};
  const int n = state.grid.n();
  m.f0p.resize(n);
  for (int i = 0; i < n; ++i) m.f0p[i] = p.eval(state.grid.node(i), 1);

  Trajectory traj;
  traj.recurrence_time = 2 * M_PI / (state.k * state.grid.spacing());
  traj.past_recurrence = std::abs(t_end) > traj.recurrence_time;

  std::vector<cplx> w = state.w;
  std::vector<cplx> k1(n), k2(n), k3(n), k4(n), tmp(n);
  double t = state.t;
  double next_output = t;
  const int n_steps = static_cast<int>(std::ceil((t_end - t) / dt - 1e-12));

  auto record = [&]() { traj.points.push_back({t, norm_f(m, w), invariants(m, w)}); };

  for (int step = 0; step <= n_steps; ++step) {
    if ((dt > 0 && t >= next_output - 1e-12) || (dt < 0 && t <= next_output + 1e-12)) {
      record();
      next_output += (dt > 0 ? 1 : -1) * std::abs(output_every);
    }
    if (step == n_steps) break;
    const double h = (step == n_steps - 1) ? t_end - t : dt;
    m.rhs(w, k1);
    for (int i = 0; i < n; ++i) tmp[i] = w[i] + 0.5 * h * k1[i];
    m.rhs(tmp, k2);
    for (int i = 0; i < n; ++i) tmp[i] = w[i] + 0.5 * h * k2[i];
    m.rhs(tmp, k3);
    for (int i = 0; i < n; ++i) tmp[i] = w[i] + h * k3[i];
    m.rhs(tmp, k4);
    for (int i = 0; i < n; ++i) w[i] += (h / 6) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    t += h;
    if (norm_f(m, w) > 1e12) {
      traj.overflow = true;
      record();
      break;
    }
  }
  if (!traj.overflow && (traj.points.empty() || traj.points.back().t != t)) record();
  return traj;
}

GrowthEstimate growth_rate(const Trajectory& traj) {
  GrowthEstimate est;
  const auto& pts = traj.points;
  if (pts.size() < 4) {
    est.degenerate = true;
    est.stable = true;
    return est;
  }
  double maxn = 0;
  for (const auto& p : pts) maxn = std::max(maxn, p.norm_f);
  if (maxn <= 0) {
    est.degenerate = true;
    est.stable = true;
    return est;
  }

  // Least-squares slope of log||f|| against |t| over the final half.
  const size_t lo = pts.size() / 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (size_t i = lo; i < pts.size(); ++i) {
    if (pts[i].norm_f <= 0) continue;
    const double x = std::abs(pts[i].t);
    const double y = std::log(pts[i].norm_f);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  if (cnt < 3) {
    est.degenerate = true;
    est.stable = true;
    return est;
  }
  const double denom = cnt * sxx - sx * sx;
  est.gamma = denom != 0 ? (cnt * sxy - sx * sy) / denom : 0.0;
  est.stable = est.gamma < 1e-2;
  if (!est.stable) {
    const double span = std::abs(pts.back().t) - std::abs(pts[lo].t);
    est.span_ok = est.gamma * span >= 3.0;
  }
  return est;
}

}  // namespace vpstab
