#pragma once

#include <complex>
#include <vector>

#include "vpstab/equilibrium.hpp"

namespace vpstab {

/// One Fourier mode f_k(v,t) of the linearized dynamics. For dynamically
/// accessible data f = i k g(v) f0'(v); the generator amplitude g is carried
/// alongside so the 1/f0' weights in the invariants stay finite.
struct ModeState {
  double k = 1;
  VelocityGrid grid;
  std::vector<std::complex<double>> f;  // mode samples
  std::vector<std::complex<double>> w;  // generator amplitude, f = i k f0' w
  double t = 0;
};

struct ConservedQuantities {
  double H_L = 0;  // -int (v/f0') |f|^2 dv + |int f dv|^2 / k^2
  double P_L = 0;  // int (k/f0') |f|^2 dv
};

struct TrajectoryPoint {
  double t;
  double norm_f;  // L2 norm of f
  ConservedQuantities q;
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;
  bool overflow = false;          // ||f|| exceeded 1e12; integration stopped early
  double recurrence_time = 0;     // 2 pi / (k dv), beyond which discretized advection recurs
  bool past_recurrence = false;
};

/// Dynamically accessible initial data f = i k g f0' with g a Gaussian
/// generator profile (unit amplitude by default).
ModeState make_da_state(const EquilibriumProfile& p, double k, double g_center = 0,
                        double g_width = 1, double amplitude = 1);

/// Right-hand side of the mode equation: -i k v f + (i f0'/k) int f dv.
std::vector<std::complex<double>> rhs(const ModeState& s, const EquilibriumProfile& p);

ConservedQuantities conserved_quantities(const ModeState& s, const EquilibriumProfile& p);

/// Classical fourth-order explicit time stepping of the generator amplitude,
/// sampled every |output_every| time units. Requires |dt| <= 0.2/(k v_max);
/// negative dt integrates backward (t_end must then be negative too).
Trajectory integrate(ModeState state, const EquilibriumProfile& p, double dt, double t_end,
                     double output_every = 0.25);

struct GrowthEstimate {
  double gamma = 0;        // least-squares slope of log||f|| over the final half
  bool stable = false;     // no exponential growth beyond threshold
  bool degenerate = false; // empty or zero trajectory
  bool span_ok = true;     // unstable fits spanned >= 3 e-foldings
};

GrowthEstimate growth_rate(const Trajectory& traj);

}  // namespace vpstab
