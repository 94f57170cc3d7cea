#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vpstab/chi.hpp"
#include "vpstab/grid.hpp"

namespace vpstab {

/// A homogeneous equilibrium f0(v), evaluable together with its first two
/// derivatives anywhere (not just on a grid).
class DistributionModel {
public:
  virtual ~DistributionModel() = default;
  /// order in {0,1,2}.
  virtual double eval(double v, int order) const = 0;
};

struct GaussianComponent {
  double weight;
  double center;
  double width;
};

/// Optional grid override; defaults are derived from the family parameters
/// (v_max = extent + 8 * max width, n = 4001) so Gaussian tails sit below
/// 1e-12 of the peak.
struct GridSpec {
  std::optional<double> v_max;
  std::optional<int> n;
};

enum class CriticalKind { crossing_down, crossing_up, tangency };

/// A zero of f0'. Crossings carry the orientation of the sign change of f0';
/// tangencies touch zero without changing sign.
struct CriticalPoint {
  double u;
  CriticalKind kind;
  double f0pp;

  bool is_crossing() const { return kind != CriticalKind::tangency; }
  int orientation() const {
    switch (kind) {
      case CriticalKind::crossing_up: return +1;
      case CriticalKind::crossing_down: return -1;
      default: return 0;
    }
  }
};

namespace detail {
/// Additive perturbation of f0' held as grid samples (used for perturbations
/// whose Hilbert transform is well represented by quadrature).
struct SampledDelta {
  SampledFunction fp;   // delta f0'
  SampledFunction fpp;  // its centered-difference derivative
  SampledFunction f;    // cumulative integral (delta f0)
};
}  // namespace detail

/// Immutable equilibrium profile: an analytic or tabulated model sampled on a
/// velocity grid, plus optional additive perturbations of f0'. All observers
/// are const and safe to call concurrently.
class EquilibriumProfile {
public:
  const VelocityGrid& grid() const { return grid_; }
  const std::string& label() const { return label_; }

  /// f0^(order)(u) for order in {0,1,2}, including perturbation terms.
  /// Throws std::domain_error when |u| > v_max.
  double eval(double u, int order) const;

  double peak_f0() const { return peak_f0_; }

  const std::vector<double>& f0_samples() const { return f0_samples_; }

  /// f0' at the nodes with chi terms excluded: the part of f0' whose Cauchy
  /// integrals are done by quadrature (chi has closed forms).
  const std::vector<double>& f0p_quadrature_samples() const { return f0p_quad_; }

  /// Pointwise value / derivative of that quadrature part.
  double f0p_quad_value(double u) const;
  double f0p_quad_deriv(double u) const;

  const std::vector<ChiParams>& chi_terms() const { return chi_terms_; }
  bool has_chi_terms() const { return !chi_terms_.empty(); }

  /// Extra scan abscissae for zero finding (perturbation supports finer than
  /// the grid register themselves here).
  const std::vector<double>& scan_hints() const { return scan_hints_; }

  EquilibriumProfile with_chi_term(const ChiParams& p) const;
  EquilibriumProfile with_sampled_delta(std::vector<double> delta_fp) const;

  const DistributionModel& model() const { return *model_; }
  std::shared_ptr<const DistributionModel> model_ptr() const { return model_; }
  bool grid_was_explicit() const { return grid_explicit_; }

private:
  friend EquilibriumProfile make_maxwellian(double, double, const GridSpec&);
  friend EquilibriumProfile make_bi_maxwellian(double, double, const GridSpec&);
  friend EquilibriumProfile make_gaussian_mixture(std::vector<GaussianComponent>, const GridSpec&);
  friend EquilibriumProfile make_tabulated(std::vector<double>, std::vector<double>, const GridSpec&);
  friend EquilibriumProfile make_from_model(std::shared_ptr<const DistributionModel>, VelocityGrid,
                                            std::string, bool);
  friend EquilibriumProfile shift_frame(const EquilibriumProfile&, double);

  EquilibriumProfile(std::shared_ptr<const DistributionModel> model, VelocityGrid grid,
                     std::string label, bool validate_analytic, bool grid_explicit);

  void rebuild_samples();

  std::shared_ptr<const DistributionModel> model_;
  VelocityGrid grid_;
  std::string label_;
  bool grid_explicit_ = false;

  // Family bookkeeping so frame shifts can rebuild with a recentered grid.
  std::vector<GaussianComponent> gaussian_family_;  // empty for non-Gaussian models
  std::vector<double> tab_v_, tab_f_;               // raw tabulated data, if any

  std::vector<ChiParams> chi_terms_;
  std::vector<detail::SampledDelta> sampled_terms_;
  std::vector<double> scan_hints_;

  std::vector<double> f0_samples_;
  std::vector<double> f0p_quad_;
  double peak_f0_ = 0;
};

EquilibriumProfile make_maxwellian(double center, double width, const GridSpec& gs = {});
EquilibriumProfile make_bi_maxwellian(double separation, double width, const GridSpec& gs = {});
EquilibriumProfile make_gaussian_mixture(std::vector<GaussianComponent> comps,
                                         const GridSpec& gs = {});

/// Tabulated (v, f0) data, cubically interpolated onto a uniform grid;
/// derivatives by centered differences, tails extended by zero.
EquilibriumProfile make_tabulated(std::vector<double> v, std::vector<double> f0,
                                  const GridSpec& gs = {});

/// Wrap an arbitrary model (used for rearranged equilibria).
EquilibriumProfile make_from_model(std::shared_ptr<const DistributionModel> model,
                                   VelocityGrid grid, std::string label,
                                   bool validate_analytic = false);

/// Galilean shift: returns the profile with v replaced by v + U, so critical
/// points translate by -U. Requires |U| < v_max / 2.
EquilibriumProfile shift_frame(const EquilibriumProfile& p, double U);

/// All zeros of f0' on the open grid interior: sign changes bracketed and
/// bisected to 1e-10 in u; tangencies located via the sign change of f0'' and
/// accepted when |f0'| < 1e-9 * max|f0'| without a sign change.
std::vector<CriticalPoint> find_critical_points(const EquilibriumProfile& p);

}  // namespace vpstab
