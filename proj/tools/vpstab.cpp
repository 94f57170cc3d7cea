// vpstab: spectral stability of homogeneous Vlasov-Poisson equilibria.
//
// Exit codes: 0 stable / success, 10 unstable, 20 critical state detected,
// 2 usage error, 30+ internal (31 bad input to an operation, 32 solver,
// 33 fixture, 34 invariant violation, 35 i/o).

#include <complex>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "vpstab/dispersion.hpp"
#include "vpstab/dynamics.hpp"
#include "vpstab/errors.hpp"
#include "vpstab/io.hpp"
#include "vpstab/perturbation.hpp"
#include "vpstab/signature.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct CommonOpts {
  std::string profile;
  std::optional<double> v_max;
  std::optional<int> n;
  std::string out_dir;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool need_profile = true) {
  auto* p = cmd->add_option("--profile", o.profile,
                            "family:params (maxwellian:c,w | bimax:c,w | sum:w,c,s;... | "
                            "tabulated:path) or @configfile");
  if (need_profile) p->required();
  cmd->add_option("--v-max", o.v_max, "velocity cutoff override");
  cmd->add_option("--n", o.n, "grid point count override (odd, >= 101)");
  cmd->add_option("--out", o.out_dir, "output directory (default $VPSTAB_OUT_DIR or .)");
}

fs::path out_dir(const CommonOpts& o) {
  std::string dir = o.out_dir;
  if (dir.empty()) {
    const char* env = std::getenv("VPSTAB_OUT_DIR");
    dir = env ? env : ".";
  }
  fs::create_directories(dir);
  return dir;
}

vpstab::EquilibriumProfile load_profile(const CommonOpts& o) {
  vpstab::GridSpec gs;
  gs.v_max = o.v_max;
  gs.n = o.n;
  try {
    return vpstab::io::parse_profile(o.profile, gs);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    throw CLI::ValidationError("profile", e.what());
  }
}

std::vector<double> parse_k_scan(const std::string& spec) {
  if (spec.empty()) return vpstab::default_k_scan();
  double lo = 0, hi = 0;
  int count = 0;
  if (std::sscanf(spec.c_str(), "%lf:%lf:%d", &lo, &hi, &count) != 3)
    throw CLI::ValidationError("--k-scan wants lo:hi:count");
  return vpstab::default_k_scan(lo, hi, count);
}

std::string destabilize_json(const vpstab::DestabilizeResult& r) {
  static const char* kind_names[] = {"additive_w11", "rearrangement", "k0_pair", "embedded"};
  ordered_json j;
  j["kind"] = kind_names[static_cast<int>(r.perturbed.kind)];
  j["norm_w11"] = r.perturbed.norm_w11;
  j["winding_before"] = r.winding_before;
  j["winding_after"] = r.winding_after;
  j["k_reported"] = r.k_reported;
  j["unstable_k_band"] = {r.unstable_k_band.first, r.unstable_k_band.second};
  j["zero_count_delta"] = r.zero_count_delta;
  j["truncation_error"] = r.truncation_error;
  j["sup_delta_fp"] = r.sup_delta_fp;
  j["verdict_after"] = r.after.unstable() ? "unstable" : "stable";
  return j.dump(2) + "\n";
}

int verdict_exit(const vpstab::StabilityReport& r) {
  if (r.unstable()) return 10;
  bool origin_touch = false;
  for (const auto& pk : r.per_k) origin_touch |= pk.origin_touch;
  if (r.critical() || origin_touch) return 20;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Penrose stability, Krein signatures and destabilizing perturbations for "
               "homogeneous Vlasov-Poisson equilibria"};
  app.require_subcommand(1);

  CommonOpts opt;
  std::string k_scan_spec, svg_path, triplet_signs, bracket = "0.75:1.0";
  double k = 1.0, h = 0.05, amplitude = 0.02, radius = 0.5, width = 1.0;
  std::optional<double> u_opt;
  double t_end = 0, dt = 0;
  std::string kind = "w11";

  auto* c_analyze = app.add_subcommand("analyze", "Penrose test + winding scan over k");
  add_common(c_analyze, opt);
  c_analyze->add_option("--k-scan", k_scan_spec, "lo:hi:count (default 0.05:5:60)");

  auto* c_penrose = app.add_subcommand("penrose", "emit the Penrose contour for one k");
  add_common(c_penrose, opt);
  c_penrose->add_option("--k", k, "wavenumber")->required();
  c_penrose->add_option("--svg", svg_path, "also write an SVG plot");

  auto* c_signature = app.add_subcommand("signature", "continuum Krein signature along u");
  add_common(c_signature, opt);

  auto* c_roots = app.add_subcommand("roots", "unstable roots at one k (Nyquist + Newton)");
  add_common(c_roots, opt);
  c_roots->add_option("--k", k, "wavenumber")->required();

  auto* c_dest = app.add_subcommand("destabilize", "construct a destabilizing perturbation");
  add_common(c_dest, opt);
  c_dest->add_option("--kind", kind, "w11 | rearrangement | k0 | embedded")->required();
  c_dest->add_option("--u", u_opt, "target zero of f0' (defaults per kind)");
  c_dest->add_option("--chi-h", h, "chi height (w11 / rearrangement kinds)");
  c_dest->add_option("--amplitude", amplitude, "bump amplitude (k0 / embedded kinds)");
  c_dest->add_option("--radius", radius, "bump radius (k0 / embedded kinds)");

  auto* c_sim = app.add_subcommand("simulate", "integrate the linearized mode dynamics");
  add_common(c_sim, opt);
  c_sim->add_option("--k", k, "wavenumber")->required();
  c_sim->add_option("--t-end", t_end, "final time (default 20/k)");
  c_sim->add_option("--dt", dt, "time step (default 0.2/(k v_max))");

  auto* c_sweep = app.add_subcommand("sweep", "bisect the bi-Maxwellian critical separation");
  add_common(c_sweep, opt, /*need_profile=*/false);
  c_sweep->add_option("--bracket", bracket, "lo:hi in units of the width (default 0.75:1.0)");
  c_sweep->add_option("--width", width, "thermal width (default 1)");

  auto* c_triplet = app.add_subcommand("triplet", "little-big-man frame test on a sign triplet");
  c_triplet->add_option("signs", triplet_signs, "three signs, e.g. \"+-+\"")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (c_analyze->parsed()) {
      const auto profile = load_profile(opt);
      const auto dir = out_dir(opt);
      vpstab::Analyzer an(profile);
      const auto report = an.analyze(parse_k_scan(k_scan_spec));
      vpstab::io::write_text(dir / "report.json", vpstab::io::report_to_json(report));
      for (size_t i = 0; i < report.per_k.size(); ++i) {
        char name[64];
        std::snprintf(name, sizeof name, "contour_%03zu.csv", i);
        vpstab::io::write_contour_csv(dir / name, an.contour(report.per_k[i].k));
      }
      std::cout << (report.unstable() ? "unstable" : report.critical() ? "critical" : "stable")
                << "\n";
      return verdict_exit(report);
    }

    if (c_penrose->parsed()) {
      const auto profile = load_profile(opt);
      const auto dir = out_dir(opt);
      vpstab::Analyzer an(profile);
      const auto contour = an.contour(k);
      vpstab::io::write_contour_csv(dir / "contour.csv", contour);
      if (!svg_path.empty()) vpstab::io::write_contour_svg(svg_path, contour);
      std::cout << "winding " << vpstab::winding_number(contour) << "\n";
      return 0;
    }

    if (c_signature->parsed()) {
      const auto profile = load_profile(opt);
      const auto dir = out_dir(opt);
      vpstab::io::write_signature_csv(dir / "signature.csv", profile);
      return 0;
    }

    if (c_roots->parsed()) {
      const auto profile = load_profile(opt);
      const auto dir = out_dir(opt);
      vpstab::Analyzer an(profile);
      const int W = an.winding(k);
      ordered_json j;
      j["k"] = k;
      j["winding"] = W;
      j["roots"] = ordered_json::array();
      for (const auto& r : an.roots(k)) j["roots"].push_back({r.real(), r.imag()});
      vpstab::io::write_text(dir / "roots.json", j.dump(2) + "\n");
      std::cout << "winding " << W << "\n";
      return W > 0 ? 10 : 0;
    }

    if (c_dest->parsed()) {
      const auto profile = load_profile(opt);
      const auto dir = out_dir(opt);
      std::optional<vpstab::DestabilizeResult> result;
      if (kind == "w11" || kind == "rearrangement") {
        double u0;
        if (u_opt) {
          u0 = *u_opt;
        } else {
          // default: the first crossing with f0'' < 0 and H[f0'] < 0
          u0 = 0;
          bool found = false;
          for (const auto& c : find_critical_points(profile)) {
            if (c.is_crossing() && c.f0pp < 0 && vpstab::hilbert_f0p(profile, c.u) < 0) {
              u0 = c.u;
              found = true;
              break;
            }
          }
          if (!found) throw std::domain_error("destabilize: no admissible crossing found");
        }
        result = kind == "w11" ? vpstab::destabilize_w11(profile, u0, h)
                               : vpstab::destabilize_rearrangement(profile, u0, h);
      } else if (kind == "k0") {
        const auto pts = vpstab::k0_critical_scan(profile);
        const double u0 = u_opt ? *u_opt : (pts.empty() ? 0.0 : pts.front());
        result = vpstab::destabilize_k0(profile, u0, {u0, radius, amplitude});
      } else if (kind == "embedded") {
        const auto modes = vpstab::embedded_mode_scan(profile);
        if (modes.empty()) throw std::domain_error("destabilize: no embedded mode");
        result = vpstab::destabilize_embedded(profile, {modes.front().u, radius, amplitude});
      } else {
        throw CLI::ValidationError("--kind must be w11|rearrangement|k0|embedded");
      }
      const vpstab::DestabilizeResult& r = *result;
      vpstab::io::write_profile_csv(dir / "perturbed_profile.csv", r.perturbed.profile);
      vpstab::io::write_text(dir / "destabilize.json", destabilize_json(r));
      vpstab::io::write_text(dir / "report_before.json", vpstab::io::report_to_json(r.before));
      vpstab::io::write_text(dir / "report_after.json", vpstab::io::report_to_json(r.after));
      if (r.k_reported > 0) {
        vpstab::io::write_contour_csv(dir / "contour_before.csv",
                                      vpstab::penrose_contour(profile, r.k_reported));
        vpstab::io::write_contour_csv(dir / "contour_after.csv",
                                      vpstab::penrose_contour(r.perturbed.profile, r.k_reported));
      }
      std::cout << (r.after.unstable() ? "unstable" : "stable") << " norm_w11 "
                << r.perturbed.norm_w11 << "\n";
      return r.after.unstable() ? 10 : 0;
    }

    if (c_sim->parsed()) {
      const auto profile = load_profile(opt);
      const auto dir = out_dir(opt);
      if (t_end == 0) t_end = 20.0 / k;
      if (dt == 0) dt = 0.2 / (k * profile.grid().v_max());
      auto state = vpstab::make_da_state(profile, k);
      const auto traj = vpstab::integrate(std::move(state), profile, dt, t_end);
      const auto est = vpstab::growth_rate(traj);
      vpstab::io::write_trajectory_csv(dir / "trajectory.csv", traj);
      ordered_json j;
      j["gamma"] = est.gamma;
      j["stable"] = est.stable;
      j["degenerate"] = est.degenerate;
      j["recurrence_time"] = traj.recurrence_time;
      j["past_recurrence"] = traj.past_recurrence;
      j["overflow"] = traj.overflow;
      vpstab::io::write_text(dir / "summary.json", j.dump(2) + "\n");
      if (traj.past_recurrence)
        std::cerr << "warning: t_end exceeds the recurrence time " << traj.recurrence_time << "\n";
      std::cout << "gamma " << est.gamma << (est.stable ? " (stable)" : "") << "\n";
      return 0;
    }

    if (c_sweep->parsed()) {
      const auto dir = out_dir(opt);
      double lo = 0.75, hi = 1.0;
      if (std::sscanf(bracket.c_str(), "%lf:%lf", &lo, &hi) != 2)
        throw CLI::ValidationError("--bracket wants lo:hi");
      std::vector<vpstab::SweepRow> log;
      const double c_star = vpstab::critical_separation(width, lo, hi, &log);
      std::string csv = "c_lo,c_hi,pv_mid\n";
      for (const auto& row : log)
        csv += vpstab::io::fmt(row.c_lo) + "," + vpstab::io::fmt(row.c_hi) + "," +
               vpstab::io::fmt(row.pv_mid) + "\n";
      vpstab::io::write_text(dir / "sweep.csv", csv);
      ordered_json j;
      j["width"] = width;
      j["c_star"] = c_star;
      vpstab::io::write_text(dir / "sweep.json", j.dump(2) + "\n");
      std::cout << "c_star " << vpstab::io::fmt(c_star) << "\n";
      return 0;
    }

    if (c_triplet->parsed()) {
      const auto t = vpstab::ModeTriplet::from_signs(triplet_signs);
      const auto r = vpstab::little_big_man(t);
      auto show = [](const std::array<int, 3>& s) {
        std::string out = "(";
        for (int x : s) out += x > 0 ? '+' : (x < 0 ? '-' : '0');
        return out + ")";
      };
      for (const auto& s : r.shift_sequence) std::cout << show(s) << " ";
      std::cout << "\n" << (r.definite_achievable ? "definite" : "indefinite");
      if (r.witness_g) std::cout << " witness g=" << *r.witness_g;
      std::cout << "\n";
      return 0;
    }
  } catch (const CLI::ValidationError&) {
    return 2;
  } catch (const vpstab::SolverError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 32;
  } catch (const vpstab::FixtureError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 33;
  } catch (const vpstab::InvariantViolationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 34;
  } catch (const vpstab::CriticalContourError& e) {
    std::cerr << "critical: " << e.what() << "\n";
    return 20;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 31;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 31;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 35;
  }
  return 2;
}
