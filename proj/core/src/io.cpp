#include "vpstab/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "vpstab/signature.hpp"

namespace vpstab::io {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<double> parse_doubles(const std::string& s, char sep = ',') {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, sep)) {
    tok = trim(tok);
    if (tok.empty()) continue;
    size_t pos = 0;
    const double x = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument("bad number: " + tok);
    out.push_back(x);
  }
  return out;
}

EquilibriumProfile profile_from_family(const std::string& family, const std::string& params,
                                       const std::string& csv, GridSpec gs) {
  if (family == "maxwellian" || family == "maxwell") {
    const auto p = parse_doubles(params);
    if (p.size() != 2) throw std::invalid_argument("maxwellian wants center,width");
    return make_maxwellian(p[0], p[1], gs);
  }
  if (family == "bimax" || family == "bi_maxwellian") {
    const auto p = parse_doubles(params);
    if (p.size() != 2) throw std::invalid_argument("bimax wants separation,width");
    return make_bi_maxwellian(p[0], p[1], gs);
  }
  if (family == "sum" || family == "weighted_sum") {
    std::vector<GaussianComponent> comps;
    std::stringstream ss(params);
    std::string trip;
    while (std::getline(ss, trip, ';')) {
      const auto p = parse_doubles(trip);
      if (p.size() != 3) throw std::invalid_argument("sum wants weight,center,width triples");
      comps.push_back({p[0], p[1], p[2]});
    }
    return make_gaussian_mixture(std::move(comps), gs);
  }
  if (family == "tabulated") {
    const std::string path = csv.empty() ? params : csv;
    auto [v, f0] = read_tabulated_csv(path);
    return make_tabulated(std::move(v), std::move(f0), gs);
  }
  throw std::invalid_argument("unknown profile family: " + family);
}

}  // namespace

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

EquilibriumProfile parse_profile(const std::string& spec, GridSpec gs) {
  if (spec.empty()) throw std::invalid_argument("empty profile spec");
  if (spec[0] == '@') {
    std::ifstream in(spec.substr(1));
    if (!in) throw std::invalid_argument("cannot open profile config: " + spec.substr(1));
    std::string family, params, csv, line;
    while (std::getline(in, line)) {
      line = trim(line);
      if (line.empty() || line[0] == '#') continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("bad config line: " + line);
      const std::string key = trim(line.substr(0, eq));
      const std::string val = trim(line.substr(eq + 1));
      if (key == "family")
        family = val;
      else if (key == "params")
        params = val;
      else if (key == "csv")
        csv = val;
      else if (key == "v_max")
        gs.v_max = std::stod(val);
      else if (key == "n")
        gs.n = std::stoi(val);
      else
        throw std::invalid_argument("unknown config key: " + key);
    }
    if (family.empty()) throw std::invalid_argument("profile config lacks 'family'");
    return profile_from_family(family, params, csv, gs);
  }
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("profile spec wants family:params");
  return profile_from_family(spec.substr(0, colon), spec.substr(colon + 1), "", gs);
}

std::pair<std::vector<double>, std::vector<double>> read_tabulated_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open tabulated csv: " + path);
  std::string line;
  if (!std::getline(in, line) || trim(line) != "v,f0")
    throw std::invalid_argument("tabulated csv must start with header 'v,f0'");
  std::vector<double> v, f;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    const auto cols = parse_doubles(line);
    if (cols.size() != 2) throw std::invalid_argument("tabulated csv row wants two columns");
    v.push_back(cols[0]);
    f.push_back(cols[1]);
  }
  return {std::move(v), std::move(f)};
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

void write_profile_csv(const std::string& path, const EquilibriumProfile& p) {
  std::string s = "v,f0,f0p\n";
  for (int i = 0; i < p.grid().n(); ++i) {
    const double v = p.grid().node(i);
    s += fmt(v);
    s += ',';
    s += fmt(p.eval(v, 0));
    s += ',';
    s += fmt(p.eval(v, 1));
    s += '\n';
  }
  write_text(path, s);
}

void write_contour_csv(const std::string& path, const PenroseContour& c) {
  std::string s = "u,eps_re,eps_im\n";
  for (const auto& smp : c.samples) {
    s += fmt(smp.u);
    s += ',';
    s += fmt(smp.eps.real());
    s += ',';
    s += fmt(smp.eps.imag());
    s += '\n';
  }
  write_text(path, s);
}

void write_signature_csv(const std::string& path, const EquilibriumProfile& p) {
  const EquilibriumProfile frame = signature_frame(p);
  const auto sig = signature_samples(frame);
  std::string s = "u,sigma\n";
  for (int i = 0; i < frame.grid().n(); ++i) {
    s += fmt(frame.grid().node(i));
    s += ',';
    s += std::to_string(sig[i]);
    s += '\n';
  }
  write_text(path, s);
}

void write_trajectory_csv(const std::string& path, const Trajectory& t) {
  std::string s = "t,norm_f,H_L,P_L\n";
  for (const auto& p : t.points) {
    s += fmt(p.t);
    s += ',';
    s += fmt(p.norm_f);
    s += ',';
    s += fmt(p.q.H_L);
    s += ',';
    s += fmt(p.q.P_L);
    s += '\n';
  }
  write_text(path, s);
}

void write_contour_svg(const std::string& path, const PenroseContour& c) {
  double xlo = 0, xhi = 0, ylo = 0, yhi = 0;  // always include the origin
  for (const auto& s : c.samples) {
    xlo = std::min(xlo, s.eps.real());
    xhi = std::max(xhi, s.eps.real());
    ylo = std::min(ylo, s.eps.imag());
    yhi = std::max(yhi, s.eps.imag());
  }
  xhi = std::max(xhi, c.closure.real());
  const double padx = 0.05 * (xhi - xlo) + 1e-9;
  const double pady = 0.05 * (yhi - ylo) + 1e-9;
  xlo -= padx;
  xhi += padx;
  ylo -= pady;
  yhi += pady;
  const double W = 640, H = 480, M = 20;
  auto X = [&](double x) { return M + (x - xlo) / (xhi - xlo) * (W - 2 * M); };
  auto Y = [&](double y) { return H - M - (y - ylo) / (yhi - ylo) * (H - 2 * M); };
  char buf[96];
  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 640 480\">\n";
  s += "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%.3f\" y1=\"%.3f\" x2=\"%.3f\" y2=\"%.3f\" stroke=\"red\"/>\n",
                X(0) - 8, Y(0), X(0) + 8, Y(0));
  s += buf;
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%.3f\" y1=\"%.3f\" x2=\"%.3f\" y2=\"%.3f\" stroke=\"red\"/>\n", X(0),
                Y(0) - 8, X(0), Y(0) + 8);
  s += buf;
  s += "<path fill=\"none\" stroke=\"black\" stroke-width=\"1\" d=\"";
  bool first = true;
  auto emit = [&](double x, double y) {
    std::snprintf(buf, sizeof buf, "%c%.3f %.3f ", first ? 'M' : 'L', X(x), Y(y));
    s += buf;
    first = false;
  };
  for (const auto& smp : c.samples) emit(smp.eps.real(), smp.eps.imag());
  emit(c.closure.real(), c.closure.imag());
  if (!c.samples.empty()) emit(c.samples.front().eps.real(), c.samples.front().eps.imag());
  s += "\"/>\n</svg>\n";
  write_text(path, s);
}

std::string report_to_json(const StabilityReport& r) {
  nlohmann::ordered_json j;
  j["verdict"] = r.unstable() ? "unstable" : "stable";
  j["violations"] = nlohmann::ordered_json::array();
  for (const auto& v : r.violations) j["violations"].push_back({{"u", v.u}, {"pv", v.pv}});
  j["unstable_k_bands"] = nlohmann::ordered_json::array();
  for (const auto& b : r.unstable_k_bands) j["unstable_k_bands"].push_back({b.first, b.second});
  j["k0_critical_points"] = r.k0_points;
  j["embedded_modes"] = nlohmann::ordered_json::array();
  for (const auto& m : r.embedded_modes) j["embedded_modes"].push_back({{"u", m.u}, {"k", m.k}});
  j["per_k"] = nlohmann::ordered_json::array();
  for (const auto& pk : r.per_k) {
    nlohmann::ordered_json e;
    e["k"] = pk.k;
    e["winding"] = pk.winding;
    if (pk.origin_touch) e["origin_touch"] = true;
    if (pk.roots_unresolved) e["roots_unresolved"] = true;
    e["roots"] = nlohmann::ordered_json::array();
    for (const auto& root : pk.roots) e["roots"].push_back({root.real(), root.imag()});
    j["per_k"].push_back(std::move(e));
  }
  return j.dump(2) + "\n";
}

}  // namespace vpstab::io
