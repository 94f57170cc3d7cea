#pragma once

#include <string>
#include <utility>
#include <vector>

#include "vpstab/dispersion.hpp"
#include "vpstab/dynamics.hpp"
#include "vpstab/equilibrium.hpp"

namespace vpstab::io {

/// Full-precision (17 significant digits) decimal formatting used by every
/// CSV writer, so repeated runs are byte-identical.
std::string fmt(double x);

/// Parse a profile spec:
///   maxwellian:<center>,<width>
///   bimax:<separation>,<width>
///   sum:<w>,<c>,<s>[;<w>,<c>,<s>...]
///   tabulated:<csv path>
///   @<config path>    (key = value lines: family, params, csv, v_max, n)
EquilibriumProfile parse_profile(const std::string& spec, GridSpec gs = {});

/// Two-column CSV with header "v,f0".
std::pair<std::vector<double>, std::vector<double>> read_tabulated_csv(const std::string& path);

void write_text(const std::string& path, const std::string& content);

void write_profile_csv(const std::string& path, const EquilibriumProfile& p);   // v,f0,f0p
void write_contour_csv(const std::string& path, const PenroseContour& c);       // u,eps_re,eps_im
void write_signature_csv(const std::string& path, const EquilibriumProfile& p); // u,sigma
void write_trajectory_csv(const std::string& path, const Trajectory& t);        // t,norm_f,H_L,P_L

/// Minimal static SVG of the contour (fixed 640x480 viewBox, origin crosshair).
void write_contour_svg(const std::string& path, const PenroseContour& c);

/// Stable-key-order JSON text for a stability report.
std::string report_to_json(const StabilityReport& r);

}  // namespace vpstab::io
