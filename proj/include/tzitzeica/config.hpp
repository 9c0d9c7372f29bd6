#pragma once

// Run configuration read from a JSON file. Every section has a fixed set of
// keys; unknown keys, missing physical parameters and values that break a
// module invariant are rejected with a ConfigError naming the key.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "tzitzeica/asymptotics.hpp"
#include "tzitzeica/background.hpp"
#include "tzitzeica/dressing.hpp"
#include "tzitzeica/field.hpp"
#include "tzitzeica/verify.hpp"

namespace tz::config {

struct Tolerances {
  double residual_lightcone = 1e-8;
  double residual_lab = 1e-7;
  double goursat_order_min = 1.7;
  double goursat_order_max = 2.3;
  double lax_analytic = 1e-12;
  double lax_fd_order_min = 1.7;
  double residue_identity = 1e-8;
  double route_equivalence = 1e-9;
  double normalization_defect = 1e-9;
  double tracking = 0.02;
};

struct GoursatSection {
  GridSpec grid;
  int levels = 4;
};

struct LaxSection {
  std::vector<std::pair<double, double>> points{{0.3, -0.7}, {-1.1, 0.4}};
  std::vector<cplx> k{{0.7, 0.4}, {-1.3, 0.2}};
  std::vector<double> fd_steps{1e-3, 5e-4};
};

// Test hook: e^u is multiplied by 1 + amplitude exp(-|p - at|^2 / width^2).
struct Injection {
  double x = 0.0, t = 0.0;
  double amplitude = 1e-3;
  double width = 0.5;
};

struct VerifySection {
  Tolerances tol;
  verify::StencilOptions stencil;
  std::optional<GridSpec> lab_grid;  // the main grid when unset
  std::optional<GoursatSection> goursat;
  LaxSection lax;
  int route_points = 25;
  double residue_radius = 0.1;
  int residue_quadrature = 256;
  std::optional<Injection> inject;
};

struct TrackWindow {
  double center = 0.0;
  std::optional<double> drift;  // the formula slope when unset
  double half_width = 3.0;
  int samples = 301;
};

struct TrackSection {
  double t_lo = 15.0, t_hi = 25.0;
  int samples = 21;
  // One window per soliton, in order.
  std::vector<TrackWindow> windows;
};

struct KinematicsSection {
  std::vector<double> epsilons{0.0};
  std::optional<TrackSection> track;
};

struct OutputSection {
  std::optional<std::string> field, verify, scan, velocities;
};

struct RunConfig {
  background::BackgroundData background;
  dressing::SolitonConfig solitons;
  dressing::DressingOptions dressing;
  GridSpec grid;
  double scan_threshold = 1e-12;
  VerifySection verify;
  KinematicsSection kinematics;
  OutputSection output;
};

RunConfig parse_config(const nlohmann::json& doc);
// Throws ConfigError for unreadable files and malformed JSON as well.
RunConfig load_config(const std::string& path);

}  // namespace tz::config
