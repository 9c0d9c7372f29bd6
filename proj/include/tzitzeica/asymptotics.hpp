#pragma once

// Soliton kinematics: growth exponents of the row/column factors, the
// light-cone velocity and its lab-frame image, and trajectory tracking on a
// sampled field.

#include <vector>

#include "tzitzeica/dressing.hpp"
#include "tzitzeica/field.hpp"

namespace tz::asymptotics {

// kappa(sigma Lambda_j*) - kappa(sigma Lambda_j) for both Abelian integrals.
struct GrowthExponents {
  double d_kappa_inf = 0.0;
  double d_kappa_0 = 0.0;
};

GrowthExponents growth_exponents(const dressing::SolitonConfig& cfg,
                                 const curve::BackgroundProvider& bg, int j);

// v_j = -d_kappa_inf / d_kappa_0. Throws DegenerateTrajectory when
// d_kappa_0 vanishes.
double velocity_lightcone(const dressing::SolitonConfig& cfg, const curve::BackgroundProvider& bg,
                          int j);

// dx/dt along d_kappa_inf x + d_kappa_0 t = const, i.e. 1 / v_j. This is the
// slope a tracked peak follows. Throws DegenerateTrajectory when
// d_kappa_inf vanishes.
double trajectory_slope(const dressing::SolitonConfig& cfg, const curve::BackgroundProvider& bg,
                        int j);

// V = (e^eps v + e^-eps) / (e^-eps - e^eps v). Throws DegenerateTrajectory at
// the pole.
double velocity_lab(double v, double eps);

struct LabVelocity {
  double eps = 0.0;
  double velocity = 0.0;
};

struct SolitonKinematics {
  int index = 0;
  cplx lambda;
  GrowthExponents growth;
  double v = 0.0;
  double slope = 0.0;
  std::vector<LabVelocity> lab;
};

std::vector<SolitonKinematics> kinematics(const dressing::SolitonConfig& cfg,
                                          const curve::BackgroundProvider& bg,
                                          const std::vector<double>& eps);

// Search window at time t: [center + drift t - half_width, center + drift t + half_width].
struct XWindow {
  double center = 0.0;
  double drift = 0.0;
  double half_width = 10.0;
  int samples = 401;
};

struct TrackOptions {
  // Peaks lower than this mean there is nothing to track.
  double min_peak = 1e-10;
  // A second local maximum above ambiguity * peak, farther than
  // separation from the main one, fails the tracking.
  double ambiguity = 0.5;
  double separation = 2.0;
  // Fit separate intercepts before and after t = 0 (phase shift from a
  // collision). A lone soliton has none, so one intercept suffices.
  bool split_intercepts = true;
};

struct TrackPoint {
  double t = 0.0;
  double x = 0.0;
  double peak = 0.0;
};

struct Trajectory {
  std::vector<TrackPoint> points;
  double slope = 0.0;
  // Intercepts for t < 0 and t >= 0; equal unless split_intercepts.
  double intercept_before = 0.0;
  double intercept_after = 0.0;
  double rms = 0.0;
};

// Follows the maximum of |e^u - e^v| through the t slices and fits
// x = slope t + intercept. Slices where the field is singular inside the
// window are dropped.
Trajectory track_trajectory(const FieldSource& src, const std::vector<double>& t_values,
                            const XWindow& window, const TrackOptions& opts = {});

// Symmetric sample times: n values on [lo, hi] and their negatives.
std::vector<double> symmetric_times(double lo, double hi, int n);

}  // namespace tz::asymptotics
