#include "tzitzeica/asymptotics.hpp"

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "tzitzeica/errors.hpp"

namespace tz::asymptotics {

GrowthExponents growth_exponents(const dressing::SolitonConfig& cfg,
                                 const curve::BackgroundProvider& bg, int j) {
  if (j < 0 || j >= cfg.size()) throw ConfigError("soliton index out of range");
  const auto& pr = cfg.pairs()[j];
  const auto s = bg.sigma(pr.lambda_pt);
  const auto s_star = bg.sigma(pr.star_pt);
  return {bg.kappa_inf(s_star) - bg.kappa_inf(s), bg.kappa_0(s_star) - bg.kappa_0(s)};
}

double velocity_lightcone(const dressing::SolitonConfig& cfg, const curve::BackgroundProvider& bg,
                          int j) {
  const GrowthExponents g = growth_exponents(cfg, bg, j);
  if (g.d_kappa_0 == 0.0)
    throw DegenerateTrajectory("soliton " + std::to_string(j) +
                               ": kappa_0 difference vanishes, velocity undefined");
  return -g.d_kappa_inf / g.d_kappa_0;
}

double trajectory_slope(const dressing::SolitonConfig& cfg, const curve::BackgroundProvider& bg,
                        int j) {
  const GrowthExponents g = growth_exponents(cfg, bg, j);
  if (g.d_kappa_inf == 0.0)
    throw DegenerateTrajectory("soliton " + std::to_string(j) +
                               ": kappa_inf difference vanishes, trajectory is x = const");
  return -g.d_kappa_0 / g.d_kappa_inf;
}

double velocity_lab(double v, double eps) {
  const double ep = std::exp(eps), em = std::exp(-eps);
  const double den = em - ep * v;
  if (den == 0.0 || !std::isfinite(den))
    throw DegenerateTrajectory("lab velocity has a pole at v = exp(-2 eps)");
  return (ep * v + em) / den;
}

std::vector<SolitonKinematics> kinematics(const dressing::SolitonConfig& cfg,
                                          const curve::BackgroundProvider& bg,
                                          const std::vector<double>& eps) {
  std::vector<SolitonKinematics> out;
  for (int j = 0; j < cfg.size(); ++j) {
    SolitonKinematics k;
    k.index = j;
    k.lambda = cfg.lambda(j);
    k.growth = growth_exponents(cfg, bg, j);
    k.v = velocity_lightcone(cfg, bg, j);
    k.slope = trajectory_slope(cfg, bg, j);
    for (double e : eps) k.lab.push_back({e, velocity_lab(k.v, e)});
    out.push_back(std::move(k));
  }
  return out;
}

std::vector<double> symmetric_times(double lo, double hi, int n) {
  if (!(hi > lo) || lo < 0.0 || n < 2) throw ConfigError("need 0 <= lo < hi and n >= 2");
  std::vector<double> t;
  for (int m = n - 1; m >= 0; --m) t.push_back(-(lo + (hi - lo) * m / (n - 1)));
  for (int m = 0; m < n; ++m) t.push_back(lo + (hi - lo) * m / (n - 1));
  return t;
}

Trajectory track_trajectory(const FieldSource& src, const std::vector<double>& t_values,
                            const XWindow& w, const TrackOptions& opts) {
  if (w.samples < 5 || !(w.half_width > 0.0)) throw ConfigError("tracking window too small");
  const double dx = 2.0 * w.half_width / (w.samples - 1);
  Trajectory tr;
  for (double t : t_values) {
    const double x0 = w.center + w.drift * t - w.half_width;
    std::vector<double> a(w.samples);
    bool singular = false;
    for (int m = 0; m < w.samples && !singular; ++m) {
      try {
        const double x = x0 + m * dx;
        a[m] = std::abs(src.exp_u(x, t) - src.exp_v(x, t));
      } catch (const SingularPoint&) {
        singular = true;
      }
    }
    if (singular) continue;

    int best = 0;
    for (int m = 1; m < w.samples; ++m)
      if (a[m] > a[best]) best = m;
    const double peak = a[best];
    if (!(peak >= opts.min_peak) || !std::isfinite(peak))
      throw TrackingFailed("no peak above background at t = " + std::to_string(t));
    if (best == 0 || best == w.samples - 1)
      throw TrackingFailed("peak on the window edge at t = " + std::to_string(t));
    for (int m = 1; m + 1 < w.samples; ++m) {
      if (m == best || a[m] < a[m - 1] || a[m] < a[m + 1]) continue;
      if (a[m] >= opts.ambiguity * peak && std::abs(m - best) * dx > opts.separation)
        throw TrackingFailed("two peaks in the window at t = " + std::to_string(t));
    }
    // Vertex of the parabola through the three samples around the maximum.
    const double l = a[best - 1], c = a[best], r = a[best + 1];
    const double den = l - 2.0 * c + r;
    const double shift = den < 0.0 ? 0.5 * (l - r) / den : 0.0;
    tr.points.push_back({t, x0 + (best + shift) * dx, peak});
  }

  int before = 0, after = 0;
  for (const auto& p : tr.points) (p.t < 0.0 ? before : after)++;
  if (!opts.split_intercepts) {
    // One intercept: keep it in the "after" column.
    after += before;
    before = 0;
  }
  if (tr.points.size() < 3)
    throw TrackingFailed("too few usable time slices for a fit");

  // x = slope t + b_before [t < 0] + b_after [t >= 0]; a side without
  // points drops its column.
  const int cols = 1 + (before > 0) + (after > 0);
  Eigen::MatrixXd m(tr.points.size(), cols);
  Eigen::VectorXd rhs(tr.points.size());
  for (std::size_t n = 0; n < tr.points.size(); ++n) {
    const auto& p = tr.points[n];
    m(n, 0) = p.t;
    int c = 1;
    const bool first = opts.split_intercepts && p.t < 0.0;
    if (before > 0) m(n, c++) = first ? 1.0 : 0.0;
    if (after > 0) m(n, c) = first ? 0.0 : 1.0;
    rhs(n) = p.x;
  }
  const Eigen::VectorXd sol = m.colPivHouseholderQr().solve(rhs);
  tr.slope = sol(0);
  int c = 1;
  if (before > 0) tr.intercept_before = sol(c++);
  if (after > 0) tr.intercept_after = sol(c);
  if (before == 0) tr.intercept_before = tr.intercept_after;
  if (after == 0) tr.intercept_after = tr.intercept_before;
  tr.rms = std::sqrt((m * sol - rhs).squaredNorm() / static_cast<double>(tr.points.size()));
  return tr;
}

}  // namespace tz::asymptotics
