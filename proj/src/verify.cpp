#include "tzitzeica/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <tuple>
#include <utility>

#include "tzitzeica/errors.hpp"

namespace tz::verify {

namespace {

constexpr std::array<double, 5> kD1 = {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12};
constexpr std::array<double, 5> kD2 = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};
constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

cplx rhs(cplx exp_u) { return exp_u - 1.0 / (exp_u * exp_u); }

// Marks nodes within `radius` cells (Chebyshev) of a non-ok flag.
std::vector<bool> near_flagged(const GridSpec& g, const std::vector<NodeFlag>& flags, int radius) {
  std::vector<bool> out(g.size(), false);
  if (flags.empty()) return out;
  for (int j = 0; j < g.nt; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (flags[g.index(i, j)] == NodeFlag::ok) continue;
      for (int jj = std::max(0, j - radius); jj <= std::min(g.nt - 1, j + radius); ++jj)
        for (int ii = std::max(0, i - radius); ii <= std::min(g.nx - 1, i + radius); ++ii)
          out[g.index(ii, jj)] = true;
    }
  return out;
}

struct NodeResult {
  enum class State { outside, excluded, failed, checked } state = State::outside;
  double residual = 0.0;
  double abs_exp_u = 0.0;
};

// Deterministic t-major reduction of per-node results.
VerificationReport reduce(const GridSpec& g, const std::vector<NodeResult>& nodes,
                          const std::vector<NodeFlag>& flags) {
  VerificationReport r;
  for (int j = 0; j < g.nt; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t n = g.index(i, j);
      const NodeResult& nr = nodes[n];
      const bool flagged = !flags.empty() && flags[n] != NodeFlag::ok;
      if (flagged || nr.state == NodeResult::State::failed)
        r.flagged.push_back({i, j, g.x(i), g.t(j),
                             flagged ? flags[n] : NodeFlag::singular});
      switch (nr.state) {
        case NodeResult::State::outside:
          break;
        case NodeResult::State::excluded:
        case NodeResult::State::failed:
          ++r.excluded;
          break;
        case NodeResult::State::checked:
          ++r.checked;
          r.max_abs_exp_u = std::max(r.max_abs_exp_u, nr.abs_exp_u);
          if (!r.argmax_x || nr.residual > r.max_abs_residual) {
            r.max_abs_residual = nr.residual;
            r.argmax_x = g.x(i);
            r.argmax_t = g.t(j);
          }
          break;
      }
    }
  r.rel_residual = r.max_abs_exp_u > 0.0 ? r.max_abs_residual / r.max_abs_exp_u : 0.0;
  return r;
}

enum class Frame { lightcone, lab };

VerificationReport residual_on_grid(const FieldGrid& field, int buffer, Frame frame) {
  const GridSpec& g = field.grid;
  g.validate();
  if (g.nx < 5 || g.nt < 5) throw ConfigError("residual stencils need nx, nt >= 5");
  const auto skip = near_flagged(g, field.flags, 2 + buffer);
  const double hx = g.hx(), ht = g.ht();
  std::vector<NodeResult> nodes(g.size());
  for (int j = 2; j < g.nt - 2; ++j)
    for (int i = 2; i < g.nx - 2; ++i) {
      const std::size_t n = g.index(i, j);
      NodeResult& nr = nodes[n];
      if (skip[n]) {
        nr.state = NodeResult::State::excluded;
        continue;
      }
      auto u = [&](int a, int b) { return field.u[g.index(i + a, j + b)]; };
      cplx lhs = 0.0;
      if (frame == Frame::lightcone) {
        for (int a = -2; a <= 2; ++a)
          for (int b = -2; b <= 2; ++b)
            if (a != 0 && b != 0) lhs += kD1[a + 2] * kD1[b + 2] * u(a, b);
        lhs /= hx * ht;
      } else {
        cplx utt = 0.0, uxx = 0.0;
        for (int a = -2; a <= 2; ++a) {
          uxx += kD2[a + 2] * u(a, 0);
          utt += kD2[a + 2] * u(0, a);
        }
        lhs = utt / (ht * ht) - uxx / (hx * hx);
      }
      const cplx f = field.exp_u[n];
      nr.state = NodeResult::State::checked;
      nr.residual = std::abs(lhs - rhs(f));
      nr.abs_exp_u = std::abs(f);
    }
  return reduce(g, nodes, field.flags);
}

VerificationReport residual_from_source(const FieldSource& src, const GridSpec& g,
                                        const std::vector<NodeFlag>& flags,
                                        const StencilOptions& opts, Frame frame) {
  g.validate();
  if (!flags.empty() && flags.size() != g.size())
    throw ConfigError("flag mask does not match the grid");
  if (!(opts.step > 0.0)) throw ConfigError("stencil step must be positive");
  const auto skip = near_flagged(g, flags, opts.buffer);
  const double h = opts.step;
  std::vector<NodeResult> nodes(g.size());
  parallel_rows(g.nt, opts.threads, [&](int j) {
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t n = g.index(i, j);
      NodeResult& nr = nodes[n];
      if (skip[n]) {
        nr.state = NodeResult::State::excluded;
        continue;
      }
      const double x = g.x(i), t = g.t(j);
      try {
        const cplx f0 = src.exp_u(x, t);
        auto stencil = [&](double step) {
          // Logarithms relative to the centre stay on one branch for small steps.
          auto du = [&](int a, int b) {
            return std::log(src.exp_u(x + a * step, t + b * step) / f0);
          };
          cplx d = 0.0;
          if (frame == Frame::lightcone) {
            for (int a = -2; a <= 2; ++a)
              for (int b = -2; b <= 2; ++b)
                if (a != 0 && b != 0) d += kD1[a + 2] * kD1[b + 2] * du(a, b);
          } else {
            for (int a = -2; a <= 2; ++a)
              if (a != 0) d += kD2[a + 2] * (du(0, a) - du(a, 0));
          }
          return d / (step * step);
        };
        cplx lhs = stencil(h);
        if (opts.richardson) {
          const cplx half = stencil(0.5 * h);
          lhs = half + (half - lhs) / 15.0;
        }
        if (!finite(lhs) || !finite(f0)) throw SingularPoint("non-finite stencil value");
        nr.state = NodeResult::State::checked;
        nr.residual = std::abs(lhs - rhs(f0));
        nr.abs_exp_u = std::abs(f0);
      } catch (const SingularPoint&) {
        nr.state = NodeResult::State::failed;
      }
    }
  });
  return reduce(g, nodes, flags);
}

}  // namespace

VerificationReport residual_lightcone(const FieldGrid& field, int buffer) {
  return residual_on_grid(field, buffer, Frame::lightcone);
}

VerificationReport residual_lab(const FieldGrid& field, int buffer) {
  return residual_on_grid(field, buffer, Frame::lab);
}

VerificationReport residual_lightcone(const FieldSource& src, const GridSpec& grid,
                                      const std::vector<NodeFlag>& flags,
                                      const StencilOptions& opts) {
  return residual_from_source(src, grid, flags, opts, Frame::lightcone);
}

VerificationReport residual_lab(const FieldSource& src, const GridSpec& grid,
                                const std::vector<NodeFlag>& flags, const StencilOptions& opts) {
  return residual_from_source(src, grid, flags, opts, Frame::lab);
}

VerificationReport goursat_cross_check(const FieldSource& src, const GridSpec& grid,
                                       const GoursatOptions& opts) {
  grid.validate();
  if (opts.levels < 2) throw ConfigError("goursat check needs at least two levels");
  VerificationReport rep;

  // Formula values on the base nodes.
  std::vector<cplx> exact(grid.size());
  try {
    for (int j = 0; j < grid.nt; ++j)
      for (int i = 0; i < grid.nx; ++i) exact[grid.index(i, j)] = src.exp_u(grid.x(i), grid.t(j));
  } catch (const SingularPoint& e) {
    rep.skipped = true;
    rep.note = std::string("formula singular on the grid: ") + e.what();
    return rep;
  }
  for (const auto& v : exact) rep.max_abs_exp_u = std::max(rep.max_abs_exp_u, std::abs(v));

  for (int level = 0; level < opts.levels; ++level) {
    const GridSpec g = grid.refined(level);
    const int stride = 1 << level;
    const double hx = g.hx(), ht = g.ht();
    std::vector<cplx> u(g.size());

    try {
      const cplx f00 = src.exp_u(g.x(0), g.t(0));
      u[g.index(0, 0)] = std::log(f00);
      cplx prev = f00;
      for (int i = 1; i < g.nx; ++i) {
        const cplx f = src.exp_u(g.x(i), g.t(0));
        u[g.index(i, 0)] = u[g.index(i - 1, 0)] + std::log(f / prev);
        prev = f;
      }
      prev = f00;
      for (int j = 1; j < g.nt; ++j) {
        const cplx f = src.exp_u(g.x(0), g.t(j));
        u[g.index(0, j)] = u[g.index(0, j - 1)] + std::log(f / prev);
        prev = f;
      }
    } catch (const SingularPoint& e) {
      rep.skipped = true;
      rep.note = std::string("formula singular on a boundary trace: ") + e.what();
      return rep;
    }

    if (opts.corrupt_at) {
      const auto [cx, ct] = *opts.corrupt_at;
      // Nearest node on either trace.
      const int ci = std::clamp(static_cast<int>(std::lround((cx - g.x0) / hx)), 0, g.nx - 1);
      const int cj = std::clamp(static_cast<int>(std::lround((ct - g.t0) / ht)), 0, g.nt - 1);
      const double d_row = std::abs(ct - g.t0), d_col = std::abs(cx - g.x0);
      const std::size_t n = d_row <= d_col ? g.index(ci, 0) : g.index(0, cj);
      u[n] += opts.corrupt_amount;
    }

    for (int j = 0; j + 1 < g.nt && !rep.blow_up; ++j)
      for (int i = 0; i + 1 < g.nx; ++i) {
        const cplx a = u[g.index(i + 1, j)], b = u[g.index(i, j + 1)];
        const cplx mid = 0.5 * (a + b);
        const cplx next = a + b - u[g.index(i, j)] + hx * ht * (std::exp(mid) - std::exp(-2.0 * mid));
        if (!finite(next) || std::abs(next) > opts.blow_up_limit) {
          rep.blow_up = true;
          rep.note = "integration blew up at level " + std::to_string(level);
          break;
        }
        u[g.index(i + 1, j + 1)] = next;
      }
    if (rep.blow_up) break;

    double dev = 0.0;
    for (int j = 0; j < grid.nt; ++j)
      for (int i = 0; i < grid.nx; ++i) {
        const cplx ug = u[g.index(i * stride, j * stride)];
        dev = std::max(dev, std::abs(std::log(std::exp(ug) / exact[grid.index(i, j)])));
      }
    rep.deviations.push_back(dev);
  }

  for (std::size_t l = 0; l + 1 < rep.deviations.size(); ++l) {
    const double a = rep.deviations[l], b = rep.deviations[l + 1];
    if (a > 1e-14 && b > 0.0) rep.orders.push_back(std::log2(a / b));
  }
  if (!rep.orders.empty())
    rep.convergence_order = *std::min_element(rep.orders.begin(), rep.orders.end());
  rep.checked = static_cast<int>(grid.size());
  if (!rep.deviations.empty()) rep.max_abs_residual = rep.deviations.back();
  return rep;
}

LaxDeviation lax_check(double x, double t, const curve::SpectralPoint& p,
                       const curve::BackgroundProvider& bg, const LaxOptions& opts) {
  const Eigen::Vector3cd psi = bg.baker(x, t, p).vec();
  Eigen::Vector3cd psi_x, psi_t;
  if (opts.fd_step) {
    const double h = *opts.fd_step;
    psi_x = (bg.baker(x + h, t, p).vec() - bg.baker(x - h, t, p).vec()) / (2.0 * h);
    psi_t = (bg.baker(x, t + h, p).vec() - bg.baker(x, t - h, p).vec()) / (2.0 * h);
  } else {
    psi_x = bg.baker_dx(x, t, p).vec();
    psi_t = bg.baker_dt(x, t, p).vec();
  }
  const cplx lam = bg.lambda(p) + opts.lambda_offset;
  LaxDeviation d;
  d.x_equation = (psi_x - curve::lax_l(lam, bg.v_x(x, t)) * psi).norm();
  d.t_equation = (psi_t - curve::lax_a(lam, bg.exp_v(x, t)) * psi).norm();
  return d;
}

ScanResult singularity_scan(const dressing::DressedField& field, const GridSpec& g,
                            double threshold, int threads, bool lab_frame) {
  g.validate();
  std::vector<cplx> det(g.size());
  parallel_rows(g.nt, threads, [&](int j) {
    for (int i = 0; i < g.nx; ++i) {
      double x = g.x(i), t = g.t(j);
      if (lab_frame) std::tie(x, t) = std::pair(0.5 * (t + x), 0.5 * (t - x));
      det[g.index(i, j)] = field.determinant(x, t).det;
    }
  });

  ScanResult out;
  for (const auto& d : det) out.max_abs_det = std::max(out.max_abs_det, std::abs(d));
  const double floor = threshold * out.max_abs_det;
  auto small = [&](std::size_t n) { return !(std::abs(det[n]) > floor); };

  out.flags.assign(g.size(), NodeFlag::ok);
  for (int j = 0; j + 1 < g.nt; ++j)
    for (int i = 0; i + 1 < g.nx; ++i) {
      const std::array<std::size_t, 4> corners = {g.index(i, j), g.index(i + 1, j),
                                                  g.index(i + 1, j + 1), g.index(i, j + 1)};
      bool flag = false;
      double turn = 0.0;
      for (int c = 0; c < 4; ++c) {
        if (small(corners[c])) flag = true;
        turn += std::arg(det[corners[(c + 1) % 4]] / det[corners[c]]);
      }
      if (!flag && std::lround(turn / kTwoPi) != 0) flag = true;
      if (flag)
        for (auto n : corners) out.flags[n] = NodeFlag::singular;
    }
  for (int j = 0; j < g.nt; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t n = g.index(i, j);
      if (out.flags[n] == NodeFlag::singular) out.nodes.push_back({g.x(i), g.t(j), std::abs(det[n])});
    }
  return out;
}

}  // namespace tz::verify
