#include "tzitzeica/field.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "tzitzeica/errors.hpp"

namespace tz {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// A phase step larger than this between neighbours cannot be unwrapped
// reliably.
constexpr double kBranchLimit = std::numbers::pi / 2.0;

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

void GridSpec::validate() const {
  if (!(x1 > x0)) throw ConfigError("grid requires x1 > x0");
  if (!(t1 > t0)) throw ConfigError("grid requires t1 > t0");
  if (nx < 3 || nt < 3) throw ConfigError("grid requires nx, nt >= 3");
}

GridSpec GridSpec::refined(int level) const {
  GridSpec g = *this;
  g.nx = (nx - 1) * (1 << level) + 1;
  g.nt = (nt - 1) * (1 << level) + 1;
  return g;
}

std::string_view to_string(NodeFlag f) {
  switch (f) {
    case NodeFlag::ok: return "ok";
    case NodeFlag::singular: return "singular";
    case NodeFlag::branch: return "branch";
  }
  return "ok";
}

NodeFlag node_flag_from(std::string_view s) {
  if (s == "ok") return NodeFlag::ok;
  if (s == "singular") return NodeFlag::singular;
  if (s == "branch") return NodeFlag::branch;
  throw ConfigError("unknown node flag '" + std::string(s) + "'");
}

void unwrap_log(FieldGrid& field) {
  const GridSpec& g = field.grid;
  for (auto& f : field.flags)
    if (f == NodeFlag::branch) f = NodeFlag::ok;

  auto valid = [&](std::size_t n) {
    return field.flags[n] != NodeFlag::singular && finite(field.exp_u[n]) &&
           field.exp_u[n] != cplx{0.0, 0.0};
  };

  // Row-wise unwrapping from the first valid node of each row.
  std::vector<int> anchor(g.nt, -1);
  for (int j = 0; j < g.nt; ++j) {
    std::size_t prev = 0;
    bool have_prev = false;
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t n = g.index(i, j);
      if (!valid(n)) {
        field.flags[n] = NodeFlag::singular;
        field.u[n] = cplx{std::nan(""), std::nan("")};
        continue;
      }
      if (!have_prev) {
        field.u[n] = std::log(field.exp_u[n]);
        anchor[j] = i;
      } else {
        const cplx step = std::log(field.exp_u[n] / field.exp_u[prev]);
        if (std::abs(step.imag()) > kBranchLimit) field.flags[n] = NodeFlag::branch;
        field.u[n] = field.u[prev] + step;
      }
      prev = n;
      have_prev = true;
    }
  }

  // Stitch rows: shift row j by a multiple of 2 pi i to continue row j-1
  // at the first column valid in both.
  for (int j = 1; j < g.nt; ++j) {
    if (anchor[j] < 0) continue;
    int col = -1;
    for (int i = 0; i < g.nx; ++i)
      if (valid(g.index(i, j)) && valid(g.index(i, j - 1))) {
        col = i;
        break;
      }
    if (col < 0) continue;
    const std::size_t up = g.index(col, j);
    const std::size_t down = g.index(col, j - 1);
    const cplx step = std::log(field.exp_u[up] / field.exp_u[down]);
    if (std::abs(step.imag()) > kBranchLimit) field.flags[up] = NodeFlag::branch;
    const cplx target = field.u[down] + step;
    const double turns = std::round((target.imag() - field.u[up].imag()) / kTwoPi);
    if (turns != 0.0)
      for (int i = 0; i < g.nx; ++i) {
        const std::size_t n = g.index(i, j);
        if (valid(n)) field.u[n] += cplx{0.0, turns * kTwoPi};
      }
  }
}

FieldGrid sample_field(const FieldSource& src, const GridSpec& grid, int threads) {
  grid.validate();
  FieldGrid field(grid);
  parallel_rows(grid.nt, threads, [&](int j) {
    for (int i = 0; i < grid.nx; ++i) {
      const std::size_t n = grid.index(i, j);
      try {
        field.exp_u[n] = src.exp_u(grid.x(i), grid.t(j));
        if (!finite(field.exp_u[n])) field.flags[n] = NodeFlag::singular;
      } catch (const SingularPoint&) {
        field.exp_u[n] = cplx{std::nan(""), std::nan("")};
        field.flags[n] = NodeFlag::singular;
      }
    }
  });
  unwrap_log(field);
  return field;
}

}  // namespace tz
