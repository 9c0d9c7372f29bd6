#pragma once

// Sampled fields on rectangular (x, t) lattices and the interface for
// anything that can produce e^u pointwise.

#include <complex>
#include <cstdint>
#include <string_view>
#include <vector>

#include "tzitzeica/detail/parallel.hpp"

namespace tz {

using cplx = std::complex<double>;

struct GridSpec {
  double x0 = 0.0, x1 = 1.0;
  double t0 = 0.0, t1 = 1.0;
  int nx = 3, nt = 3;

  void validate() const;  // throws ConfigError
  double hx() const { return (x1 - x0) / (nx - 1); }
  double ht() const { return (t1 - t0) / (nt - 1); }
  double x(int i) const { return i == nx - 1 ? x1 : x0 + i * hx(); }
  double t(int j) const { return j == nt - 1 ? t1 : t0 + j * ht(); }
  std::size_t size() const { return static_cast<std::size_t>(nx) * nt; }
  // Row-major with t as the slow index.
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
  // Same box with (n - 1) * 2^level + 1 nodes per axis.
  GridSpec refined(int level) const;
};

enum class NodeFlag : std::uint8_t { ok, singular, branch };

std::string_view to_string(NodeFlag f);
NodeFlag node_flag_from(std::string_view s);  // throws ConfigError

struct FieldGrid {
  GridSpec grid;
  std::vector<cplx> u;
  std::vector<cplx> exp_u;
  std::vector<NodeFlag> flags;

  explicit FieldGrid(const GridSpec& g)
      : grid(g), u(g.size()), exp_u(g.size()), flags(g.size(), NodeFlag::ok) {}
};

class FieldSource {
 public:
  virtual ~FieldSource() = default;
  // May throw SolutionSingular / ThetaDivisorError at singular points.
  virtual cplx exp_u(double x, double t) const = 0;
  virtual cplx exp_v(double x, double t) const = 0;
};

// Evaluates e^u on every node (rows in parallel when threads > 1), flags
// nodes where evaluation fails, and recovers a continuous logarithm:
// each row is unwrapped from its first valid node, then rows are stitched
// together by 2 pi i shifts in a serial pass.
FieldGrid sample_field(const FieldSource& src, const GridSpec& grid, int threads = 1);

// Rebuilds u from exp_u with the same unwrapping rules. Singular flags are
// kept; branch flags are recomputed.
void unwrap_log(FieldGrid& field);

}  // namespace tz
