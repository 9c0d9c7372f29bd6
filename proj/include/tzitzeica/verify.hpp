#pragma once

// Independent checks of candidate solutions of u_xt = e^u - e^{-2u}.

#include <optional>
#include <string>
#include <vector>

#include "tzitzeica/dressing.hpp"
#include "tzitzeica/field.hpp"
#include "tzitzeica/spectral_curve.hpp"

namespace tz::verify {

struct FlaggedNode {
  int i = 0, j = 0;
  double x = 0.0, t = 0.0;
  NodeFlag flag = NodeFlag::singular;
};

struct VerificationReport {
  double max_abs_residual = 0.0;
  // max_abs_residual / max |e^u| over the checked nodes.
  double rel_residual = 0.0;
  double max_abs_exp_u = 0.0;
  int checked = 0;
  int excluded = 0;
  std::optional<double> argmax_x, argmax_t;
  std::vector<FlaggedNode> flagged;

  // Goursat refinement study: deviation per level and the order between
  // consecutive levels.
  std::vector<double> deviations;
  std::vector<double> orders;
  std::optional<double> convergence_order;  // smallest of orders
  bool blow_up = false;
  bool skipped = false;
  std::string note;
};

// Light-cone coordinates seen from the lab frame: x = (T + X) / 2,
// t = (T - X) / 2, so that U_TT - U_XX = u_xt.
class LabFrameSource final : public FieldSource {
 public:
  explicit LabFrameSource(const FieldSource& lightcone) : src_(lightcone) {}
  cplx exp_u(double lab_x, double lab_t) const override {
    return src_.exp_u(0.5 * (lab_t + lab_x), 0.5 * (lab_t - lab_x));
  }
  cplx exp_v(double lab_x, double lab_t) const override {
    return src_.exp_v(0.5 * (lab_t + lab_x), 0.5 * (lab_t - lab_x));
  }

 private:
  const FieldSource& src_;
};

struct StencilOptions {
  // Local step of the fourth-order stencil around each grid node.
  double step = 1e-3;
  // Combine steps h and h/2 to cancel the h^4 error term.
  bool richardson = true;
  // Nodes within this many cells of a flagged node are skipped, on top of
  // the stencil reach.
  int buffer = 2;
  int threads = 1;
};

// Sampled-field mode: fourth-order stencils on the grid spacing itself.
// Flagged nodes and their neighbourhood are excluded.
VerificationReport residual_lightcone(const FieldGrid& field, int buffer = 2);
// u_tt - u_xx on a field sampled in lab coordinates.
VerificationReport residual_lab(const FieldGrid& field, int buffer = 2);

// Source mode: each grid node gets its own stencil of width opts.step.
// flags (empty, or one per node) marks nodes to leave out.
VerificationReport residual_lightcone(const FieldSource& src, const GridSpec& grid,
                                      const std::vector<NodeFlag>& flags = {},
                                      const StencilOptions& opts = {});
// src is a lab-frame source, e.g. LabFrameSource; grid is in (X, T).
VerificationReport residual_lab(const FieldSource& src, const GridSpec& grid,
                                const std::vector<NodeFlag>& flags = {},
                                const StencilOptions& opts = {});

struct GoursatOptions {
  int levels = 4;  // base grid plus levels - 1 refinements
  // Negative control: added to u at the boundary node nearest this point.
  std::optional<std::pair<double, double>> corrupt_at;
  double corrupt_amount = 0.1;
  double blow_up_limit = 1e6;
};

// Integrates the characteristic (Goursat) problem from the traces of src on
// x = x0 and t = t0 and compares with src on the base-grid nodes.
VerificationReport goursat_cross_check(const FieldSource& src, const GridSpec& grid,
                                       const GoursatOptions& opts = {});

struct LaxDeviation {
  double x_equation = 0.0;  // |psi_x - L psi|
  double t_equation = 0.0;  // |psi_t - A psi|
};

struct LaxOptions {
  // Central differences with this step instead of analytic derivatives.
  std::optional<double> fd_step;
  // Added to lambda inside L and A (negative control).
  cplx lambda_offset = 0.0;
};

// The background Baker-Akhiezer vector at P against the Lax matrices built
// from the background field.
LaxDeviation lax_check(double x, double t, const curve::SpectralPoint& p,
                       const curve::BackgroundProvider& bg, const LaxOptions& opts = {});

struct ScanNode {
  double x = 0.0, t = 0.0;
  double abs_det = 0.0;
};

struct ScanResult {
  std::vector<ScanNode> nodes;      // flagged nodes, t-major order
  std::vector<NodeFlag> flags;      // one per grid node
  double max_abs_det = 0.0;
};

// Flags every node touching a cell around which the (balanced) determinant
// winds, or whose |det| is below threshold * max |det| on the grid. With
// lab_frame the grid is read as (X, T) and mapped like LabFrameSource.
ScanResult singularity_scan(const dressing::DressedField& field, const GridSpec& grid,
                            double threshold = 1e-12, int threads = 1, bool lab_frame = false);

}  // namespace tz::verify
