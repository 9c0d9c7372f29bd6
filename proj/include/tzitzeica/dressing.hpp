#pragma once

// N-soliton dressing of a background through the Hirota-type formula
//
//   e^u = e^v - d_x d_t ln det(1 - Omega J)
//
// Omega is the 2N x 2N kernel matrix (rows sigma(Lambda_i), sigma(Lambda_i*);
// columns Lambda_j, Lambda_j*) and J couples each Lambda_j with the value at
// sigma(Lambda_j*) as the residue conditions require:
//
//   J = diag(C_1..C_N, -C_1..-C_N) * [[0, 1], [1, 0]].
//
// An independent route solves the residue conditions for the ansatz
// coefficients directly (exp_u_via_linear_system).

#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "tzitzeica/field.hpp"
#include "tzitzeica/spectral_curve.hpp"

namespace tz::dressing {

using curve::BackgroundProvider;
using curve::KernelJet;
using curve::SpectralPoint;

struct SolitonPoints {
  SpectralPoint lambda_pt;  // Lambda_j
  SpectralPoint star_pt;    // Lambda_j*, with lambda(Lambda_j*) = -lambda(Lambda_j)
};

class SolitonConfig {
 public:
  SolitonConfig() = default;

  // Lambda_j is the principal preimage k0 of lambda_j and
  // sigma(Lambda_j*) = e k0, the next preimage counter-clockwise, so that
  // lambda(Lambda_j) = lambda(sigma Lambda_j*) = lambda_j.
  static SolitonConfig canonical(const std::vector<cplx>& lambdas, const std::vector<cplx>& c);
  // Explicit k-coordinates of Lambda_j and Lambda_j*.
  static SolitonConfig explicit_points(const std::vector<std::pair<cplx, cplx>>& ks,
                                       const std::vector<cplx>& c);

  int size() const { return static_cast<int>(pairs_.size()); }
  const std::vector<SolitonPoints>& pairs() const { return pairs_; }
  const std::vector<cplx>& constants() const { return c_; }
  cplx lambda(int j) const { return curve::lambda(pairs_[j].lambda_pt); }

  // Columns of the kernel matrix: Lambda_1..Lambda_N, Lambda_1*..Lambda_N*.
  std::vector<SpectralPoint> column_points() const;

  SolitonConfig with_constants(std::vector<cplx> c) const;

 private:
  SolitonConfig(std::vector<SolitonPoints> pairs, std::vector<cplx> c);
  void validate() const;

  std::vector<SolitonPoints> pairs_;
  std::vector<cplx> c_;
};

struct ResidueCheck {
  cplx value;          // with n quadrature points
  cplx refined;        // with 2n points
  bool converged = false;
};

// Trapezoid rule on the circle |k - k(Q)| = radius for
//   (1 / 2 pi i) \oint 3 scale Omega(x,t,P,Q) lambda(P)^2 omega(P).
ResidueCheck residue_identity_check(const SpectralPoint& q, const BackgroundProvider& bg,
                                    int quadrature_points = 256, double radius = 0.1,
                                    double x = 0.0, double t = 0.0, cplx scale = 1.0);

// Kernel calibration constant s: 1 / (uncalibrated residue) at the
// reference point k = 1, so that the residue identity reads 1.
cplx calibrate(const BackgroundProvider& bg);

KernelJet omega_kernel(double x, double t, const SpectralPoint& p, const SpectralPoint& q,
                       const BackgroundProvider& bg, cplx scale);

// Block matrix [[A, B], [C, D]] with A_ij = Omega(sigma Lambda_i, Lambda_j),
// B_ij = Omega(sigma Lambda_i, Lambda_j*), C_ij = Omega(sigma Lambda_i*,
// Lambda_j), D_ij = Omega(sigma Lambda_i*, Lambda_j*).
Eigen::MatrixXcd build_matrix(double x, double t, const SolitonConfig& cfg,
                              const BackgroundProvider& bg, cplx scale);
Eigen::MatrixXcd diag_c(const SolitonConfig& cfg);
// diag_c(cfg) times the block swap.
Eigen::MatrixXcd coupling(const SolitonConfig& cfg);

struct DressingOptions {
  // Kernel scale; the calibrated constant when unset.
  std::optional<cplx> kernel_scale;
  // det is treated as zero below this fraction of its Hadamard bound.
  double singular_threshold = 1e-12;
};

// Determinant of the rescaled matrix with its derivatives.
struct DeterminantJet {
  // det of the rescaled and equilibrated matrix: a positive multiple of
  // det(1 - Omega J), so it has the same zeros and phase.
  cplx det;
  double hadamard = 0;  // product of its column norms
  cplx log_det_x, log_det_t, log_det_xt;
};

class DressedField final : public FieldSource {
 public:
  DressedField(std::shared_ptr<const BackgroundProvider> bg, SolitonConfig cfg,
               DressingOptions opts = {});

  cplx exp_u(double x, double t) const override;
  cplx exp_v(double x, double t) const override { return bg_->exp_v(x, t); }

  // Oracle: solve the residue conditions for alpha, then
  // e^u = e^v - d_t (s * sum_c e_2(sigma P_c) alpha_c).
  cplx exp_u_via_linear_system(double x, double t) const;
  // s * sum_c e_3(sigma P_c) alpha_c; vanishes for a correctly normalised
  // Baker-Akhiezer function.
  cplx normalization_defect(double x, double t) const;

  DeterminantJet determinant(double x, double t) const;
  // d_x d_t ln det(1 - Omega J), analytic.
  cplx log_det_xt(double x, double t) const { return determinant(x, t).log_det_xt; }
  // Unscaled det(1 - Omega J); overflows for large |x|, |t|.
  cplx raw_det(double x, double t) const;

  cplx kernel_scale() const { return scale_; }
  const SolitonConfig& config() const { return cfg_; }
  const BackgroundProvider& provider() const { return *bg_; }
  double singular_threshold() const { return opts_.singular_threshold; }

 private:
  using xcplx = curve::xcplx;
  using MatX = Eigen::Matrix<xcplx, Eigen::Dynamic, Eigen::Dynamic>;
  using VecX = Eigen::Matrix<xcplx, Eigen::Dynamic, 1>;
  struct LinearSolution {
    VecX alpha, alpha_t;
    VecX e2, e2_t, e3;
  };
  LinearSolution solve_residue_conditions(double x, double t) const;

  std::shared_ptr<const BackgroundProvider> bg_;
  SolitonConfig cfg_;
  DressingOptions opts_;
  cplx scale_;
  std::vector<SpectralPoint> cols_;
  std::vector<SpectralPoint> rows_;
};

}  // namespace tz::dressing
