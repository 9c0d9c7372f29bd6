#pragma once

// Genus-0 spectral curve: the Riemann sphere with coordinate k and
// spectral parameter lambda = k^3. The marked points P_inf (k = inf) and
// P_0 (k = 0) are never represented as SpectralPoint values.

#include <array>
#include <complex>
#include <Eigen/Dense>

namespace tz::curve {

using cplx = std::complex<double>;

class SpectralPoint {
 public:
  // Throws MarkedPointError for k == 0 or non-finite k.
  explicit SpectralPoint(cplx k);

  cplx k() const { return k_; }
  friend bool operator==(const SpectralPoint&, const SpectralPoint&) = default;

 private:
  cplx k_;
};

struct BAValue {
  cplx psi1{};
  cplx psi2{};
  cplx psi3{};

  Eigen::Vector3cd vec() const { return {psi1, psi2, psi3}; }
  static BAValue from(const Eigen::Vector3cd& v) { return {v(0), v(1), v(2)}; }
};

cplx lambda(const SpectralPoint& p);
SpectralPoint sigma(const SpectralPoint& p);
SpectralPoint tau(const SpectralPoint& p);

// The three solutions of lambda(P) = lambda0: {k0, e k0, e^2 k0} with
// e = exp(2 pi i / 3) and k0 the principal cube root, arg in (-pi/3, pi/3].
std::array<SpectralPoint, 3> preimages(cplx lambda0);

// Vacuum Baker-Akhiezer vector psi_i = k^{-i} exp(k x + t / k).
BAValue baker_vacuum(double x, double t, const SpectralPoint& p);

// <psi|phi> = -psi1 phi2 + psi2 phi1 + lam_p psi3 phi3.
cplx pairing(const BAValue& psi, const BAValue& phi, cplx lam_p);

// Real parts of the Abelian integrals of dk and dq (q = 1/k).
double kappa_inf(const SpectralPoint& p);
double kappa_0(const SpectralPoint& p);

// Lax matrices of the zero-curvature pair, written in terms of u_x and
// e^u so that no logarithm is needed.
Eigen::Matrix3cd lax_l(cplx lam, cplx u_x);
Eigen::Matrix3cd lax_a(cplx lam, cplx exp_u);

// A kernel value with its x/t derivatives, all sharing the factor
// exp(log_scale). Keeping the exponential separate lets callers rescale
// rows and columns before anything overflows.
struct KernelJet {
  cplx log_scale{};
  cplx value{};
  cplx dx{};
  cplx dt{};
  cplx dxt{};

  cplx full_value() const { return value * std::exp(log_scale); }
};

// Extended-precision counterparts, for callers that combine many entries
// into determinants of nearly singular matrices.
using xcplx = std::complex<long double>;

struct KernelJetX {
  xcplx log_scale{};
  xcplx value{};
  xcplx dx{};
  xcplx dt{};
  xcplx dxt{};
};

struct BAValueX {
  xcplx psi1{};
  xcplx psi2{};
  xcplx psi3{};
};

// What the dressing construction needs from a background: the curve
// structure, Baker-Akhiezer functions and the third-kind differential.
// Only the vacuum implementation ships; a theta-function provider for
// finite-gap backgrounds would plug in here.
class BackgroundProvider {
 public:
  virtual ~BackgroundProvider() = default;

  virtual cplx lambda(const SpectralPoint& p) const = 0;
  virtual SpectralPoint sigma(const SpectralPoint& p) const = 0;
  virtual BAValue baker(double x, double t, const SpectralPoint& p) const = 0;
  virtual BAValue baker_dx(double x, double t, const SpectralPoint& p) const = 0;
  virtual BAValue baker_dt(double x, double t, const SpectralPoint& p) const = 0;
  // <e(P)|e(sigma P)>, independent of x and t.
  virtual cplx pairing_diag_constant(const SpectralPoint& p) const = 0;
  // omega / dk at P.
  virtual cplx omega_weight(const SpectralPoint& p) const = 0;
  virtual double kappa_inf(const SpectralPoint& p) const = 0;
  virtual double kappa_0(const SpectralPoint& p) const = 0;
  virtual cplx exp_v(double x, double t) const = 0;
  virtual cplx v_x(double x, double t) const = 0;

  // Omega(x,t,P,Q) = <e(P)|e(sigma Q)> / (lambda(P) - lambda(Q)) with its
  // derivatives, before calibration. The generic version needs
  // lambda(P) != lambda(Q); providers with a closed form may extend it to
  // the removable case P != Q, lambda(P) = lambda(Q).
  virtual KernelJet kernel(double x, double t, const SpectralPoint& p,
                           const SpectralPoint& q) const;

  // Defaults widen the double-precision results.
  virtual KernelJetX kernel_x(double x, double t, const SpectralPoint& p,
                              const SpectralPoint& q) const;
  virtual BAValueX baker_x(double x, double t, const SpectralPoint& p) const;
  virtual BAValueX baker_dt_x(double x, double t, const SpectralPoint& p) const;
};

class VacuumBackground final : public BackgroundProvider {
 public:
  cplx lambda(const SpectralPoint& p) const override { return curve::lambda(p); }
  SpectralPoint sigma(const SpectralPoint& p) const override { return curve::sigma(p); }
  BAValue baker(double x, double t, const SpectralPoint& p) const override;
  BAValue baker_dx(double x, double t, const SpectralPoint& p) const override;
  BAValue baker_dt(double x, double t, const SpectralPoint& p) const override;
  cplx pairing_diag_constant(const SpectralPoint& p) const override;
  cplx omega_weight(const SpectralPoint& p) const override;
  double kappa_inf(const SpectralPoint& p) const override { return curve::kappa_inf(p); }
  double kappa_0(const SpectralPoint& p) const override { return curve::kappa_0(p); }
  cplx exp_v(double, double) const override { return 1.0; }
  cplx v_x(double, double) const override { return 0.0; }

  // Closed form -exp((k-q)x + (1/k-1/q)t) / (k^2 q^3 (k-q)), finite for
  // every pair of distinct points.
  KernelJet kernel(double x, double t, const SpectralPoint& p,
                   const SpectralPoint& q) const override;

  KernelJetX kernel_x(double x, double t, const SpectralPoint& p,
                      const SpectralPoint& q) const override;
  BAValueX baker_x(double x, double t, const SpectralPoint& p) const override;
  BAValueX baker_dt_x(double x, double t, const SpectralPoint& p) const override;
};

}  // namespace tz::curve
