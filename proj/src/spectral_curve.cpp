#include "tzitzeica/spectral_curve.hpp"

#include <cmath>
#include <numbers>

#include "tzitzeica/errors.hpp"

namespace tz::curve {

namespace {
bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }
}  // namespace

SpectralPoint::SpectralPoint(cplx k) : k_(k) {
  if (k == cplx{0.0, 0.0}) throw MarkedPointError("k = 0 is the marked point P_0");
  if (!finite(k)) throw MarkedPointError("non-finite k denotes the marked point P_inf");
}

cplx lambda(const SpectralPoint& p) {
  const cplx k = p.k();
  return k * k * k;
}

SpectralPoint sigma(const SpectralPoint& p) { return SpectralPoint(-p.k()); }

SpectralPoint tau(const SpectralPoint& p) { return SpectralPoint(std::conj(p.k())); }

std::array<SpectralPoint, 3> preimages(cplx lambda0) {
  if (lambda0 == cplx{0.0, 0.0} || !finite(lambda0))
    throw MarkedPointError("lambda = 0 (or infinity) only has the marked point as preimage");
  const cplx k0 = std::polar(std::cbrt(std::abs(lambda0)), std::arg(lambda0) / 3.0);
  const cplx e = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);
  return {SpectralPoint(k0), SpectralPoint(e * k0), SpectralPoint(e * e * k0)};
}

BAValue baker_vacuum(double x, double t, const SpectralPoint& p) {
  const cplx k = p.k();
  const cplx ik = 1.0 / k;
  const cplx e = std::exp(k * x + t * ik);
  return {ik * e, ik * ik * e, ik * ik * ik * e};
}

cplx pairing(const BAValue& psi, const BAValue& phi, cplx lam_p) {
  return -psi.psi1 * phi.psi2 + psi.psi2 * phi.psi1 + lam_p * psi.psi3 * phi.psi3;
}

double kappa_inf(const SpectralPoint& p) { return p.k().real(); }

double kappa_0(const SpectralPoint& p) { return (1.0 / p.k()).real(); }

Eigen::Matrix3cd lax_l(cplx lam, cplx u_x) {
  Eigen::Matrix3cd l;
  l << -u_x, 0.0, lam,
       1.0, u_x, 0.0,
       0.0, 1.0, 0.0;
  return l;
}

Eigen::Matrix3cd lax_a(cplx lam, cplx exp_u) {
  Eigen::Matrix3cd a;
  a << 0.0, 1.0 / (exp_u * exp_u), 0.0,
       0.0, 0.0, exp_u,
       exp_u / lam, 0.0, 0.0;
  return a;
}

KernelJet BackgroundProvider::kernel(double x, double t, const SpectralPoint& p,
                                     const SpectralPoint& q) const {
  const cplx lp = lambda(p);
  const cplx lq = lambda(q);
  if (std::abs(lp - lq) <= 1e-12 * std::abs(lp)) throw CoincidentSpectrumError("kernel needs lambda(P) != lambda(Q)");
  const SpectralPoint sq = sigma(q);
  const BAValue ep = baker(x, t, p);
  const BAValue eq = baker(x, t, sq);
  const BAValue ep_t = baker_dt(x, t, p);
  const BAValue eq_t = baker_dt(x, t, sq);
  KernelJet jet;
  jet.value = pairing(ep, eq, lp) / (lp - lq);
  jet.dx = ep.psi2 * eq.psi3;
  jet.dt = -exp_v(x, t) * ep.psi3 * eq.psi1 / lq;
  jet.dxt = ep_t.psi2 * eq.psi3 + ep.psi2 * eq_t.psi3;
  return jet;
}

KernelJetX BackgroundProvider::kernel_x(double x, double t, const SpectralPoint& p,
                                       const SpectralPoint& q) const {
  const KernelJet j = kernel(x, t, p, q);
  return {j.log_scale, j.value, j.dx, j.dt, j.dxt};
}

BAValueX BackgroundProvider::baker_x(double x, double t, const SpectralPoint& p) const {
  const BAValue e = baker(x, t, p);
  return {e.psi1, e.psi2, e.psi3};
}

BAValueX BackgroundProvider::baker_dt_x(double x, double t, const SpectralPoint& p) const {
  const BAValue e = baker_dt(x, t, p);
  return {e.psi1, e.psi2, e.psi3};
}

BAValue VacuumBackground::baker(double x, double t, const SpectralPoint& p) const {
  return baker_vacuum(x, t, p);
}

BAValue VacuumBackground::baker_dx(double x, double t, const SpectralPoint& p) const {
  const BAValue e = baker_vacuum(x, t, p);
  const cplx k = p.k();
  return {k * e.psi1, k * e.psi2, k * e.psi3};
}

BAValue VacuumBackground::baker_dt(double x, double t, const SpectralPoint& p) const {
  const BAValue e = baker_vacuum(x, t, p);
  const cplx ik = 1.0 / p.k();
  return {ik * e.psi1, ik * e.psi2, ik * e.psi3};
}

cplx VacuumBackground::pairing_diag_constant(const SpectralPoint& p) const {
  const cplx k = p.k();
  return -3.0 / (k * k * k);
}

// omega = dk / k: simple poles at P_0 (residue +1) and P_inf (residue -1).
cplx VacuumBackground::omega_weight(const SpectralPoint& p) const { return 1.0 / p.k(); }

KernelJet VacuumBackground::kernel(double x, double t, const SpectralPoint& p,
                                   const SpectralPoint& q) const {
  const cplx k = p.k();
  const cplx kq = q.k();
  const cplx diff = k - kq;
  if (std::abs(diff) <= 1e-14 * std::abs(k))
    throw CoincidentSpectrumError("kernel evaluated at coincident points P = Q");
  const cplx rate_x = diff;
  const cplx rate_t = 1.0 / k - 1.0 / kq;
  KernelJet jet;
  jet.log_scale = rate_x * x + rate_t * t;
  jet.value = -1.0 / (k * k * kq * kq * kq * diff);
  jet.dx = rate_x * jet.value;
  jet.dt = rate_t * jet.value;
  jet.dxt = rate_x * rate_t * jet.value;
  return jet;
}

KernelJetX VacuumBackground::kernel_x(double x, double t, const SpectralPoint& p,
                                     const SpectralPoint& q) const {
  const xcplx k = p.k();
  const xcplx kq = q.k();
  const xcplx diff = k - kq;
  if (std::abs(diff) <= 1e-14L * std::abs(k))
    throw CoincidentSpectrumError("kernel evaluated at coincident points P = Q");
  const xcplx rate_t = 1.0L / k - 1.0L / kq;
  KernelJetX jet;
  jet.log_scale = diff * static_cast<long double>(x) + rate_t * static_cast<long double>(t);
  jet.value = -1.0L / (k * k * kq * kq * kq * diff);
  jet.dx = diff * jet.value;
  jet.dt = rate_t * jet.value;
  jet.dxt = diff * rate_t * jet.value;
  return jet;
}

BAValueX VacuumBackground::baker_x(double x, double t, const SpectralPoint& p) const {
  const xcplx k = p.k();
  const xcplx ik = 1.0L / k;
  const xcplx e = std::exp(k * static_cast<long double>(x) + static_cast<long double>(t) * ik);
  return {ik * e, ik * ik * e, ik * ik * ik * e};
}

BAValueX VacuumBackground::baker_dt_x(double x, double t, const SpectralPoint& p) const {
  const BAValueX e = baker_x(x, t, p);
  const xcplx ik = 1.0L / xcplx(p.k());
  return {ik * e.psi1, ik * e.psi2, ik * e.psi3};
}

}  // namespace tz::curve
