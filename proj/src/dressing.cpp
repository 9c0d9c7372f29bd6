#include "tzitzeica/dressing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "tzitzeica/errors.hpp"

namespace tz::dressing {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI{0.0, 1.0};

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

using curve::xcplx;

cplx narrow(xcplx z) { return {static_cast<double>(z.real()), static_cast<double>(z.imag())}; }

}  // namespace

SolitonConfig::SolitonConfig(std::vector<SolitonPoints> pairs, std::vector<cplx> c)
    : pairs_(std::move(pairs)), c_(std::move(c)) {
  validate();
}

SolitonConfig SolitonConfig::canonical(const std::vector<cplx>& lambdas,
                                       const std::vector<cplx>& c) {
  if (lambdas.size() != c.size())
    throw ConfigError("soliton lambdas and constants C differ in length");
  std::vector<SolitonPoints> pairs;
  pairs.reserve(lambdas.size());
  for (cplx lam : lambdas) {
    if (lam == cplx{0.0, 0.0} || !finite(lam))
      throw ConfigError("soliton lambda must be finite and nonzero");
    const auto pre = curve::preimages(lam);
    // sigma(Lambda*) = e k0, hence Lambda* = -e k0.
    pairs.push_back({pre[0], curve::sigma(pre[1])});
  }
  return SolitonConfig(std::move(pairs), c);
}

SolitonConfig SolitonConfig::explicit_points(const std::vector<std::pair<cplx, cplx>>& ks,
                                             const std::vector<cplx>& c) {
  if (ks.size() != c.size())
    throw ConfigError("soliton points and constants C differ in length");
  std::vector<SolitonPoints> pairs;
  pairs.reserve(ks.size());
  for (const auto& [k, k_star] : ks) {
    try {
      pairs.push_back({SpectralPoint(k), SpectralPoint(k_star)});
    } catch (const MarkedPointError& e) {
      throw ConfigError(std::string("soliton point: ") + e.what());
    }
  }
  return SolitonConfig(std::move(pairs), c);
}

SolitonConfig SolitonConfig::with_constants(std::vector<cplx> c) const {
  return SolitonConfig(pairs_, std::move(c));
}

void SolitonConfig::validate() const {
  const int n = size();
  if (c_.size() != pairs_.size()) throw ConfigError("one constant C_j is needed per soliton");
  for (int j = 0; j < n; ++j) {
    if (c_[j] == cplx{0.0, 0.0} || !finite(c_[j]))
      throw ConfigError("soliton constants C_j must be finite and nonzero");
    const cplx lam = lambda(j);
    const cplx lam_star = curve::lambda(pairs_[j].star_pt);
    if (std::abs(lam + lam_star) > 1e-10 * std::abs(lam))
      throw ConfigError("lambda(Lambda_j*) must equal -lambda(Lambda_j) for soliton " +
                        std::to_string(j));
    for (int i = 0; i < j; ++i) {
      const cplx li = lambda(i);
      if (std::abs(li * li - lam * lam) <= 1e-12 * std::max(std::norm(li), std::norm(lam)))
        throw ConfigError("soliton parameters need lambda_i^2 != lambda_j^2");
    }
  }
  // No kernel entry may sit on its pole sigma(P_r) = P_c.
  const auto cols = column_points();
  for (const auto& pr : cols)
    for (const auto& pc : cols)
      if (std::abs(-pr.k() - pc.k()) <= 1e-12 * std::abs(pc.k()))
        throw ConfigError("soliton points place a kernel entry on its pole");
}

std::vector<SpectralPoint> SolitonConfig::column_points() const {
  std::vector<SpectralPoint> cols;
  cols.reserve(2 * pairs_.size());
  for (const auto& p : pairs_) cols.push_back(p.lambda_pt);
  for (const auto& p : pairs_) cols.push_back(p.star_pt);
  return cols;
}

ResidueCheck residue_identity_check(const SpectralPoint& q, const BackgroundProvider& bg,
                                    int quadrature_points, double radius, double x, double t,
                                    cplx scale) {
  if (quadrature_points < 4) throw ConfigError("residue check needs at least 4 points");
  if (!(radius > 0.0) || radius >= std::abs(q.k()))
    throw ConfigError("residue contour must exclude the marked point k = 0");
  auto quad = [&](int n) {
    cplx sum = 0.0;
    for (int m = 0; m < n; ++m) {
      const cplx w = std::polar(radius, 2.0 * kPi * m / n);
      const SpectralPoint p(q.k() + w);
      const cplx lam = bg.lambda(p);
      const cplx omega = bg.kernel(x, t, p, q).full_value();
      sum += 3.0 * scale * omega * lam * lam * bg.omega_weight(p) * w;
    }
    // dk = i w dtheta; the i cancels against 1 / (2 pi i).
    return sum / static_cast<double>(n);
  };
  ResidueCheck out;
  out.value = quad(quadrature_points);
  out.refined = quad(2 * quadrature_points);
  out.converged = std::abs(out.value - out.refined) <= 1e-8;
  return out;
}

cplx calibrate(const BackgroundProvider& bg) {
  const ResidueCheck r = residue_identity_check(SpectralPoint(1.0), bg);
  if (!r.converged || std::abs(r.refined) == 0.0)
    throw NumericalError("kernel calibration: residue quadrature did not converge");
  return 1.0 / r.refined;
}

KernelJet omega_kernel(double x, double t, const SpectralPoint& p, const SpectralPoint& q,
                       const BackgroundProvider& bg, cplx scale) {
  KernelJet jet = bg.kernel(x, t, p, q);
  jet.value *= scale;
  jet.dx *= scale;
  jet.dt *= scale;
  jet.dxt *= scale;
  return jet;
}

Eigen::MatrixXcd build_matrix(double x, double t, const SolitonConfig& cfg,
                              const BackgroundProvider& bg, cplx scale) {
  const auto cols = cfg.column_points();
  const auto n = static_cast<Eigen::Index>(cols.size());
  Eigen::MatrixXcd m(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c)
      m(r, c) = omega_kernel(x, t, bg.sigma(cols[r]), cols[c], bg, scale).full_value();
  return m;
}

Eigen::MatrixXcd diag_c(const SolitonConfig& cfg) {
  const int n = cfg.size();
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  for (int j = 0; j < n; ++j) {
    d(j, j) = cfg.constants()[j];
    d(n + j, n + j) = -cfg.constants()[j];
  }
  return d;
}

Eigen::MatrixXcd coupling(const SolitonConfig& cfg) {
  const int n = cfg.size();
  Eigen::MatrixXcd swap = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  swap.topRightCorner(n, n).setIdentity();
  swap.bottomLeftCorner(n, n).setIdentity();
  return diag_c(cfg) * swap;
}

DressedField::DressedField(std::shared_ptr<const BackgroundProvider> bg, SolitonConfig cfg,
                           DressingOptions opts)
    : bg_(std::move(bg)), cfg_(std::move(cfg)), opts_(opts) {
  if (!bg_) throw ConfigError("dressing needs a background provider");
  scale_ = opts_.kernel_scale ? *opts_.kernel_scale : calibrate(*bg_);
  cols_ = cfg_.column_points();
  for (const auto& p : cols_) rows_.push_back(bg_->sigma(p));
}

DeterminantJet DressedField::determinant(double x, double t) const {
  const int n = cfg_.size();
  const int m = 2 * n;
  DeterminantJet out;
  if (n == 0) {
    out.det = 1.0;
    out.hadamard = 1.0;
    return out;
  }
  auto partner = [n](int r) { return r < n ? r + n : r - n; };
  auto j_coef = [&](int r) { return r >= n ? cfg_.constants()[r - n] : -cfg_.constants()[r]; };

  // Growth rates of e(sigma P_r): |e| ~ exp(kx_r x + kt_r t).
  std::vector<long double> kx(m), kt(m), lr(m);
  for (int r = 0; r < m; ++r) {
    kx[r] = bg_->kappa_inf(rows_[r]);
    kt[r] = bg_->kappa_0(rows_[r]);
    lr[r] = kx[r] * x + kt[r] * t;
  }
  // Column r' of 1 - Omega J grows like exp(lr[r'] + lr[partner(r')]); divide it
  // out where it exceeds one. Every scale is exp(linear), so d_x d_t ln det
  // is unchanged.
  std::vector<bool> damp(m);
  for (int r = 0; r < m; ++r) damp[r] = lr[r] + lr[partner(r)] > 0.0L;

  const xcplx scale(scale_);
  MatX b(m, m), bx(m, m), bt(m, m), bxt(m, m);
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < m; ++c) {
      const int pc = partner(c);
      long double g = lr[c] - lr[r];
      long double gx = kx[c] - kx[r];
      long double gt = kt[c] - kt[r];
      if (damp[c]) {
        g -= lr[c] + lr[pc];
        gx -= kx[c] + kx[pc];
        gt -= kt[c] + kt[pc];
      }
      const curve::KernelJetX k = bg_->kernel_x(x, t, rows_[r], cols_[pc]);
      const xcplx w = -xcplx(j_coef(c)) * scale * std::exp(k.log_scale + g);
      xcplx v = w * k.value;
      xcplx vx = w * (k.dx + gx * k.value);
      xcplx vt = w * (k.dt + gt * k.value);
      xcplx vxt = w * (k.dxt + gx * k.dt + gt * k.dx + gx * gt * k.value);
      if (r == c) {
        const long double e = std::exp(g);
        v += e;
        vx += gx * e;
        vt += gt * e;
        vxt += gx * gt * e;
      }
      b(r, c) = v;
      bx(r, c) = vx;
      bt(r, c) = vt;
      bxt(r, c) = vxt;
    }
  }

  // Row and column equilibration by powers of two: exact, constant in
  // (x, t), and it puts |det| on a common scale across the grid.
  auto rescale_row = [&](int r, long double f) {
    b.row(r) *= f;
    bx.row(r) *= f;
    bt.row(r) *= f;
    bxt.row(r) *= f;
  };
  auto rescale_col = [&](int c, long double f) {
    b.col(c) *= f;
    bx.col(c) *= f;
    bt.col(c) *= f;
    bxt.col(c) *= f;
  };
  for (int sweep = 0; sweep < 3; ++sweep) {
    for (int r = 0; r < m; ++r) {
      const long double mx = b.row(r).cwiseAbs().maxCoeff();
      if (mx > 0.0L && std::isfinite(mx)) rescale_row(r, std::ldexp(1.0L, -std::ilogb(mx)));
    }
    for (int c = 0; c < m; ++c) {
      const long double mx = b.col(c).cwiseAbs().maxCoeff();
      if (mx > 0.0L && std::isfinite(mx)) rescale_col(c, std::ldexp(1.0L, -std::ilogb(mx)));
    }
  }

  const Eigen::PartialPivLU<MatX> lu(b);
  const xcplx det = lu.determinant();
  out.det = cplx(static_cast<double>(det.real()), static_cast<double>(det.imag()));
  long double had = 1.0L;
  for (int c = 0; c < m; ++c) had *= b.col(c).norm();
  out.hadamard = static_cast<double>(had);
  if (det == xcplx{0.0L, 0.0L}) return out;
  const MatX ix = lu.solve(bx);
  const MatX it = lu.solve(bt);
  out.log_det_x = narrow(ix.trace());
  out.log_det_t = narrow(it.trace());
  out.log_det_xt = narrow(lu.solve(bxt).trace() - (ix * it).trace());
  return out;
}

cplx DressedField::exp_u(double x, double t) const {
  if (cfg_.size() == 0) return bg_->exp_v(x, t);
  const DeterminantJet d = determinant(x, t);
  if (!(std::abs(d.det) > opts_.singular_threshold * d.hadamard))
    throw SolutionSingular("det(1 - Omega J) vanishes at x=" + std::to_string(x) +
                           ", t=" + std::to_string(t));
  return bg_->exp_v(x, t) - d.log_det_xt;
}

cplx DressedField::raw_det(double x, double t) const {
  const int m = 2 * cfg_.size();
  if (m == 0) return 1.0;
  const Eigen::MatrixXcd k = build_matrix(x, t, cfg_, *bg_, scale_);
  return (Eigen::MatrixXcd::Identity(m, m) - k * coupling(cfg_)).determinant();
}

DressedField::LinearSolution DressedField::solve_residue_conditions(double x, double t) const {
  const int m = 2 * cfg_.size();
  LinearSolution s;
  s.e2.resize(m);
  s.e2_t.resize(m);
  s.e3.resize(m);
  VecX e3_t(m);
  MatX k(m, m), k_t(m, m);
  const xcplx scale(scale_);
  for (int r = 0; r < m; ++r) {
    const auto e = bg_->baker_x(x, t, rows_[r]);
    const auto et = bg_->baker_dt_x(x, t, rows_[r]);
    s.e2(r) = e.psi2;
    s.e3(r) = e.psi3;
    s.e2_t(r) = et.psi2;
    e3_t(r) = et.psi3;
    for (int c = 0; c < m; ++c) {
      const curve::KernelJetX jet = bg_->kernel_x(x, t, rows_[r], cols_[c]);
      const xcplx f = scale * std::exp(jet.log_scale);
      k(r, c) = jet.value * f;
      k_t(r, c) = jet.dt * f;
    }
  }
  // Psi_3(sigma P_r) = e_3(sigma P_r) + sum_c Omega(sigma P_r, P_c) alpha_c with
  // alpha = J Psi_3(sigma P), i.e. (1 - J Omega) alpha = J e_3.
  const MatX j = coupling(cfg_).cast<xcplx>();
  const MatX sys = MatX::Identity(m, m) - j * k;
  const Eigen::PartialPivLU<MatX> lu(sys);
  if (!(std::abs(lu.determinant()) > opts_.singular_threshold))
    throw SolutionSingular("residue-condition system is singular");
  s.alpha = lu.solve(j * s.e3);
  s.alpha_t = lu.solve(j * e3_t + j * k_t * s.alpha);
  return s;
}

cplx DressedField::exp_u_via_linear_system(double x, double t) const {
  if (cfg_.size() == 0) return bg_->exp_v(x, t);
  const LinearSolution s = solve_residue_conditions(x, t);
  // P_inf expansion: Psi_3 = e_3 - s k^{-4} e^{kx} sum_c e_2(sigma P_c) alpha_c + ...
  // and d_t Psi_3 ~ e^u k^{-4} e^{kx}, so the derivative in the
  // reconstruction formula is d_t.
  const xcplx d = s.e2_t.cwiseProduct(s.alpha).sum() + s.e2.cwiseProduct(s.alpha_t).sum();
  return bg_->exp_v(x, t) - scale_ * narrow(d);
}

cplx DressedField::normalization_defect(double x, double t) const {
  if (cfg_.size() == 0) return 0.0;
  const LinearSolution s = solve_residue_conditions(x, t);
  return scale_ * narrow(s.e3.cwiseProduct(s.alpha).sum());
}

}  // namespace tz::dressing
