#include "tzitzeica/theta.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "tzitzeica/errors.hpp"

namespace tz::theta {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI{0.0, 1.0};

// Bound on sum_{j>=0} exp(-pi lam (a + j)^2) for a > 0.
double gaussian_tail(double lam, double a) {
  return std::exp(-kPi * lam * a * a) / (1.0 - std::exp(-2.0 * kPi * lam * a));
}

// Bound on sum_{m in Z} exp(-pi lam (m + d)^2) for |d| <= 1/2.
double gaussian_full(double lam) {
  return 1.0 + 2.0 * std::exp(-kPi * lam / 4.0) / (1.0 - std::exp(-kPi * lam));
}

}  // namespace

struct Lattice {
  // Centre of the summation box and log of the largest term magnitude.
  static void centre(const Eigen::VectorXcd& z, const PeriodMatrix& b,
                     Eigen::VectorXi& n0, Eigen::VectorXd& c, double& log_peak) {
    const Eigen::VectorXd y = z.imag();
    c = b.y_inv_ * y;
    n0.resize(c.size());
    for (Eigen::Index i = 0; i < c.size(); ++i)
      n0(i) = static_cast<int>(std::round(-c(i)));
    log_peak = kPi * c.dot(b.y_ * c);
  }
};

PeriodMatrix::PeriodMatrix(Eigen::MatrixXcd b) : b_(std::move(b)) {
  if (b_.rows() == 0 || b_.rows() != b_.cols())
    throw InvalidPeriodMatrix("period matrix must be square and non-empty");
  for (Eigen::Index i = 0; i < b_.rows(); ++i)
    for (Eigen::Index j = 0; j < i; ++j)
      if (b_(i, j) != b_(j, i))
        throw InvalidPeriodMatrix("period matrix is not symmetric");
  for (Eigen::Index i = 0; i < b_.size(); ++i)
    if (!std::isfinite(b_.data()[i].real()) || !std::isfinite(b_.data()[i].imag()))
      throw InvalidPeriodMatrix("period matrix has non-finite entries");
  y_ = b_.imag();
  Eigen::LLT<Eigen::MatrixXd> llt(y_);
  if (llt.info() != Eigen::Success)
    throw InvalidPeriodMatrix("imaginary part of the period matrix is not positive definite");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(y_, Eigen::EigenvaluesOnly);
  lambda_min_ = es.eigenvalues().minCoeff();
  if (!(lambda_min_ > 0.0))
    throw InvalidPeriodMatrix("imaginary part of the period matrix is not positive definite");
  y_inv_ = llt.solve(Eigen::MatrixXd::Identity(y_.rows(), y_.cols()));
}

void TruncationPolicy::validate() const {
  if (!(target_abs_error > 0.0))
    throw ConfigError("truncation target_abs_error must be positive");
  if (max_radius < 1) throw ConfigError("truncation max_radius must be at least 1");
  if (!(zero_threshold >= 0.0)) throw ConfigError("theta zero_threshold must be non-negative");
}

int required_radius(const Eigen::VectorXcd& z, const PeriodMatrix& b,
                    const TruncationPolicy& pol, double poly_weight) {
  pol.validate();
  if (z.size() != b.genus()) throw NumericalError("theta argument has wrong dimension");
  for (const auto& v : z)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw NumericalError("theta argument has non-finite entries");

  Eigen::VectorXi n0;
  Eigen::VectorXd c;
  double log_peak = 0.0;
  Lattice::centre(z, b, n0, c, log_peak);
  const int g = b.genus();
  const double lam = b.min_eigenvalue();
  const double full = gaussian_full(lam);
  const double c_norm = c.norm();

  for (int r = 1; r <= pol.max_radius; ++r) {
    // Every lattice point outside the box has some |n_i + c_i| >= r + 1/2.
    double bound = g * 2.0 * gaussian_tail(lam, r + 0.5) * std::pow(full, g - 1);
    if (poly_weight > 0.0) {
      const double n_max = std::sqrt(static_cast<double>(g)) * (r + 2.0) + c_norm;
      bound *= 2.0 * poly_weight * n_max * n_max;
    }
    const double log_bound = std::log(bound) + log_peak;
    if (log_bound < std::log(pol.target_abs_error)) return r;
  }
  throw TruncationOverflow("theta series needs a summation radius above max_radius=" +
                           std::to_string(pol.max_radius));
}

namespace {

template <class Visit>
void for_each_in_box(const Eigen::VectorXi& n0, int radius, Visit&& visit) {
  const auto g = n0.size();
  Eigen::VectorXi m = Eigen::VectorXi::Constant(g, -radius);
  Eigen::VectorXi n(g);
  while (true) {
    n = n0 + m;
    visit(n);
    Eigen::Index i = 0;
    for (; i < g; ++i) {
      if (m(i) < radius) {
        ++m(i);
        break;
      }
      m(i) = -radius;
    }
    if (i == g) break;
  }
}

cplx term(const Eigen::VectorXi& n, const Eigen::MatrixXcd& b, const Eigen::VectorXcd& z) {
  const Eigen::VectorXcd nc = n.cast<double>().cast<cplx>();
  const cplx quad = nc.dot(b * nc);  // dot() conjugates the left side; n is real
  const cplx lin = nc.dot(z);
  return std::exp(kI * kPi * quad + 2.0 * kPi * kI * lin);
}

}  // namespace

cplx theta(const Eigen::VectorXcd& z, const PeriodMatrix& b, const TruncationPolicy& pol) {
  const int radius = required_radius(z, b, pol);
  Eigen::VectorXi n0;
  Eigen::VectorXd c;
  double log_peak = 0.0;
  Lattice::centre(z, b, n0, c, log_peak);
  cplx sum = 0.0;
  for_each_in_box(n0, radius, [&](const Eigen::VectorXi& n) { sum += term(n, b.matrix(), z); });
  return sum;
}

ThetaJet theta_jet(const Eigen::VectorXcd& z, const PeriodMatrix& b,
                   const Eigen::VectorXcd& dir1, const Eigen::VectorXcd& dir2,
                   const TruncationPolicy& pol) {
  if (dir1.size() != b.genus() || dir2.size() != b.genus())
    throw NumericalError("theta direction vector has wrong dimension");
  const double d1n = dir1.norm();
  const double d2n = dir2.norm();
  const double weight = 4.0 * kPi * kPi * d1n * d2n + 2.0 * kPi * (d1n + d2n);
  ThetaJet jet;
  jet.radius = required_radius(z, b, pol, weight);
  Eigen::VectorXi n0;
  Eigen::VectorXd c;
  double log_peak = 0.0;
  Lattice::centre(z, b, n0, c, log_peak);
  const cplx two_pi_i = 2.0 * kPi * kI;
  jet.value = jet.d1 = jet.d2 = jet.d12 = 0.0;
  for_each_in_box(n0, jet.radius, [&](const Eigen::VectorXi& n) {
    const cplx t = term(n, b.matrix(), z);
    const Eigen::VectorXcd nc = n.cast<double>().cast<cplx>();
    const cplx a1 = two_pi_i * nc.dot(dir1);
    const cplx a2 = two_pi_i * nc.dot(dir2);
    jet.value += t;
    jet.d1 += a1 * t;
    jet.d2 += a2 * t;
    jet.d12 += a1 * a2 * t;
    jet.abs_sum += std::abs(t);
  });
  return jet;
}

cplx theta_log_d2(const Eigen::VectorXcd& z, const PeriodMatrix& b,
                  const Eigen::VectorXcd& dir1, const Eigen::VectorXcd& dir2,
                  const TruncationPolicy& pol) {
  const ThetaJet jet = theta_jet(z, b, dir1, dir2, pol);
  if (std::abs(jet.value) <= pol.zero_threshold * jet.abs_sum)
    throw ThetaDivisorError("theta vanishes at the requested argument (|theta|=" +
                            std::to_string(std::abs(jet.value)) + ")");
  const cplx inv = 1.0 / jet.value;
  return jet.d12 * inv - jet.d1 * jet.d2 * inv * inv;
}

}  // namespace tz::theta
