#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "doctest.h"
#include "tzitzeica/errors.hpp"
#include "tzitzeica/theta.hpp"

using tz::InvalidPeriodMatrix;
using tz::ThetaDivisorError;
using tz::TruncationOverflow;
using tz::theta::PeriodMatrix;
using tz::theta::theta;
using tz::theta::theta_log_d2;
using tz::theta::TruncationPolicy;
using cplx = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

PeriodMatrix random_period_matrix(int g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  Eigen::MatrixXd x(g, g), a(g, g);
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) {
      x(i, j) = u(rng);
      a(i, j) = u(rng);
    }
  x = 0.5 * (x + x.transpose()).eval();
  Eigen::MatrixXd y = a * a.transpose() + 0.8 * Eigen::MatrixXd::Identity(g, g);
  Eigen::MatrixXcd b(g, g);
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) b(i, j) = cplx(x(i, j), y(i, j));
  return PeriodMatrix(b);
}

Eigen::VectorXcd random_arg(int g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  Eigen::VectorXcd z(g);
  for (int i = 0; i < g; ++i) z(i) = cplx(u(rng), 0.4 * u(rng));
  return z;
}

// Finite-difference oracle for d^2/ds dr ln theta.
cplx fd_log_d2(const Eigen::VectorXcd& z, const PeriodMatrix& b, const Eigen::VectorXcd& d1,
               const Eigen::VectorXcd& d2, double h) {
  const cplx t0 = theta(z, b);
  auto lt = [&](double s, double r) { return std::log(theta(z + s * d1 + r * d2, b) / t0); };
  if (d1 == d2) return (lt(h, 0) + lt(-h, 0)) / (h * h);
  return (lt(h, h) - lt(h, -h) - lt(-h, h) + lt(-h, -h)) / (4.0 * h * h);
}

}  // namespace

TEST_CASE("theta matches a direct lattice sum for g=1, B=i, z=0") {
  // Oracle: sum_{|n|<=10} exp(-pi n^2), tail < 1e-30.
  long double oracle = 0.0L;
  for (int n = -10; n <= 10; ++n) oracle += std::exp(-static_cast<long double>(kPi) * n * n);
  CHECK(std::abs(static_cast<double>(oracle) - 1.086434811213308) < 1e-15);

  const PeriodMatrix b(Eigen::MatrixXcd::Constant(1, 1, cplx(0.0, 1.0)));
  const cplx v = theta(Eigen::VectorXcd::Zero(1), b);
  CHECK(std::abs(v - cplx(static_cast<double>(oracle), 0.0)) < 1e-14);
}

TEST_CASE("theta period matrix validation") {
  Eigen::MatrixXcd nonsym(2, 2);
  nonsym << cplx(0, 1), cplx(0.1, 0), cplx(0.2, 0), cplx(0, 1);
  CHECK_THROWS_AS(PeriodMatrix{nonsym}, InvalidPeriodMatrix);

  Eigen::MatrixXcd indefinite(2, 2);
  indefinite << cplx(0, 1), cplx(0, 2), cplx(0, 2), cplx(0, 1);
  CHECK_THROWS_AS(PeriodMatrix{indefinite}, InvalidPeriodMatrix);

  CHECK_THROWS_AS(PeriodMatrix{Eigen::MatrixXcd::Constant(1, 1, cplx(0.3, -1.0))},
                  InvalidPeriodMatrix);
}

TEST_CASE("theta refuses to return an under-converged sum") {
  const PeriodMatrix b(Eigen::MatrixXcd::Constant(1, 1, cplx(0.0, 0.01)));
  TruncationPolicy pol;
  pol.max_radius = 3;
  CHECK_THROWS_AS(theta(Eigen::VectorXcd::Zero(1), b, pol), TruncationOverflow);
  pol.max_radius = 200;
  CHECK_NOTHROW(theta(Eigen::VectorXcd::Zero(1), b, pol));
}

TEST_CASE("theta divisor is reported") {
  const PeriodMatrix b(Eigen::MatrixXcd::Constant(1, 1, cplx(0.0, 1.0)));
  Eigen::VectorXcd z(1);
  z(0) = cplx(0.5, 0.5);  // (1 + B) / 2
  Eigen::VectorXcd d = Eigen::VectorXcd::Ones(1);
  CHECK(std::abs(theta(z, b)) < 1e-14);
  CHECK_THROWS_AS(theta_log_d2(z, b, d, d), ThetaDivisorError);
}

TEST_CASE("theta quasi-periodicity and evenness for random period matrices") {
  std::mt19937_64 rng(20240611);
  TruncationPolicy pol;
  for (int g = 1; g <= 3; ++g) {
    for (int trial = 0; trial < 8; ++trial) {
      const PeriodMatrix b = random_period_matrix(g, rng);
      const Eigen::VectorXcd z = random_arg(g, rng);
      const cplx th = theta(z, b, pol);
      CHECK(std::abs(theta(-z, b, pol) - th) <= 1e-12 * std::abs(th));
      for (int m = 0; m < g; ++m) {
        Eigen::VectorXcd shift = Eigen::VectorXcd::Zero(g);
        shift(m) = 1.0;
        CHECK(std::abs(theta(z + shift, b, pol) - th) <= 10.0 * pol.target_abs_error);

        const Eigen::VectorXcd bm = b.matrix().col(m);
        const cplx factor =
            std::exp(cplx(0, -kPi) * b.matrix()(m, m) - cplx(0, 2.0 * kPi) * z(m));
        const cplx lhs = theta(z + bm, b, pol);
        CHECK(std::abs(lhs - factor * th) <= 1e-8 * std::abs(factor * th));
      }
    }
  }
}

TEST_CASE("theta_log_d2 agrees with finite differences") {
  const PeriodMatrix b1(Eigen::MatrixXcd::Constant(1, 1, cplx(0.0, 1.0)));
  Eigen::VectorXcd z(1);
  z(0) = cplx(0.3, 0.2);
  const Eigen::VectorXcd one = Eigen::VectorXcd::Ones(1);
  const cplx analytic = theta_log_d2(z, b1, one, one);
  CHECK(std::abs(analytic - fd_log_d2(z, b1, one, one, 1e-4)) <= 1e-6);

  std::mt19937_64 rng(7);
  for (int g = 1; g <= 3; ++g) {
    const PeriodMatrix b = random_period_matrix(g, rng);
    const Eigen::VectorXcd zz = random_arg(g, rng);
    const Eigen::VectorXcd d1 = random_arg(g, rng).real().cast<cplx>();
    const Eigen::VectorXcd d2 = random_arg(g, rng).real().cast<cplx>();
    const cplx a = theta_log_d2(zz, b, d1, d2);
    CHECK(std::abs(a - fd_log_d2(zz, b, d1, d2, 1e-4)) <= 1e-6);
    CHECK(std::abs(a - theta_log_d2(zz, b, d2, d1)) <= 1e-13 * (1.0 + std::abs(a)));
    CHECK(theta_log_d2(zz, b, Eigen::VectorXcd::Zero(g), d2) == cplx(0.0, 0.0));
  }
}
