#include <cmath>
#include <complex>

#include "doctest.h"
#include "tzitzeica/background.hpp"
#include "tzitzeica/errors.hpp"

using namespace tz;
using namespace tz::background;

namespace {

BackgroundData genus_one() {
  BackgroundData d;
  d.genus = 1;
  d.c = 2.0;
  d.U = Eigen::VectorXcd::Constant(1, 0.4);
  d.V = Eigen::VectorXcd::Constant(1, 0.7);
  d.zD = Eigen::VectorXcd::Constant(1, cplx(0.1, 0.2));
  d.prym.emplace(Eigen::MatrixXcd::Constant(1, 1, cplx(0.0, 1.0)));
  return d;
}

GridSpec small_grid() { return {-1.0, 1.0, -1.0, 1.0, 7, 5}; }

}  // namespace

TEST_CASE("vacuum background") {
  const BackgroundData vac = BackgroundData::vacuum();
  CHECK(exp_v(vac, 0.3, -4.0) == cplx(1.0));
  const FieldGrid f = v_field(vac, small_grid());
  for (std::size_t n = 0; n < f.u.size(); ++n) {
    CHECK(f.u[n] == cplx(0.0));
    CHECK(f.flags[n] == NodeFlag::ok);
  }
  CHECK(sampled_real_positive(vac, small_grid(), 1e-12));
}

TEST_CASE("constant background has the constant logarithm") {
  BackgroundData d;
  d.c = std::exp(2.0);
  const FieldGrid f = v_field(d, small_grid());
  for (const auto& u : f.u) CHECK(std::abs(u - 2.0) < 1e-15);

  d.c = -1.0;
  CHECK_FALSE(sampled_real_positive(d, small_grid(), 1e-12));
}

TEST_CASE("genus-one background against a finite-difference oracle") {
  const BackgroundData d = genus_one();
  const double x = 0.5, t = -0.3, h = 1e-4;
  auto z = [&](double xx, double tt) { return d.U * xx + d.V * tt + d.zD; };
  const cplx t0 = theta::theta(z(x, t), *d.prym);
  auto lt = [&](double dx, double dt) {
    return std::log(theta::theta(z(x + dx, t + dt), *d.prym) / t0);
  };
  const cplx dxt = (lt(h, h) - lt(h, -h) - lt(-h, h) + lt(-h, -h)) / (4.0 * h * h);
  CHECK(std::abs(exp_v(d, x, t) - (d.c - 2.0 * dxt)) <= 1e-6);

  BackgroundData flat = d;
  flat.U.setZero();
  CHECK(std::abs(exp_v(flat, 1.7, -2.3) - flat.c) < 1e-15);

  // Fine enough that no phase step exceeds the branch limit.
  const FieldGrid f = v_field(d, {-1.0, 1.0, -1.0, 1.0, 41, 41});
  for (std::size_t n = 0; n < f.u.size(); ++n) {
    CHECK(f.flags[n] == NodeFlag::ok);
    CHECK(std::isfinite(std::abs(f.exp_u[n])));
  }
}

TEST_CASE("theta divisor makes the background singular") {
  BackgroundData d = genus_one();
  d.U = Eigen::VectorXcd::Constant(1, 1.0);
  d.V = Eigen::VectorXcd::Constant(1, 1.0);
  d.zD = Eigen::VectorXcd::Constant(1, cplx(0.5, 0.5));
  CHECK_THROWS_AS(exp_v(d, 0.0, 0.0), ThetaDivisorError);
  // Singular wherever x + t is an integer.
  const FieldGrid f = v_field(d, {-1.0, 1.0, -1.0, 1.0, 5, 5});
  CHECK(f.flags[f.grid.index(2, 2)] == NodeFlag::singular);
  CHECK(f.flags[f.grid.index(0, 0)] == NodeFlag::singular);
  CHECK(f.flags[f.grid.index(1, 2)] != NodeFlag::singular);
}

TEST_CASE("background data validation") {
  BackgroundData d = genus_one();
  d.V = Eigen::VectorXcd::Zero(2);
  CHECK_THROWS_AS(d.validate(), ConfigError);

  BackgroundData no_prym = genus_one();
  no_prym.prym.reset();
  CHECK_THROWS_AS(no_prym.validate(), ConfigError);

  BackgroundData vac;
  vac.U = Eigen::VectorXcd::Zero(1);
  CHECK_THROWS_AS(vac.validate(), ConfigError);
}
