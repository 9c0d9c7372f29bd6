#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <random>

#include "doctest.h"
#include "tzitzeica/asymptotics.hpp"
#include "tzitzeica/background.hpp"
#include "tzitzeica/errors.hpp"

using namespace tz;
using namespace tz::asymptotics;
using dressing::DressedField;
using dressing::SolitonConfig;

namespace {

const cplx kEps = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);

std::shared_ptr<const curve::VacuumBackground> vacuum() {
  return std::make_shared<const curve::VacuumBackground>();
}

// v from the k-coordinates of sigma(Lambda) and sigma(Lambda*).
double v_oracle(cplx s, cplx s_star) {
  return -((s_star.real() - s.real()) / ((1.0 / s_star).real() - (1.0 / s).real()));
}

}  // namespace

TEST_CASE("light-cone velocity of canonically placed solitons") {
  const curve::VacuumBackground bg;
  for (double lam : {1.0, 2.2, 0.3, 8.0}) {
    const auto cfg = SolitonConfig::canonical({lam}, {1.0});
    const double k0 = std::cbrt(lam);
    const double v = velocity_lightcone(cfg, bg, 0);
    CHECK(v == doctest::Approx(v_oracle(-k0, kEps * k0)).epsilon(1e-13));
    CHECK(v == doctest::Approx(-k0 * k0).epsilon(1e-13));
    CHECK(trajectory_slope(cfg, bg, 0) == doctest::Approx(1.0 / v).epsilon(1e-13));
  }
  CHECK(velocity_lightcone(SolitonConfig::canonical({1.0}, {1.0}), bg, 0) ==
        doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("complex lambda gives a real velocity") {
  const curve::VacuumBackground bg;
  const auto cfg = SolitonConfig::canonical({cplx(1.0, 0.7)}, {1.0});
  const auto& pr = cfg.pairs()[0];
  const double v = velocity_lightcone(cfg, bg, 0);
  CHECK(std::isfinite(v));
  CHECK(v == doctest::Approx(v_oracle(-pr.lambda_pt.k(), -pr.star_pt.k())).epsilon(1e-12));
}

TEST_CASE("degenerate trajectory") {
  // sigma(Lambda) = e^{i pi/6} and sigma(Lambda*) = its conjugate: both
  // kappa differences vanish.
  const cplx a = std::polar(1.0, std::numbers::pi / 6.0);
  const auto cfg = SolitonConfig::explicit_points({{-a, -std::conj(a)}}, {1.0});
  const curve::VacuumBackground bg;
  const auto g = growth_exponents(cfg, bg, 0);
  CHECK(std::abs(g.d_kappa_inf) <= 1e-15);
  CHECK(std::abs(g.d_kappa_0) <= 1e-15);
  CHECK_THROWS_AS(velocity_lightcone(cfg, bg, 0), DegenerateTrajectory);
  CHECK_THROWS_AS(trajectory_slope(cfg, bg, 0), DegenerateTrajectory);
  CHECK_THROWS_AS(growth_exponents(cfg, bg, 1), ConfigError);
}

TEST_CASE("lab-frame velocity") {
  CHECK(velocity_lab(0.0, 0.0) == 1.0);
  CHECK(velocity_lab(-1.0, 0.0) == 0.0);
  CHECK_THROWS_AS(velocity_lab(1.0, 0.0), DegenerateTrajectory);
  CHECK_THROWS_AS(velocity_lab(std::exp(-1.0), 0.5), DegenerateTrajectory);

  for (int n = 0; n <= 1000; ++n) {
    const double v = -10.0 + n * (10.0 - 0.01) / 1000;
    CHECK(std::abs(velocity_lab(v, 0.0)) < 1.0);
  }

  // Boosts compose: rapidity a then b is rapidity a + b.
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> uv(-5.0, -0.05), ue(-1.0, 1.0);
  for (int n = 0; n < 100; ++n) {
    const double v = uv(rng), a = ue(rng), b = ue(rng);
    const double direct = velocity_lab(v, a + b);
    const double composed = velocity_lab(v * std::exp(2.0 * a), b);
    CHECK(std::abs(direct - composed) <= 1e-12 * std::max(1.0, std::abs(direct)));
  }
}

TEST_CASE("kinematics table") {
  const curve::VacuumBackground bg;
  const auto cfg = SolitonConfig::canonical({1.0, 2.2}, {1.0, 1.0});
  const auto k = kinematics(cfg, bg, {0.0, 0.3});
  REQUIRE(k.size() == 2);
  CHECK(k[1].lambda == cplx(2.2));
  REQUIRE(k[1].lab.size() == 2);
  CHECK(k[1].lab[1].velocity == doctest::Approx(velocity_lab(k[1].v, 0.3)));
  CHECK(k[0].growth.d_kappa_inf == doctest::Approx(0.5));
  CHECK(k[0].growth.d_kappa_0 == doctest::Approx(0.5));
}

TEST_CASE("symmetric sample times") {
  const auto t = symmetric_times(15.0, 25.0, 21);
  REQUIRE(t.size() == 42);
  CHECK(t.front() == -25.0);
  CHECK(t[20] == -15.0);
  CHECK(t[21] == 15.0);
  CHECK(t.back() == 25.0);
  CHECK_THROWS_AS(symmetric_times(5.0, 1.0, 4), ConfigError);
}

TEST_CASE("tracked one-soliton slope matches the formula") {
  const auto cfg = SolitonConfig::canonical({1.0}, {1.0});
  const DressedField f(vacuum(), cfg);
  const double slope = trajectory_slope(cfg, f.provider(), 0);
  TrackOptions o;
  o.split_intercepts = false;
  const auto tr = track_trajectory(f, symmetric_times(15.0, 25.0, 21), {-1.6, slope, 3.0, 301}, o);
  CHECK(tr.points.size() >= 40);
  CHECK(std::abs(tr.slope - slope) <= 0.02 * std::abs(slope));
}

TEST_CASE("tracking two separated solitons") {
  const auto cfg = SolitonConfig::canonical({1.0, 2.2}, {1.0, 1.0});
  const DressedField f(vacuum(), cfg);
  const auto times = symmetric_times(15.0, 25.0, 21);
  const double centers[2] = {-3.0, -3.4};
  for (int j = 0; j < 2; ++j) {
    const double slope = trajectory_slope(cfg, f.provider(), j);
    const auto tr = track_trajectory(f, times, {centers[j], slope, 3.0, 301});
    CHECK(std::abs(tr.slope - slope) <= 0.02 * std::abs(slope));
    // Weighting the kappa_0 term by 2 would double the slope.
    CHECK(std::abs(tr.slope - 2.0 * slope) >= 0.3 * std::abs(slope));
  }
}

TEST_CASE("tracking failures") {
  const background::BackgroundField flat(background::BackgroundData::vacuum());
  CHECK_THROWS_AS(track_trajectory(flat, symmetric_times(15.0, 25.0, 5), {}), TrackingFailed);

  // A window wide enough to hold both solitons sees two peaks.
  const DressedField two(vacuum(), SolitonConfig::canonical({1.0, 2.2}, {1.0, 1.0}));
  TrackOptions strict;
  strict.ambiguity = 0.05;
  CHECK_THROWS_AS(track_trajectory(two, {-20.0}, {0.0, 0.0, 40.0, 1601}, strict), TrackingFailed);
  CHECK_THROWS_AS(track_trajectory(two, {-20.0}, {0.0, 0.0, 1.0, 3}), ConfigError);
}
