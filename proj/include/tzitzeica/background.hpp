#pragma once

// Finite-gap background e^v = c - 2 d_x d_t ln theta(U x + V t + zD), with
// genus 0 reducing to the constant e^v = c.

#include <optional>

#include <Eigen/Dense>

#include "tzitzeica/field.hpp"
#include "tzitzeica/theta.hpp"

namespace tz::background {

struct BackgroundData {
  int genus = 0;
  cplx c{1.0, 0.0};
  Eigen::VectorXcd U;
  Eigen::VectorXcd V;
  Eigen::VectorXcd zD;
  std::optional<theta::PeriodMatrix> prym;
  theta::TruncationPolicy policy;

  static BackgroundData vacuum() { return {}; }
  void validate() const;  // throws ConfigError
};

cplx exp_v(const BackgroundData& data, double x, double t);

FieldGrid v_field(const BackgroundData& data, const GridSpec& grid, int threads = 1);

// The background alone, as a field source (e^u = e^v).
class BackgroundField final : public FieldSource {
 public:
  explicit BackgroundField(BackgroundData data) : data_(std::move(data)) { data_.validate(); }
  cplx exp_u(double x, double t) const override { return background::exp_v(data_, x, t); }
  cplx exp_v(double x, double t) const override { return background::exp_v(data_, x, t); }
  const BackgroundData& data() const { return data_; }

 private:
  BackgroundData data_;
};

// For data the user asserts to be real: every sampled e^v must be real and
// positive within tol (relative). This does not certify the curve data.
bool sampled_real_positive(const BackgroundData& data, const GridSpec& grid, double tol);

}  // namespace tz::background
