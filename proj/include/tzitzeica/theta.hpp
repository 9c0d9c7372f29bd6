#pragma once

// Multi-dimensional theta series
//
//   theta(z | B) = sum_{n in Z^g} exp(i pi n^T B n + 2 pi i n^T z)
//
// evaluated by direct lattice summation over a box centred on the
// dominant term. The box radius is chosen from a Gaussian tail bound so
// the neglected terms stay below a requested absolute error; when the
// bound asks for more than the allowed radius the evaluation fails
// instead of returning an under-converged value.

#include <complex>
#include <Eigen/Dense>

namespace tz::theta {

using cplx = std::complex<double>;

class PeriodMatrix {
 public:
  // Throws InvalidPeriodMatrix if B is not square, not symmetric, or if
  // Im(B) is not positive definite.
  explicit PeriodMatrix(Eigen::MatrixXcd b);

  int genus() const { return static_cast<int>(b_.rows()); }
  const Eigen::MatrixXcd& matrix() const { return b_; }
  const Eigen::MatrixXd& imag_part() const { return y_; }
  // Smallest eigenvalue of Im(B).
  double min_eigenvalue() const { return lambda_min_; }

 private:
  Eigen::MatrixXcd b_;
  Eigen::MatrixXd y_;
  Eigen::MatrixXd y_inv_;
  double lambda_min_;

  friend struct Lattice;
};

struct TruncationPolicy {
  double target_abs_error = 1e-14;
  int max_radius = 40;
  // |theta| below zero_threshold * sum|terms| is treated as a zero.
  double zero_threshold = 1e-10;

  void validate() const;
};

// Values needed by the quotient rule for the mixed log-derivative.
struct ThetaJet {
  cplx value;
  cplx d1;    // directional derivative along dir1
  cplx d2;    // directional derivative along dir2
  cplx d12;   // mixed second derivative
  double abs_sum = 0.0;  // sum of |terms|, used as the local scale
  int radius = 0;
};

cplx theta(const Eigen::VectorXcd& z, const PeriodMatrix& b,
           const TruncationPolicy& pol = {});

ThetaJet theta_jet(const Eigen::VectorXcd& z, const PeriodMatrix& b,
                   const Eigen::VectorXcd& dir1, const Eigen::VectorXcd& dir2,
                   const TruncationPolicy& pol = {});

// d^2/ds dr ln theta(z + s dir1 + r dir2) at s = r = 0, from term-wise
// differentiated sums. Throws ThetaDivisorError near zeros of theta.
cplx theta_log_d2(const Eigen::VectorXcd& z, const PeriodMatrix& b,
                  const Eigen::VectorXcd& dir1, const Eigen::VectorXcd& dir2,
                  const TruncationPolicy& pol = {});

// Smallest box radius whose tail estimate meets pol.target_abs_error.
// poly_weight > 0 accounts for the |2 pi n.d|^2 factor of the derivative
// series. Throws TruncationOverflow past pol.max_radius.
int required_radius(const Eigen::VectorXcd& z, const PeriodMatrix& b,
                    const TruncationPolicy& pol, double poly_weight = 0.0);

}  // namespace tz::theta
