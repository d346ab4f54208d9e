#pragma once

#include <cstddef>

#include <Eigen/Dense>

namespace cxg {

struct OlsFit {
  Eigen::VectorXd beta;
  Eigen::VectorXd se;
  Eigen::VectorXd t;
  Eigen::VectorXd p;  // two-sided
  Eigen::VectorXd residuals;
  double sigma2 = 0.0;
  double df = 0.0;
};

// Ordinary least squares via column-pivoted QR. Requires full column rank
// and more rows than columns (Errc::insufficient_data otherwise). A zero
// residual variance yields se = 0 and t = +-inf (or 0 for a zero estimate).
OlsFit ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

double student_t_two_sided_p(double t, double df);
double student_t_critical(double alpha, double df);  // two-sided

}  // namespace cxg
