#include "cxg/stats.hpp"

#include <cmath>
#include <limits>

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include "cxg/error.hpp"

namespace cxg {

double student_t_two_sided_p(double t, double df) {
  if (std::isnan(t)) return 1.0;
  if (std::isinf(t)) return 0.0;
  const boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

double student_t_critical(double alpha, double df) {
  const boost::math::students_t dist(df);
  return boost::math::quantile(boost::math::complement(dist, alpha / 2.0));
}

OlsFit ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  const auto n = x.rows();
  const auto p = x.cols();
  if (y.size() != n) fail(Errc::shape, "design and response lengths differ");
  if (n <= p) fail(Errc::insufficient_data, fmt::format("{} observations for {} coefficients", n, p));
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() < p) fail(Errc::insufficient_data, "design matrix is rank deficient");

  OlsFit fit;
  fit.beta = qr.solve(y);
  fit.residuals = y - x * fit.beta;
  fit.df = static_cast<double>(n - p);
  fit.sigma2 = fit.residuals.squaredNorm() / fit.df;
  const Eigen::MatrixXd xtx_inv = (x.transpose() * x).inverse();
  fit.se.resize(p);
  fit.t.resize(p);
  fit.p.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    fit.se(j) = std::sqrt(std::max(0.0, fit.sigma2 * xtx_inv(j, j)));
    if (fit.se(j) > 0.0) {
      fit.t(j) = fit.beta(j) / fit.se(j);
    } else if (fit.beta(j) == 0.0) {
      fit.t(j) = 0.0;
    } else {
      fit.t(j) = std::copysign(std::numeric_limits<double>::infinity(), fit.beta(j));
    }
    fit.p(j) = student_t_two_sided_p(fit.t(j), fit.df);
  }
  return fit;
}

}  // namespace cxg
