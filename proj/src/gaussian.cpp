#include "bcsp/gaussian.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <numbers>

#include "bcsp/common.hpp"

namespace bcsp {

double normal_cdf(double x) { return 0.5 * boost::math::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile needs p in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double bivariate_normal_cdf(double h, double k, double rho) {
  if (!(rho >= -1.0 && rho <= 1.0)) throw DomainError("correlation must lie in [-1, 1]");
  double base = normal_cdf(h) * normal_cdf(k);
  if (rho == 0.0) return base;
  double upper = std::asin(rho);
  auto f = [&](double t) {
    double c = std::cos(t);
    if (c <= 0.0) return 0.0;
    return std::exp(-(h * h + k * k - 2.0 * h * k * std::sin(t)) / (2.0 * c * c));
  };
  double err = 0.0;
  double integral = boost::math::quadrature::gauss_kronrod<double, 21>::integrate(f, 0.0, upper, 20, 1e-12, &err);
  double v = base + integral / (2.0 * std::numbers::pi);
  return std::clamp(v, 0.0, 1.0);
}

double gaussian_stability2(double rho, double mu1, double mu2) {
  if (!(rho >= 0.0 && rho < 1.0)) throw DomainError("rho must lie in [0, 1)");
  for (double m : {mu1, mu2})
    if (!(m >= 0.0 && m <= 1.0)) throw DomainError("mu must lie in [0, 1]");
  if (mu1 == 0.0 || mu2 == 0.0) return 0.0;
  if (mu1 == 1.0) return mu2;
  if (mu2 == 1.0) return mu1;
  return bivariate_normal_cdf(normal_quantile(mu1), normal_quantile(mu2), rho);
}

double gaussian_stability(double rho, const std::vector<double>& mus) {
  if (mus.empty()) throw DomainError("gaussian stability needs at least one mu");
  if (!(rho >= 0.0 && rho < 1.0)) throw DomainError("rho must lie in [0, 1)");
  double g = mus.back();
  if (!(g >= 0.0 && g <= 1.0)) throw DomainError("mu must lie in [0, 1]");
  for (std::size_t i = mus.size() - 1; i-- > 0;) g = gaussian_stability2(rho, mus[i], g);
  return g;
}

}  // namespace bcsp
