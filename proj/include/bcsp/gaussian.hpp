#pragma once

#include <vector>

namespace bcsp {

double normal_cdf(double x);
double normal_quantile(double p);

// Pr[g1 <= h, g2 <= k] for rho-correlated standard Gaussians.
double bivariate_normal_cdf(double h, double k, double rho);

double gaussian_stability2(double rho, double mu1, double mu2);
// Iterated right to left: Gamma(mu_1, Gamma(mu_2, ..., mu_r)).
double gaussian_stability(double rho, const std::vector<double>& mus);

}  // namespace bcsp
