#pragma once

#include <span>

namespace bfe::special {

double log_gamma(double x);

// Regularized lower and upper incomplete gamma functions P(a, x), Q(a, x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Regularized incomplete beta I_x(a, b) and its complement 1 - I_x(a, b).
double beta_inc(double a, double b, double x);
double beta_inc_complement(double a, double b, double x);

double normal_cdf(double z);
double normal_sf(double z);
double normal_quantile(double p);

double log1p_exp(double x);
double log_add_exp(double a, double b);
double log_sum_exp(std::span<const double> values);
// log(2 cosh x)
double log_two_cosh(double x);

}  // namespace bfe::special
