#pragma once

namespace breath {

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

// Student's t cumulative distribution function.
double t_cdf(double t, double df);

// Inverse of t_cdf for 0.5 < p < 1 and df >= 1, by bisection; absolute
// error below 1e-9. Throws Errc::domain_error outside that range.
double t_quantile(double p, double df);

}  // namespace breath
