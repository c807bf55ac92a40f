#pragma once

namespace dlht::stats {

// Standard normal CDF via erfc; accurate to full double precision in both tails.
double normal_cdf(double x);
double normal_pdf(double x);

// Inverse standard normal CDF, z_u = Phi^{-1}(u). Throws std::domain_error
// unless 0 < u < 1.
double normal_quantile(double u);

// Same as normal_quantile without argument checking (hot sampling path).
double normal_quantile_unchecked(double u);

double log_gamma(double x);

// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

double student_t_cdf(double t, double df);
double student_t_pdf(double t, double df);
double student_t_quantile(double u, double df);

}  // namespace dlht::stats
