#pragma once

#include <span>

#include "dlht/stats/summary.hpp"

namespace dlht::classical {

struct TestResult {
    double statistic = 0.0;
    double threshold = 0.0;
    bool reject = false;
};

// One-sided z-test of H0: mu = mu0 against mu > mu0 with known sigma.
TestResult z_test(std::span<const double> sample, double mu0, double sigma_known, double alpha);
TestResult z_test(double mean, std::size_t n, double mu0, double sigma_known, double alpha);

// mu0 + sigma (z_{1-alpha} + z_power) / sqrt(n)
double z_test_mu1_for_power(double mu0, double sigma, std::size_t n, double alpha, double power);

// One-sided one-sample t-test; throws InsufficientData for n < 2 or zero variance.
TestResult t_test_one_sample(std::span<const double> sample, double mu0, double alpha);
TestResult t_test_one_sample(const stats::SampleSummary& s, double mu0, double alpha);

struct WelchResult : TestResult {
    double df = 0.0;
};

// One-sided Welch test of mu_t > mu_p with Satterthwaite degrees of freedom.
WelchResult welch_t_test(std::span<const double> sample_p, std::span<const double> sample_t,
                         double alpha);
WelchResult welch_t_test(const stats::SampleSummary& p, const stats::SampleSummary& t, double alpha);

// Normal-approximation power of the one-sided Welch test, per-group size n.
double welch_normal_power(double delta, double sigma_p, double sigma_t, std::size_t n, double alpha);

// mu_t reaching `power` under welch_normal_power, by bisection to 1e-6.
double welch_mu_t_for_power(double mu_p, double sigma_p, double sigma_t, std::size_t n,
                            double alpha, double power);

}  // namespace dlht::classical
