#pragma once
#include <cstddef>
#include <span>

namespace dlht::stats {

struct SampleSummary {
    std::size_t n = 0;
    double mean = 0.0;
    double mle_sd = 0.0;       // divisor n
    double unbiased_sd = 0.0;  // divisor n - 1
};

// Requires n >= 2; throws InsufficientData otherwise.
SampleSummary summarize(std::span<const double> sample);

/*
 * Upper alpha quantile as the order statistic of rank ceil((1 - alpha) B)
 * (1-based, ascending). At most floor(alpha B) values strictly exceed it.
 */
double empirical_upper_quantile(std::span<const double> values, double alpha);

// Rank used by empirical_upper_quantile for a sample of size `count`.
std::size_t upper_quantile_rank(std::size_t count, double alpha);

}  // namespace dlht::stats
