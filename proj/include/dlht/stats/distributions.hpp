#pragma once
#include <cstdint>
#include <vector>

#include "dlht/stats/random.hpp"

namespace dlht::stats {

struct BetaParams {
    double a = 1.0;
    double b = 1.0;

    double mean() const { return a / (a + b); }
    double variance() const { return a * b / ((a + b) * (a + b) * (a + b + 1.0)); }
};

// Moment parameterization of a Beta law. Throws InfeasibleError unless
// 0 < variance < mean (1 - mean).
BetaParams beta_from_moments(double mean, double variance);

// Generator-level samplers, used in inner Monte Carlo loops.
double normal(Generator& gen, double mu, double sigma);
std::int64_t binomial(Generator& gen, std::int64_t n, double p);
double beta(Generator& gen, double a, double b);

// Stream-level samplers: pure functions of the stream descriptor.
std::vector<double> sample_normal(const RandomStream& stream, double mu, double sigma,
                                  std::size_t n);
std::int64_t sample_binomial(const RandomStream& stream, std::int64_t n, double p);
double sample_beta(const RandomStream& stream, double a, double b);

}  // namespace dlht::stats
