#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dlht/stats/distributions.hpp"
#include "dlht/stats/random.hpp"

namespace dlht::adaptive {

// Two-stage 1:1 binomial design with CEP-based reassessment of the stage-2 size.
struct DesignParams {
    int n1 = 85;
    int n2_min = 21;
    int n2_max = 340;
    double cep_target = 0.8;
    double gamma = 0.001;  // prior variance for both response rates
    double alpha = 0.05;   // one-sided
    std::size_t cep_mc_iters = 10000;
    std::uint64_t cep_seed = 0x5EED;  // prior draws for reassessment

    void validate() const;
    std::uint64_t fingerprint() const;
    std::string describe() const;
    friend bool operator==(const DesignParams&, const DesignParams&) = default;
};

struct TrialPath {
    int x_p1 = 0;
    int x_t1 = 0;
    int n2 = 0;
    int x_p2 = 0;
    int x_t2 = 0;
    friend bool operator==(const TrialPath&, const TrialPath&) = default;
};

// (x_t/n - x_p/n) / sqrt(2 p (1 - p) / n) with pooled p; 0 when p is 0 or 1.
double proportion_stat(long x_p, long x_t, long n);

// Conditional power of the final pooled test given the interim statistic m1.
// alpha enters as z_alpha = Phi^{-1}(alpha) (negative for alpha < 0.5).
double conditional_power(double m1, int n1, int n2, double pi_t, double pi_p, double alpha);

/*
 * Prior draws for CEP, stored as r = (pi_t - pi_p) / sqrt(2 pi (1 - pi)) per draw,
 * so that CP for draw i at stage-2 size n2 is Phi(A(n2) + sqrt(n2) r_i).
 */
class CepDraws {
   public:
    CepDraws(const stats::BetaParams& prior_t, const stats::BetaParams& prior_p, std::size_t iters,
             const stats::RandomStream& stream);

    double cep(double m1, int n1, int n2, double alpha) const;
    // Upper bound on max_{n2 in [lo, hi]} cep(m1, n1, n2, alpha).
    double cep_upper_bound(double m1, int n1, int lo, int hi, double alpha) const;
    std::span<const double> ratios() const { return r_; }

   private:
    std::vector<double> r_;
    double r_min_ = 0.0;
    double r_max_ = 0.0;
};

// Monte Carlo mean of conditional_power over independent Beta prior draws.
double conditional_expected_power(double m1, int n1, int n2, const stats::BetaParams& prior_t,
                                  const stats::BetaParams& prior_p, double alpha,
                                  std::size_t iters, const stats::RandomStream& stream);

// Priors centred at the observed stage-1 rates (clipped to [1/(2 n1), 1 - 1/(2 n1)])
// with variance gamma, reduced to 0.9 m (1 - m) where infeasible.
stats::BetaParams stage1_prior(int x, int n1, double gamma);

// Smallest n2 in [n2_min, n2_max] with CEP >= target, else n2_max.
int reassess_n2(int x_p1, int x_t1, const DesignParams& design, const stats::RandomStream& stream);

// Normal-approximation power of the one-sided pooled proportion test at per-group size n.
double proportion_test_power(double pi_p, double pi_t, int n, double alpha);

// Smallest pi_t > pi_p whose proportion_test_power reaches `power` (bisection, 1e-6).
// Throws InfeasibleError if no such pi_t below 1 exists.
double solve_pi_t(double pi_p, double power, int n, double alpha);

}  // namespace dlht::adaptive
