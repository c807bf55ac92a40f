#include "dlht/classical/tests.hpp"

#include <cmath>
#include <stdexcept>

#include "dlht/errors.hpp"
#include "dlht/stats/special.hpp"

namespace dlht::classical {

namespace {

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("alpha must lie in (0, 1)");
}

}  // namespace

TestResult z_test(double mean, std::size_t n, double mu0, double sigma_known, double alpha) {
    if (!(sigma_known > 0.0)) throw std::domain_error("z_test: sigma must be positive");
    if (n == 0) throw InsufficientData("z_test: empty sample");
    check_alpha(alpha);
    TestResult r;
    r.statistic = (mean - mu0) * std::sqrt(static_cast<double>(n)) / sigma_known;
    r.threshold = stats::normal_quantile(1.0 - alpha);
    r.reject = r.statistic > r.threshold;
    return r;
}

TestResult z_test(std::span<const double> sample, double mu0, double sigma_known, double alpha) {
    double sum = 0.0;
    for (double x : sample) sum += x;
    const double mean = sample.empty() ? 0.0 : sum / static_cast<double>(sample.size());
    return z_test(mean, sample.size(), mu0, sigma_known, alpha);
}

double z_test_mu1_for_power(double mu0, double sigma, std::size_t n, double alpha, double power) {
    if (!(sigma > 0.0) || n == 0) throw std::domain_error("z_test_mu1_for_power: bad sigma or n");
    check_alpha(alpha);
    return mu0 + sigma * (stats::normal_quantile(1.0 - alpha) + stats::normal_quantile(power)) /
                     std::sqrt(static_cast<double>(n));
}

TestResult t_test_one_sample(const stats::SampleSummary& s, double mu0, double alpha) {
    if (s.n < 2) throw InsufficientData("t_test_one_sample: need at least two observations");
    if (!(s.unbiased_sd > 0.0)) throw InsufficientData("t_test_one_sample: zero sample variance");
    check_alpha(alpha);
    TestResult r;
    r.statistic = (s.mean - mu0) * std::sqrt(static_cast<double>(s.n)) / s.unbiased_sd;
    r.threshold = stats::student_t_quantile(1.0 - alpha, static_cast<double>(s.n - 1));
    r.reject = r.statistic > r.threshold;
    return r;
}

TestResult t_test_one_sample(std::span<const double> sample, double mu0, double alpha) {
    return t_test_one_sample(stats::summarize(sample), mu0, alpha);
}

WelchResult welch_t_test(const stats::SampleSummary& p, const stats::SampleSummary& t, double alpha) {
    if (p.n < 2 || t.n < 2) throw InsufficientData("welch_t_test: need two observations per group");
    check_alpha(alpha);
    const double vp = p.unbiased_sd * p.unbiased_sd / static_cast<double>(p.n);
    const double vt = t.unbiased_sd * t.unbiased_sd / static_cast<double>(t.n);
    const double se2 = vp + vt;
    if (!(se2 > 0.0)) throw InsufficientData("welch_t_test: both samples have zero variance");
    WelchResult r;
    r.statistic = (t.mean - p.mean) / std::sqrt(se2);
    r.df = se2 * se2 /
           (vp * vp / static_cast<double>(p.n - 1) + vt * vt / static_cast<double>(t.n - 1));
    r.threshold = stats::student_t_quantile(1.0 - alpha, r.df);
    r.reject = r.statistic > r.threshold;
    return r;
}

WelchResult welch_t_test(std::span<const double> sample_p, std::span<const double> sample_t,
                         double alpha) {
    return welch_t_test(stats::summarize(sample_p), stats::summarize(sample_t), alpha);
}

double welch_normal_power(double delta, double sigma_p, double sigma_t, std::size_t n, double alpha) {
    if (!(sigma_p > 0.0 && sigma_t > 0.0) || n == 0)
        throw std::domain_error("welch_normal_power: bad sigma or n");
    check_alpha(alpha);
    const double se = std::sqrt((sigma_p * sigma_p + sigma_t * sigma_t) / static_cast<double>(n));
    return stats::normal_cdf(delta / se - stats::normal_quantile(1.0 - alpha));
}

double welch_mu_t_for_power(double mu_p, double sigma_p, double sigma_t, std::size_t n,
                            double alpha, double power) {
    if (!(power > 0.0 && power < 1.0)) throw std::domain_error("welch_mu_t_for_power: bad power");
    if (power <= alpha) return mu_p;
    double lo = 0.0, hi = 1.0;
    while (welch_normal_power(hi, sigma_p, sigma_t, n, alpha) < power) hi *= 2.0;
    while (hi - lo > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        (welch_normal_power(mid, sigma_p, sigma_t, n, alpha) < power ? lo : hi) = mid;
    }
    return mu_p + 0.5 * (lo + hi);
}

}  // namespace dlht::classical
