#include "dlht/stats/distributions.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <stdexcept>

#include "dlht/errors.hpp"
#include "dlht/stats/special.hpp"

namespace dlht::stats {

BetaParams beta_from_moments(double mean, double variance) {
    if (!(mean > 0.0 && mean < 1.0))
        throw std::domain_error("beta_from_moments: mean must lie in (0, 1)");
    if (!(variance > 0.0))
        throw std::domain_error("beta_from_moments: variance must be positive");
    const double bound = mean * (1.0 - mean);
    if (!(variance < bound))
        throw InfeasibleError("beta_from_moments: variance must be below mean*(1-mean)");
    const double common = bound / variance - 1.0;
    return {mean * common, (1.0 - mean) * common};
}

double normal(Generator& gen, double mu, double sigma) {
    return mu + sigma * gen.normal();
}

namespace {

// Chop-down inversion from the mode; one uniform per draw.
std::int64_t binomial_from_mode(double u, std::int64_t n, double p) {
    const double q = 1.0 - p;
    const double odds = p / q;
    auto m = static_cast<std::int64_t>(std::floor((n + 1) * p));
    if (m > n) m = n;
    const double log_pm = log_gamma(n + 1.0) - log_gamma(m + 1.0) - log_gamma(n - m + 1.0) +
                          m * std::log(p) + (n - m) * std::log1p(-p);
    const double pm = std::exp(log_pm);
    // P(X <= m - 1) = I_{q}(n - m + 1, m)
    const double below = m == 0 ? 0.0 : incomplete_beta(static_cast<double>(n - m + 1),
                                                         static_cast<double>(m), q);
    if (u <= below) {
        std::int64_t k = m - 1;
        double pmf = pm * m / ((n - m + 1) * odds);
        double cdf = below;
        while (k > 0 && cdf - pmf >= u) {
            cdf -= pmf;
            pmf *= k / ((n - k + 1) * odds);
            --k;
        }
        return k;
    }
    std::int64_t k = m;
    double pmf = pm;
    double cdf = below + pm;
    while (cdf < u && k < n) {
        pmf *= odds * (n - k) / (k + 1);
        ++k;
        cdf += pmf;
    }
    return k;
}

}  // namespace

std::int64_t binomial(Generator& gen, std::int64_t n, double p) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::domain_error("binomial: p must lie in [0, 1]");
    if (n < 0) throw std::domain_error("binomial: n must be non-negative");
    const double u = gen.uniform();
    if (n == 0 || p == 0.0) return 0;
    if (p == 1.0) return n;
    const bool flip = p > 0.5;
    const double pp = flip ? 1.0 - p : p;
    std::int64_t k;
    if (n * pp < 30.0) {
        const double odds = pp / (1.0 - pp);
        double pmf = std::exp(n * std::log1p(-pp));
        double cdf = pmf;
        k = 0;
        while (cdf < u && k < n) {
            pmf *= odds * (n - k) / (k + 1);
            ++k;
            cdf += pmf;
        }
    } else {
        k = binomial_from_mode(u, n, pp);
    }
    return flip ? n - k : k;
}

namespace {

// w = a * exp(beta * logit(u1)), saturating instead of overflowing.
inline void cheng_vw(double u1, double beta, double scale, double& v, double& w) {
    v = beta * std::log(u1 / (1.0 - u1));
    if (v <= 709.0) {
        w = scale * std::exp(v);
        if (std::isinf(w)) w = DBL_MAX;
    } else {
        w = DBL_MAX;
    }
}

}  // namespace

// Cheng (1978) algorithms BB (both shapes > 1) and BC (otherwise).
double beta(Generator& gen, double a0, double b0) {
    if (!(a0 > 0.0) || !(b0 > 0.0))
        throw std::domain_error("beta: shape parameters must be positive");
    constexpr double log4 = 1.3862943611198906;
    double v, w;
    const double a_min = std::min(a0, b0);
    const double a_max = std::max(a0, b0);
    const double alpha = a_min + a_max;
    if (a_min > 1.0) {
        const double a = a_min, b = a_max;
        const double bcoef = std::sqrt((alpha - 2.0) / (2.0 * a * b - alpha));
        const double gamma = a + 1.0 / bcoef;
        for (;;) {
            const double u1 = gen.uniform();
            const double u2 = gen.uniform();
            cheng_vw(u1, bcoef, a, v, w);
            const double z = u1 * u1 * u2;
            const double r = gamma * v - log4;
            const double s = a + r - w;
            if (s + 2.609438 >= 5.0 * z) break;
            const double t = std::log(z);
            if (s > t) break;
            if (r + alpha * std::log(alpha / (b + w)) >= t) break;
        }
        return a0 != a ? b / (b + w) : w / (b + w);
    }
    const double a = a_max, b = a_min;
    const double bcoef = 1.0 / b;
    const double delta = 1.0 + a - b;
    const double k1 = delta * (0.0138889 + 0.0416667 * b) / (a * bcoef - 0.777778);
    const double k2 = 0.25 + (0.5 + 0.25 / delta) * b;
    for (;;) {
        const double u1 = gen.uniform();
        const double u2 = gen.uniform();
        double z;
        if (u1 < 0.5) {
            const double y = u1 * u2;
            z = u1 * y;
            if (0.25 * u2 + z - y >= k1) continue;
        } else {
            z = u1 * u1 * u2;
            if (z <= 0.25) {
                cheng_vw(u1, bcoef, a, v, w);
                break;
            }
            if (z >= k2) continue;
        }
        cheng_vw(u1, bcoef, a, v, w);
        if (alpha * (std::log(alpha / (b + w)) + v) - log4 >= std::log(z)) break;
    }
    return a0 == b ? b / (b + w) : w / (b + w);
}

std::vector<double> sample_normal(const RandomStream& stream, double mu, double sigma,
                                  std::size_t n) {
    if (!(sigma > 0.0)) throw std::domain_error("sample_normal: sigma must be positive");
    if (n == 0) throw std::domain_error("sample_normal: n must be at least 1");
    auto gen = stream.generator();
    std::vector<double> out(n);
    for (auto& x : out) x = mu + sigma * gen.normal();
    return out;
}

std::int64_t sample_binomial(const RandomStream& stream, std::int64_t n, double p) {
    auto gen = stream.generator();
    return binomial(gen, n, p);
}

double sample_beta(const RandomStream& stream, double a, double b) {
    auto gen = stream.generator();
    return beta(gen, a, b);
}

}  // namespace dlht::stats
