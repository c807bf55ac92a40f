#include "dlht/adaptive/ssr.hpp"

#include <algorithm>
#include <cstring>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "dlht/errors.hpp"
#include "dlht/stats/special.hpp"

namespace dlht::adaptive {

void DesignParams::validate() const {
    if (n1 < 1) throw std::invalid_argument("design: n1 must be at least 1");
    if (n2_min < 1 || n2_max < n2_min)
        throw std::invalid_argument("design: need 1 <= n2_min <= n2_max");
    if (!(cep_target > 0.0 && cep_target < 1.0))
        throw std::invalid_argument("design: cep_target must lie in (0, 1)");
    if (!(gamma > 0.0)) throw std::invalid_argument("design: gamma must be positive");
    if (!(alpha > 0.0 && alpha < 0.5)) throw std::invalid_argument("design: alpha must lie in (0, 0.5)");
    if (cep_mc_iters < 1) throw std::invalid_argument("design: cep_mc_iters must be at least 1");
}

std::uint64_t DesignParams::fingerprint() const {
    auto mix = [](std::uint64_t h, std::uint64_t v) { return stats::splitmix64(h ^ (v + 0x9E3779B97F4A7C15ULL + (h << 6))); };
    auto bits = [](double d) {
        std::uint64_t u;
        static_assert(sizeof u == sizeof d);
        std::memcpy(&u, &d, sizeof u);
        return u;
    };
    std::uint64_t h = 0xD1B54A32D192ED03ULL;
    h = mix(h, static_cast<std::uint64_t>(n1));
    h = mix(h, static_cast<std::uint64_t>(n2_min));
    h = mix(h, static_cast<std::uint64_t>(n2_max));
    h = mix(h, bits(cep_target));
    h = mix(h, bits(gamma));
    h = mix(h, bits(alpha));
    h = mix(h, cep_mc_iters);
    h = mix(h, cep_seed);
    return h;
}

std::string DesignParams::describe() const {
    std::ostringstream os;
    os << "n1=" << n1 << " n2=[" << n2_min << "," << n2_max << "] cep_target=" << cep_target
       << " gamma=" << gamma << " alpha=" << alpha << " iters=" << cep_mc_iters;
    return os.str();
}

double proportion_stat(long x_p, long x_t, long n) {
    if (n < 1 || x_p < 0 || x_t < 0 || x_p > n || x_t > n)
        throw std::domain_error("proportion_stat: counts must lie in [0, n]");
    const double nn = static_cast<double>(n);
    const double pooled = static_cast<double>(x_p + x_t) / (2.0 * nn);
    if (pooled <= 0.0 || pooled >= 1.0) return 0.0;
    return (static_cast<double>(x_t - x_p) / nn) / std::sqrt(2.0 * pooled * (1.0 - pooled) / nn);
}

double conditional_power(double m1, int n1, int n2, double pi_t, double pi_p, double alpha) {
    if (n2 < 1 || n1 < 1) throw std::domain_error("conditional_power: sizes must be positive");
    const double pi = 0.5 * (pi_t + pi_p);
    if (!(pi > 0.0 && pi < 1.0)) throw std::domain_error("conditional_power: mean rate must lie in (0, 1)");
    const double z = stats::normal_quantile(alpha);
    const double s1 = std::sqrt(static_cast<double>(n1));
    const double s2 = std::sqrt(static_cast<double>(n2));
    const double arg = (z * std::sqrt(static_cast<double>(n1 + n2)) + m1 * s1) / s2 +
                       (pi_t - pi_p) * s2 / std::sqrt(2.0 * pi * (1.0 - pi));
    return stats::normal_cdf(arg);
}

namespace {

constexpr double kRateFloor = 1e-12;

double common_term(double m1, int n1, int n2, double z_alpha) {
    return (z_alpha * std::sqrt(static_cast<double>(n1 + n2)) + m1 * std::sqrt(static_cast<double>(n1))) /
           std::sqrt(static_cast<double>(n2));
}

}  // namespace

CepDraws::CepDraws(const stats::BetaParams& prior_t, const stats::BetaParams& prior_p,
                   std::size_t iters, const stats::RandomStream& stream) {
    if (iters < 1) throw std::invalid_argument("CEP: iters must be at least 1");
    auto gen = stream.generator();
    r_.resize(iters);
    for (auto& r : r_) {
        const double pt = std::clamp(stats::beta(gen, prior_t.a, prior_t.b), kRateFloor, 1.0 - kRateFloor);
        const double pp = std::clamp(stats::beta(gen, prior_p.a, prior_p.b), kRateFloor, 1.0 - kRateFloor);
        const double pi = 0.5 * (pt + pp);
        r = (pt - pp) / std::sqrt(2.0 * pi * (1.0 - pi));
    }
    const auto [lo, hi] = std::minmax_element(r_.begin(), r_.end());
    r_min_ = *lo;
    r_max_ = *hi;
}

double CepDraws::cep(double m1, int n1, int n2, double alpha) const {
    if (n2 < 1) throw std::domain_error("CEP: n2 must be positive");
    const double a = common_term(m1, n1, n2, stats::normal_quantile(alpha));
    const double s = std::sqrt(static_cast<double>(n2));
    double total = 0.0;
    for (double r : r_) total += stats::normal_cdf(a + s * r);
    return total / static_cast<double>(r_.size());
}

double CepDraws::cep_upper_bound(double m1, int n1, int lo, int hi, double alpha) const {
    const double z = stats::normal_quantile(alpha);
    double a_max = -INFINITY;
    for (int n2 = lo; n2 <= hi; ++n2) a_max = std::max(a_max, common_term(m1, n1, n2, z));
    const double s_lo = std::sqrt(static_cast<double>(lo)), s_hi = std::sqrt(static_cast<double>(hi));
    double total = 0.0;
    for (double r : r_) total += stats::normal_cdf(a_max + (r > 0.0 ? s_hi : s_lo) * r);
    return total / static_cast<double>(r_.size());
}

double conditional_expected_power(double m1, int n1, int n2, const stats::BetaParams& prior_t,
                                  const stats::BetaParams& prior_p, double alpha,
                                  std::size_t iters, const stats::RandomStream& stream) {
    return CepDraws(prior_t, prior_p, iters, stream).cep(m1, n1, n2, alpha);
}

stats::BetaParams stage1_prior(int x, int n1, double gamma) {
    const double floor = 1.0 / (2.0 * n1);
    const double mean = std::clamp(static_cast<double>(x) / n1, floor, 1.0 - floor);
    const double bound = mean * (1.0 - mean);
    return stats::beta_from_moments(mean, gamma < bound ? gamma : 0.9 * bound);
}

int reassess_n2(int x_p1, int x_t1, const DesignParams& design, const stats::RandomStream& stream) {
    const int n1 = design.n1;
    if (x_p1 < 0 || x_t1 < 0 || x_p1 > n1 || x_t1 > n1)
        throw std::domain_error("reassess_n2: stage-1 counts out of range");
    const double m1 = proportion_stat(x_p1, x_t1, n1);
    const CepDraws draws(stage1_prior(x_t1, n1, design.gamma), stage1_prior(x_p1, n1, design.gamma),
                         design.cep_mc_iters, stream);
    const double target = design.cep_target;
    const int lo = design.n2_min, hi = design.n2_max;
    auto cep = [&](int n2) { return draws.cep(m1, n1, n2, design.alpha); };
    const double at_lo = cep(lo);
    if (at_lo >= target) return lo;
    if (lo == hi) return hi;
    const double at_hi = cep(hi);
    if (at_hi >= target) {
        // cep(a) < target <= cep(b)
        int a = lo, b = hi;
        while (b - a > 1) {
            const int mid = a + (b - a) / 2;
            (cep(mid) >= target ? b : a) = mid;
        }
        return b;
    }
    if (at_lo <= at_hi) return hi;
    // Decreasing between the endpoints: the crossing, if any, is interior.
    if (draws.cep_upper_bound(m1, n1, lo, hi, design.alpha) < target) return hi;
    for (int n2 = lo + 1; n2 < hi; ++n2)
        if (cep(n2) >= target) return n2;
    return hi;
}

double proportion_test_power(double pi_p, double pi_t, int n, double alpha) {
    const double pi = 0.5 * (pi_p + pi_t);
    if (!(pi > 0.0 && pi < 1.0) || n < 1) throw std::domain_error("proportion_test_power: bad arguments");
    const double sd = std::sqrt(2.0 * pi * (1.0 - pi) / n);
    return stats::normal_cdf((pi_t - pi_p) / sd - stats::normal_quantile(1.0 - alpha));
}

double solve_pi_t(double pi_p, double power, int n, double alpha) {
    if (!(pi_p > 0.0 && pi_p < 1.0)) throw std::domain_error("solve_pi_t: pi_p must lie in (0, 1)");
    if (!(power > 0.0 && power < 1.0)) throw std::domain_error("solve_pi_t: power must lie in (0, 1)");
    if (power <= alpha) return pi_p;
    double lo = pi_p, hi = 1.0 - 1e-12;
    if (proportion_test_power(pi_p, hi, n, alpha) < power)
        throw InfeasibleError("solve_pi_t: target power not reachable below pi_t = 1");
    while (hi - lo > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        (proportion_test_power(pi_p, mid, n, alpha) < power ? lo : hi) = mid;
    }
    return hi;
}

}  // namespace dlht::adaptive
