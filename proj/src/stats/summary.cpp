#include "dlht/stats/summary.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "dlht/errors.hpp"

namespace dlht::stats {

SampleSummary summarize(std::span<const double> sample) {
    const std::size_t n = sample.size();
    if (n < 2) throw InsufficientData("summarize: need at least two observations");
    double sum = 0.0;
    for (double x : sample) sum += x;
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (double x : sample) {
        const double d = x - mean;
        ss += d * d;
    }
    return {n, mean, std::sqrt(ss / static_cast<double>(n)),
            std::sqrt(ss / static_cast<double>(n - 1))};
}

std::size_t upper_quantile_rank(std::size_t count, double alpha) {
    // ceil((1 - alpha) B) == B - floor(alpha B); the small slack keeps exact
    // products such as 0.05 * 100 from rounding down.
    const double scaled = alpha * static_cast<double>(count);
    const auto exceed = static_cast<std::size_t>(std::floor(scaled * (1.0 + 1e-12)));
    return std::max<std::size_t>(1, count - std::min(exceed, count));
}

double empirical_upper_quantile(std::span<const double> values, double alpha) {
    if (values.empty()) throw std::domain_error("empirical_upper_quantile: empty input");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("empirical_upper_quantile: alpha must lie in (0, 1)");
    std::vector<double> work(values.begin(), values.end());
    const std::size_t rank = upper_quantile_rank(work.size(), alpha);
    auto nth = work.begin() + static_cast<std::ptrdiff_t>(rank - 1);
    std::nth_element(work.begin(), nth, work.end());
    return *nth;
}

}  // namespace dlht::stats
