#include "dlht/adaptive/comparators.hpp"

#include <algorithm>
#include <cmath>

#include "dlht/errors.hpp"
#include "dlht/stats/special.hpp"

namespace dlht::adaptive {

double incta_statistic(const TrialPath& path, int n1) {
    const double z1 = proportion_stat(path.x_p1, path.x_t1, n1);
    const double z2 = proportion_stat(path.x_p2, path.x_t2, path.n2);
    return (z1 + z2) / std::sqrt(2.0);
}

bool incta_decision(const TrialPath& path, int n1, double alpha) {
    return incta_statistic(path, n1) > stats::normal_quantile(1.0 - alpha);
}

double bm_statistic(const TrialPath& path, int n1) {
    return proportion_stat(path.x_p1 + path.x_p2, path.x_t1 + path.x_t2, n1 + path.n2);
}

bool bm_decision(const TrialPath& path, int n1, double adjusted_alpha) {
    return bm_statistic(path, n1) > stats::normal_quantile(1.0 - adjusted_alpha);
}

BmCalibration calibrate_bm(const DesignParams& design, std::span<const double> pi_grid,
                           double target_alpha, std::size_t replicates,
                           const stats::RandomStream& stream) {
    if (pi_grid.empty()) throw CalibrationError("calibrate_bm: empty rate grid");
    if (replicates == 0) throw CalibrationError("calibrate_bm: no replicates");
    const auto table = reassessment_table(design);
    std::vector<std::vector<double>> stats_by_rate;
    for (std::size_t g = 0; g < pi_grid.size(); ++g) {
        const auto paths = simulate_trials(pi_grid[g], pi_grid[g], *table, replicates, stream.child(g));
        std::vector<double> s(paths.size());
        for (std::size_t i = 0; i < paths.size(); ++i) s[i] = bm_statistic(paths[i], design.n1);
        std::sort(s.begin(), s.end());
        stats_by_rate.push_back(std::move(s));
    }
    auto max_type1 = [&](double level) {
        const double z = stats::normal_quantile(1.0 - level);
        double worst = 0.0;
        for (const auto& s : stats_by_rate) {
            const auto above = s.end() - std::upper_bound(s.begin(), s.end(), z);
            worst = std::max(worst, static_cast<double>(above) / static_cast<double>(s.size()));
        }
        return worst;
    };
    double lo = 1e-6, hi = 0.5;
    if (max_type1(lo) > target_alpha || max_type1(hi) < target_alpha)
        throw CalibrationError("calibrate_bm: level range does not bracket the target");
    // Invariant: max_type1(lo) <= target < max_type1(hi) or hi is within tolerance.
    for (int it = 0; it < 100 && hi - lo > 1e-10; ++it) {
        const double mid = 0.5 * (lo + hi);
        (max_type1(mid) <= target_alpha ? lo : hi) = mid;
    }
    const double achieved = max_type1(lo);
    if (target_alpha - achieved > 0.002)
        throw CalibrationError("calibrate_bm: achieved type I is not within 0.002 of the target");
    return {lo, achieved};
}

}  // namespace dlht::adaptive
