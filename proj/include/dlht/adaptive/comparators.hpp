#pragma once

#include <cstddef>
#include <span>

#include "dlht/adaptive/reassessment.hpp"

namespace dlht::adaptive {

inline constexpr double kBmDefaultLevel = 0.033;

// Inverse normal combination with equal weights: (Z1 + Z2) / sqrt(2).
double incta_statistic(const TrialPath& path, int n1);
bool incta_decision(const TrialPath& path, int n1, double alpha);

// Pooled two-stage proportion statistic.
double bm_statistic(const TrialPath& path, int n1);
bool bm_decision(const TrialPath& path, int n1, double adjusted_alpha = kBmDefaultLevel);

struct BmCalibration {
    double adjusted_alpha = 0.0;
    double max_type1 = 0.0;  // at adjusted_alpha, over the grid
};

/*
 * Bisection on the nominal level of bm_decision so that the largest simulated
 * type I error over `pi_grid` is at most target_alpha and within 0.002 of it.
 * Throws CalibrationError if [1e-6, 0.5] does not bracket the target.
 */
BmCalibration calibrate_bm(const DesignParams& design, std::span<const double> pi_grid,
                           double target_alpha, std::size_t replicates,
                           const stats::RandomStream& stream);

}  // namespace dlht::adaptive
