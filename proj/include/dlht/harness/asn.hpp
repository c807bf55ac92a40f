#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dlht/harness/config.hpp"
#include "dlht/harness/experiment.hpp"
#include "dlht/harness/results.hpp"

namespace dlht::harness {

// How the DNN test follows a change of n2_max.
enum class DnnRefit {
    Retrain,      // rerun the whole fit for the modified design
    Recalibrate,  // keep the statistic network, refit the cutoff
    Fixed,        // reuse the fitted test unchanged
};

DnnRefit dnn_refit_from_string(const std::string& name);

struct AsnOptions {
    double target_power = 0.9;
    double tolerance = 0.005;  // stop once the bracket ends are within this of the target
    int n2_max_cap = 1200;
    std::vector<std::string> methods{"DNN", "incta", "bm"};
    DnnRefit dnn = DnnRefit::Retrain;
    bool recalibrate_bm = true;  // re-solve the BM level at every candidate n2_max
};

struct AsnRow {
    std::string method;
    bool reachable = false;
    int n2_max = 0;
    double power = 0.0;
    double asn = 0.0;  // per group: n1 + mean n2
    double asn_se = 0.0;
    std::size_t reps = 0;
    int evaluations = 0;
};

/*
 * n2_max in [lo_limit, cap] where `power` first reaches the target, or -1 if
 * the cap fails. lo and hi bracket the answer (lo fails or lies below the
 * range, hi passes); the search ends when they meet or the power at both
 * ends is within the tolerance of the target.
 */
int search_n2_max(const std::function<double(int)>& power, int lo_limit, int start, const AsnOptions& options);

/*
 * Smallest n2_max whose simulated power at `alt` reaches the target, per
 * method. The search starts from the design's own n2_max, then narrows the
 * bracket by probit interpolation with bisection as the fallback. All methods
 * see the same trial draws at a given n2_max. `test` must be the fit for
 * config's design.
 */
std::vector<AsnRow> asn_for_power(const ExperimentConfig& config, const pipeline::FittedTest& test,
                                  const scenario::LawParams& alt, const AsnOptions& options,
                                  const RunOptions& run = {});

}  // namespace dlht::harness
