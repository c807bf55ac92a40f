#include "dlht/harness/asn.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

#include "dlht/adaptive/comparators.hpp"
#include "dlht/errors.hpp"
#include "dlht/scenario/generators.hpp"
#include "dlht/stats/special.hpp"

namespace dlht::harness {

namespace {

struct Evaluation {
    std::vector<scenario::DataSummary> data;
    double asn = 0.0;
    double asn_se = 0.0;
    std::map<std::string, double> power;
};

class AsnSearch {
   public:
    AsnSearch(const ExperimentConfig& config, const pipeline::FittedTest& test, const scenario::LawParams& alt,
              const AsnOptions& options, const RunOptions& run)
        : config_(config), test_(test), alt_(alt), options_(options), run_(run),
          stream_(stage_stream(config, Stage::Asn)) {
        for (const auto& p : config.points)
            if (p.hypothesis == Hypothesis::Null) null_grid_.push_back(p.law.rate_p);
        if (null_grid_.empty()) null_grid_ = {0.17, 0.22, 0.27, 0.32, 0.37};
    }

    double power(const std::string& method, int n2_max) {
        auto& e = evaluation(n2_max);
        if (auto it = e.power.find(method); it != e.power.end()) return it->second;
        auto design = config_.scenario.design;
        design.n2_max = n2_max;
        const auto sub = stream_.child(static_cast<std::uint64_t>(n2_max));
        std::size_t hits = 0;
        if (method == "DNN") {
            const auto t = dnn_test(n2_max, sub);
            for (const auto& d : pipeline::decide_batch(t, e.data)) hits += d.reject;
        } else if (method == "incta") {
            for (const auto& d : e.data) hits += adaptive::incta_decision(d.path, design.n1, config_.scenario.alpha);
        } else if (method == "bm") {
            double level = config_.bm_level;
            if (options_.recalibrate_bm)
                level = adaptive::calibrate_bm(design, null_grid_, config_.scenario.alpha, config_.validation_reps,
                                               sub.child(2))
                            .adjusted_alpha;
            for (const auto& d : e.data) hits += adaptive::bm_decision(d.path, design.n1, level);
        } else {
            throw UsageError("asn: unknown method '" + method + "'");
        }
        const double p = static_cast<double>(hits) / static_cast<double>(e.data.size());
        log_progress(run_, "[asn] " + method + " n2_max=" + std::to_string(n2_max) + " power=" + std::to_string(p));
        return e.power[method] = p;
    }

    const Evaluation& at(int n2_max) { return evaluation(n2_max); }

   private:
    pipeline::FittedTest dnn_test(int n2_max, const stats::RandomStream& sub) const {
        if (n2_max == config_.scenario.design.n2_max || options_.dnn == DnnRefit::Fixed) {
            pipeline::FittedTest t = test_;
            t.scenario.design.n2_max = n2_max;
            return t;
        }
        if (options_.dnn == DnnRefit::Recalibrate) {
            pipeline::FittedTest t = test_;
            t.scenario.design.n2_max = n2_max;
            log_progress(run_, "[asn] recalibrating DNN cutoff at n2_max=" + std::to_string(n2_max));
            pipeline::recalibrate(t, config_.fit, sub.child(1));
            return t;
        }
        ExperimentConfig c = config_;
        c.name = config_.name + "-n2max" + std::to_string(n2_max);
        c.scenario.design.n2_max = n2_max;
        log_progress(run_, "[asn] retraining DNN at n2_max=" + std::to_string(n2_max));
        return train_test(c, run_);
    }

    Evaluation& evaluation(int n2_max) {
        if (auto it = cache_.find(n2_max); it != cache_.end()) return it->second;
        auto spec = config_.scenario;
        spec.design.n2_max = n2_max;
        spec.design.validate();
        Evaluation e;
        e.data = scenario::simulate_many(spec, alt_, config_.validation_reps,
                                         stream_.child(static_cast<std::uint64_t>(n2_max)).child(0));
        double sum = 0.0, sq = 0.0;
        for (const auto& d : e.data) {
            const double s = spec.design.n1 + d.path.n2;
            sum += s;
            sq += s * s;
        }
        const double n = static_cast<double>(e.data.size());
        e.asn = sum / n;
        e.asn_se = std::sqrt(std::max(0.0, sq / n - e.asn * e.asn) / n);
        return cache_.emplace(n2_max, std::move(e)).first->second;
    }

    const ExperimentConfig& config_;
    const pipeline::FittedTest& test_;
    scenario::LawParams alt_;
    AsnOptions options_;
    RunOptions run_;
    stats::RandomStream stream_;
    std::vector<double> null_grid_;
    std::map<int, Evaluation> cache_;
};

}  // namespace

int search_n2_max(const std::function<double(int)>& pw, int lo_limit, int start, const AsnOptions& o) {
    const double target = o.target_power;
    const double y_target = stats::normal_quantile(std::clamp(target, 1e-6, 1.0 - 1e-6));
    std::map<int, double> seen;
    int lo = lo_limit - 1, hi = o.n2_max_cap + 1;
    const auto eval = [&](int m) {
        const double p = pw(m);
        seen[m] = p;
        if (p >= target)
            hi = std::min(hi, m);
        else
            lo = std::max(lo, m);
        return p;
    };
    const int first = std::clamp(start, lo_limit, o.n2_max_cap);
    // Both bracket ends within the tolerance of the target; a one-sided check
    // stops far above the answer when the power curve is flat.
    const auto done = [&] {
        const auto h = seen.find(hi);
        if (h == seen.end() || h->second > target + o.tolerance) return false;
        const auto l = seen.find(lo);
        return l != seen.end() && l->second >= target - o.tolerance;
    };
    eval(first);
    if (hi > o.n2_max_cap) {
        eval(o.n2_max_cap);
        if (hi > o.n2_max_cap) return -1;
    }
    bool bisect = false;
    while (hi - lo > 1 && !done()) {
        const int width = hi - lo;
        int m = lo + (hi - lo) / 2;
        if (!bisect && seen.count(lo) && seen.count(hi)) {
            const auto probit = [](double p) { return stats::normal_quantile(std::clamp(p, 1e-4, 1.0 - 1e-4)); };
            const double y_lo = probit(seen[lo]), y_hi = probit(seen[hi]);
            if (y_hi > y_lo) {
                const double guess = lo + (y_target - y_lo) / (y_hi - y_lo) * (hi - lo);
                m = std::clamp(static_cast<int>(std::lround(guess)), lo + 1, hi - 1);
            }
        }
        eval(m);
        // Interpolation that barely moves the bracket falls back to halving.
        bisect = !bisect && 2 * (hi - lo) > width;
    }
    return hi;
}

DnnRefit dnn_refit_from_string(const std::string& name) {
    if (name == "retrain") return DnnRefit::Retrain;
    if (name == "recalibrate") return DnnRefit::Recalibrate;
    if (name == "fixed") return DnnRefit::Fixed;
    throw UsageError("unknown DNN refit mode '" + name + "'");
}

std::vector<AsnRow> asn_for_power(const ExperimentConfig& config, const pipeline::FittedTest& test,
                                  const scenario::LawParams& alt, const AsnOptions& options, const RunOptions& run) {
    if (config.scenario.kind != scenario::Kind::AdaptiveBinomial)
        throw UsageError("asn: the scenario must be adaptive-binomial");
    if (!(options.target_power >= 0.0 && options.target_power <= 1.0))
        throw UsageError("asn: target power must be in [0, 1]");
    const int lo_limit = config.scenario.design.n2_min;
    if (options.n2_max_cap < lo_limit) throw UsageError("asn: n2_max cap is below n2_min");

    AsnSearch search(config, test, alt, options, run);
    std::vector<AsnRow> rows;
    for (const auto& method : options.methods) {
        AsnRow row;
        row.method = method;
        int evals = 0;
        const auto pw = [&](int m) {
            ++evals;
            return search.power(method, m);
        };
        const int found = search_n2_max(pw, lo_limit, config.scenario.design.n2_max, options);
        row.evaluations = evals;
        if (found >= 0) {
            const auto& e = search.at(found);
            row.reachable = true;
            row.n2_max = found;
            row.power = search.power(method, found);
            row.asn = e.asn;
            row.asn_se = e.asn_se;
            row.reps = e.data.size();
        } else {
            row.n2_max = options.n2_max_cap;
            row.power = search.power(method, options.n2_max_cap);
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace dlht::harness
