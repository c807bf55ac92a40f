#include "dlht/scenario/generators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dlht/adaptive/ssr.hpp"
#include "dlht/classical/tests.hpp"
#include "dlht/parallel.hpp"
#include "dlht/stats/special.hpp"

namespace dlht::scenario {

std::vector<TrainingSet> training_sets(const ScenarioSpec& spec) {
    spec.validate();
    std::vector<TrainingSet> sets;
    const double mu0 = spec.null_mean;
    switch (spec.kind) {
        case Kind::NormalKnownSigma: {
            const double sigma = spec.sigma_grid.front();
            for (double mu1 : spec.alt_means) {
                TrainingSet s;
                s.null_law.mean_t = mu0;
                s.null_law.sd_t = sigma;
                s.alt_law = s.null_law;
                s.alt_law.mean_t = mu1;
                sets.push_back(s);
            }
            break;
        }
        case Kind::NormalUnknownSigma:
            for (double sigma : spec.sigma_grid) {
                TrainingSet s;
                s.null_law.mean_t = mu0;
                s.null_law.sd_t = sigma;
                s.alt_law = s.null_law;
                s.alt_law.mean_t =
                    classical::z_test_mu1_for_power(mu0, sigma, spec.n, spec.alpha, spec.alt_powers.front());
                sets.push_back(s);
            }
            break;
        case Kind::BehrensFisher:
            for (double sp : spec.sigma_grid)
                for (double st : spec.sigma_grid)
                    for (double power : spec.alt_powers) {
                        TrainingSet s;
                        s.null_law.mean_p = s.null_law.mean_t = mu0;
                        s.null_law.sd_p = sp;
                        s.null_law.sd_t = st;
                        s.alt_law = s.null_law;
                        s.alt_law.mean_t = classical::welch_mu_t_for_power(mu0, sp, st, spec.n, spec.alpha, power);
                        sets.push_back(s);
                    }
            break;
        case Kind::AdaptiveBinomial:
            for (double pi : spec.rate_grid) {
                TrainingSet s;
                s.null_law.rate_p = s.null_law.rate_t = pi;
                s.alt_law = s.null_law;
                s.alt_law.rate_t = adaptive::solve_pi_t(pi, spec.alt_power, spec.power_n, spec.alpha);
                sets.push_back(s);
            }
            break;
    }
    return sets;
}

namespace {

stats::SampleSummary normal_summary(stats::Generator& gen, std::size_t n, double mu, double sd) {
    thread_local std::vector<double> buffer;
    buffer.resize(n);
    for (auto& x : buffer) x = mu + sd * gen.normal();
    return stats::summarize(buffer);
}

}  // namespace

DataSummary simulate(const ScenarioSpec& spec, const LawParams& law, const stats::RandomStream& stream) {
    DataSummary d;
    switch (spec.kind) {
        case Kind::NormalKnownSigma:
        case Kind::NormalUnknownSigma: {
            auto gen = stream.generator();
            d.x = normal_summary(gen, spec.n, law.mean_t, law.sd_t);
            break;
        }
        case Kind::BehrensFisher: {
            auto gen = stream.generator();
            d.control = normal_summary(gen, spec.n, law.mean_p, law.sd_p);
            d.x = normal_summary(gen, spec.n, law.mean_t, law.sd_t);
            break;
        }
        case Kind::AdaptiveBinomial:
            d.path = adaptive::simulate_trial(law.rate_p, law.rate_t, spec.design, stream);
            break;
    }
    return d;
}

namespace {

constexpr std::size_t kBlock = 1024;

template <class Fn>
void blocked_for(std::size_t count, Fn fn) {
    parallel_for((count + kBlock - 1) / kBlock, [&](std::size_t b) {
        const std::size_t end = std::min(count, (b + 1) * kBlock);
        for (std::size_t i = b * kBlock; i < end; ++i) fn(i);
    });
}

}  // namespace

std::vector<DataSummary> simulate_many(const ScenarioSpec& spec, const LawParams& law,
                                       std::size_t count, const stats::RandomStream& stream) {
    std::vector<DataSummary> out(count);
    if (spec.kind == Kind::AdaptiveBinomial) {
        const auto table = adaptive::reassessment_table(spec.design);
        blocked_for(count, [&](std::size_t i) {
            out[i].path = adaptive::simulate_trial(law.rate_p, law.rate_t, *table, stream.child(i));
        });
    } else {
        blocked_for(count, [&](std::size_t i) { out[i] = simulate(spec, law, stream.child(i)); });
    }
    return out;
}

std::vector<double> simulate_statistic_features(const ScenarioSpec& spec, const LawParams& law,
                                                std::size_t count, const stats::RandomStream& stream) {
    const std::size_t dim = spec.statistic_dim();
    std::vector<double> out(count * dim);
    if (spec.kind == Kind::AdaptiveBinomial) {
        const auto table = adaptive::reassessment_table(spec.design);
        blocked_for(count, [&](std::size_t i) {
            DataSummary d;
            d.path = adaptive::simulate_trial(law.rate_p, law.rate_t, *table, stream.child(i));
            statistic_features(spec, d, out.data() + i * dim);
        });
    } else {
        blocked_for(count, [&](std::size_t i) {
            statistic_features(spec, simulate(spec, law, stream.child(i)), out.data() + i * dim);
        });
    }
    return out;
}

namespace {

Dataset build_training(const ScenarioSpec& spec, const stats::RandomStream& stream) {
    const auto sets = training_sets(spec);
    const std::size_t per_set = spec.b0 + spec.b1;
    const std::size_t dim = spec.statistic_dim();
    const std::size_t rows = sets.size() * per_set;
    std::vector<double> features(rows * dim);
    if (spec.kind == Kind::AdaptiveBinomial) adaptive::reassessment_table(spec.design);
    blocked_for(rows, [&](std::size_t r) {
        const std::size_t s = r / per_set, k = r % per_set;
        const bool alt = k >= spec.b0;
        const std::size_t i = alt ? k - spec.b0 : k;
        const auto& law = alt ? sets[s].alt_law : sets[s].null_law;
        const auto d = simulate(spec, law, stream.child(s).child(alt ? 1 : 0).child(i));
        statistic_features(spec, d, features.data() + r * dim);
    });
    Dataset data(spec.statistic_names());
    data.reserve(rows);
    for (std::size_t r = 0; r < rows; ++r)
        data.add(std::span<const double>(features.data() + r * dim, dim), (r % per_set) >= spec.b0 ? 1.0 : 0.0);
    data.shuffle(stream.child(0x5A4F));
    return data;
}

void require_kind(const ScenarioSpec& spec, Kind kind) {
    if (spec.kind != kind)
        throw std::invalid_argument("generator for " + to_string(kind) + " called with " + to_string(spec.kind));
}

}  // namespace

Dataset gen_simple_known(const ScenarioSpec& spec, const stats::RandomStream& stream) {
    require_kind(spec, Kind::NormalKnownSigma);
    return build_training(spec, stream);
}

Dataset gen_simple_unknown(const ScenarioSpec& spec, const stats::RandomStream& stream) {
    require_kind(spec, Kind::NormalUnknownSigma);
    return build_training(spec, stream);
}

Dataset gen_behrens_fisher(const ScenarioSpec& spec, const stats::RandomStream& stream) {
    require_kind(spec, Kind::BehrensFisher);
    return build_training(spec, stream);
}

Dataset gen_adaptive(const ScenarioSpec& spec, const adaptive::DesignParams& design,
                     const stats::RandomStream& stream) {
    require_kind(spec, Kind::AdaptiveBinomial);
    ScenarioSpec s = spec;
    s.design = design;
    return build_training(s, stream);
}

Dataset generate_training(const ScenarioSpec& spec, const stats::RandomStream& stream) {
    return build_training(spec, stream);
}

std::vector<std::vector<double>> gen_critical_inputs(const ScenarioSpec& spec) {
    spec.validate();
    std::vector<std::vector<double>> out;
    if (spec.kind == Kind::NormalKnownSigma) return out;
    const std::size_t points = spec.critical_points;
    std::vector<double> seq(points);
    for (std::size_t i = 0; i < points; ++i)
        seq[i] = spec.critical_lo + (spec.critical_hi - spec.critical_lo) * static_cast<double>(i) /
                                        static_cast<double>(points - 1);
    seq.back() = spec.critical_hi;
    if (spec.kind == Kind::BehrensFisher) {
        for (double sp : seq)
            for (double st : seq) out.push_back({sp, st});
    } else {
        for (double v : seq) out.push_back({v});
    }
    return out;
}

LawParams null_law_for(const ScenarioSpec& spec, std::span<const double> t) {
    if (t.size() != spec.critical_dim()) throw std::invalid_argument("null_law_for: critical input dimension mismatch");
    LawParams law;
    switch (spec.kind) {
        case Kind::NormalKnownSigma:
            law.mean_t = spec.null_mean;
            law.sd_t = spec.sigma_grid.front();
            break;
        case Kind::NormalUnknownSigma:
            law.mean_t = spec.null_mean;
            law.sd_t = t[0];
            break;
        case Kind::BehrensFisher:
            // Location invariance: the common mean is fixed at 0.
            law.mean_p = law.mean_t = 0.0;
            law.sd_p = t[0];
            law.sd_t = t[1];
            break;
        case Kind::AdaptiveBinomial:
            law.rate_p = law.rate_t = t[0];
            break;
    }
    return law;
}

}  // namespace dlht::scenario
