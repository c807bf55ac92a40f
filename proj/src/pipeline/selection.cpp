#include "dlht/pipeline/selection.hpp"

#include <cmath>
#include <iostream>
#include <limits>
#include <mutex>
#include <optional>
#include <tuple>

#include "dlht/errors.hpp"
#include "dlht/neural/serialize.hpp"
#include "dlht/parallel.hpp"

namespace dlht::pipeline {

void CandidatePool::validate() const {
    if (specs.empty()) throw std::invalid_argument("candidate pool is empty");
    for (const auto& s : specs) {
        s.validate();
        if (s.input_dim != specs.front().input_dim || s.head != specs.front().head)
            throw std::invalid_argument("candidate pool mixes input dimensions or heads");
    }
}

CandidatePool CandidatePool::grid(std::size_t input_dim, const std::vector<std::size_t>& depths,
                                  const std::vector<std::size_t>& widths, nn::Head head, double dropout) {
    CandidatePool pool;
    for (std::size_t d : depths)
        for (std::size_t w : widths) {
            nn::NetworkSpec s;
            s.input_dim = input_dim;
            s.hidden_layers.assign(d, w);
            s.head = head;
            s.dropout_rate = dropout;
            pool.specs.push_back(s);
        }
    pool.validate();
    return pool;
}

nlohmann::json SelectionReport::to_json() const {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& c : candidates) {
        nlohmann::json e = {{"spec", nn::spec_to_json(c.spec)}, {"diverged", c.diverged}};
        if (c.diverged)
            e["error"] = c.error;
        else
            e["validation_loss"] = c.validation_loss;
        j.push_back(e);
    }
    return {{"candidates", j}, {"selected", selected}};
}

nlohmann::json pool_to_json(const CandidatePool& pool) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& s : pool.specs) j.push_back(nn::spec_to_json(s));
    return j;
}

std::size_t pick_best(std::span<const CandidateReport> candidates) {
    std::size_t best = candidates.size();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const auto& c = candidates[i];
        if (c.diverged || !std::isfinite(c.validation_loss)) continue;
        if (best == candidates.size()) {
            best = i;
            continue;
        }
        const auto& b = candidates[best];
        const auto key = [](const CandidateReport& r) {
            return std::tuple(r.validation_loss, r.spec.parameter_count(), r.spec.hidden_layers.size());
        };
        if (key(c) < key(b)) best = i;
    }
    if (best == candidates.size()) throw SelectionError("structure selection: every candidate diverged");
    return best;
}

Selection select_structure(const CandidatePool& pool, const Dataset& data, const nn::TrainConfig& config,
                           const stats::RandomStream& stream) {
    pool.validate();
    config.validate();
    if (data.size() < 10) throw InsufficientData("structure selection needs at least 10 rows");
    if (data.dim() != pool.specs.front().input_dim) throw ShapeError("structure selection: dataset dimension mismatch");

    const auto order = permutation(data.size(), stream.child(0));
    const auto held = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(config.validation_fraction * static_cast<double>(data.size()))));
    const std::span<const std::size_t> all(order);
    const Dataset fit = data.subset(all.subspan(held));
    const Dataset validation = data.subset(all.first(held));

    const std::size_t k = pool.specs.size();
    std::vector<CandidateReport> reports(k);
    std::vector<std::optional<nn::Network>> nets(k);
    std::mutex log;
    parallel_for(k, [&](std::size_t i) {
        reports[i].spec = pool.specs[i];
        nn::TrainConfig cfg = config;
        cfg.seed = stats::splitmix64(stream.child(1 + i).stream_id ^ stream.seed);
        try {
            auto result = nn::train(pool.specs[i], fit, cfg, &validation);
            reports[i].validation_loss = result.final_validation_loss();
            nets[i].emplace(std::move(result.network));
        } catch (const TrainingDiverged& e) {
            reports[i].diverged = true;
            reports[i].error = e.what();
            std::lock_guard lock(log);
            std::cerr << "warning: candidate " << pool.specs[i].describe() << " diverged: " << e.what() << '\n';
        }
    });
    const std::size_t best = pick_best(reports);
    return {std::move(*nets[best]), {std::move(reports), best}};
}

nn::Network fit_statistic_net(const Dataset& data, const CandidatePool& pool, const nn::TrainConfig& config,
                              const stats::RandomStream& stream, SelectionReport* report) {
    pool.validate();
    if (pool.specs.front().head != nn::Head::LogitClassifier)
        throw std::invalid_argument("statistic network needs a logit-classifier head");
    for (double y : data.labels())
        if (y != 0.0 && y != 1.0) throw std::invalid_argument("statistic network needs binary labels");
    auto sel = select_structure(pool, data, config, stream);
    if (report) *report = std::move(sel.report);
    return std::move(sel.network);
}

}  // namespace dlht::pipeline
