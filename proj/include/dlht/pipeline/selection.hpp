#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dlht/dataset.hpp"
#include "dlht/neural/network.hpp"
#include "dlht/neural/train.hpp"
#include "json.hpp"

namespace dlht::pipeline {

struct CandidatePool {
    std::vector<nn::NetworkSpec> specs;

    // Nonempty; shared input_dim and head.
    void validate() const;
    // Every (depth, width) combination with equal widths per layer.
    static CandidatePool grid(std::size_t input_dim, const std::vector<std::size_t>& depths,
                              const std::vector<std::size_t>& widths, nn::Head head, double dropout);
};

struct CandidateReport {
    nn::NetworkSpec spec;
    double validation_loss = 0.0;
    bool diverged = false;
    std::string error;
};

struct SelectionReport {
    std::vector<CandidateReport> candidates;
    std::size_t selected = 0;

    nlohmann::json to_json() const;
};

// Lowest validation loss; ties go to fewer parameters, then fewer layers,
// then pool order. Throws SelectionError if every candidate diverged.
std::size_t pick_best(std::span<const CandidateReport> candidates);

struct Selection {
    nn::Network network;  // selected candidate, fitted on the training split
    SelectionReport report;
};

/*
 * Trains every candidate on one 80/20 split drawn from `stream` (training
 * fraction from config.validation_fraction) and keeps the best. Candidates
 * train concurrently; a diverged candidate is reported and skipped.
 */
Selection select_structure(const CandidatePool& pool, const Dataset& data, const nn::TrainConfig& config,
                           const stats::RandomStream& stream);

// First-fold network (logit classifier on binary labels).
nn::Network fit_statistic_net(const Dataset& data, const CandidatePool& pool, const nn::TrainConfig& config,
                              const stats::RandomStream& stream, SelectionReport* report = nullptr);

nlohmann::json pool_to_json(const CandidatePool& pool);

}  // namespace dlht::pipeline
