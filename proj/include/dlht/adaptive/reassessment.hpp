#pragma once

#include <atomic>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "dlht/adaptive/ssr.hpp"

namespace dlht::adaptive {

/*
 * Reassessed n2 for every stage-1 outcome (x_p1, x_t1) of a design. Each cell
 * draws its CEP priors from its own substream of design.cep_seed, so n2 is a
 * fixed function of the cell. Cells are computed on first use.
 */
class ReassessmentTable {
   public:
    explicit ReassessmentTable(const DesignParams& design);

    const DesignParams& design() const { return design_; }
    int n2(int x_p1, int x_t1) const;
    // Computes every cell (parallel).
    void fill() const;

   private:
    DesignParams design_;
    mutable std::vector<std::atomic<int>> cells_;
};

stats::RandomStream reassessment_stream(const DesignParams& design, int x_p1, int x_t1);

// Shared table for a design; built once per process and design.
std::shared_ptr<const ReassessmentTable> reassessment_table(const DesignParams& design);

// One two-stage trial. All draws come from `stream`.
TrialPath simulate_trial(double pi_p, double pi_t, const ReassessmentTable& table,
                         const stats::RandomStream& stream);
TrialPath simulate_trial(double pi_p, double pi_t, const DesignParams& design,
                         const stats::RandomStream& stream);

// `count` trials; replicate i uses stream.child(i).
std::vector<TrialPath> simulate_trials(double pi_p, double pi_t, const ReassessmentTable& table,
                                       std::size_t count, const stats::RandomStream& stream);

// Trials with stage-1 counts fixed at (x_p1, x_t1).
std::vector<TrialPath> simulate_conditional(int x_p1, int x_t1, double pi_p, double pi_t,
                                            const ReassessmentTable& table, std::size_t count,
                                            const stats::RandomStream& stream);

// Per-group average sample number n1 + mean(n2).
double average_sample_number(std::span<const TrialPath> paths, int n1);

// CSV with header x_p1,x_t1,n2,x_p2,x_t2.
void write_cohort(std::ostream& out, std::span<const TrialPath> paths);

}  // namespace dlht::adaptive
