#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dlht/pipeline/fitted_test.hpp"

namespace dlht::harness {

struct HeatmapLaw {
    std::string name;
    double rate_p = 0.0;
    double rate_t = 0.0;
};

struct HeatmapCell {
    int x_p1 = 0;
    int x_t1 = 0;
    int n2 = 0;
    std::vector<double> reject;  // DNN, INCTA, BM per law
};

struct Heatmap {
    int n1 = 0;
    std::vector<HeatmapLaw> laws;
    std::vector<HeatmapCell> cells;  // (n1 + 1)^2, x_t1 fastest

    const HeatmapCell& cell(int x_p1, int x_t1) const {
        return cells[static_cast<std::size_t>(x_p1) * static_cast<std::size_t>(n1 + 1) +
                     static_cast<std::size_t>(x_t1)];
    }
    // Column index into HeatmapCell::reject.
    static std::size_t column(std::size_t law, std::size_t method) { return law * 3 + method; }

    void write_csv(std::ostream& out) const;
};

/*
 * Pr(reject | stage-1 cell) for the DNN, INCTA and BM, estimated by
 * simulating stage 2 `reps` times per cell under each law. Cell (x_p1, x_t1)
 * uses stream.child(cell index).child(law index).
 */
Heatmap conditional_rejection_map(const pipeline::FittedTest& test, const std::vector<HeatmapLaw>& laws,
                                  std::size_t reps, double bm_level, const stats::RandomStream& stream);

}  // namespace dlht::harness
