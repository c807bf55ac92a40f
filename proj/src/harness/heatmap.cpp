#include "dlht/harness/heatmap.hpp"

#include <ostream>

#include "dlht/adaptive/comparators.hpp"
#include "dlht/errors.hpp"
#include "dlht/parallel.hpp"
#include "dlht/scenario/dataset_io.hpp"

namespace dlht::harness {

void Heatmap::write_csv(std::ostream& out) const {
    out << "x_p1,x_t1,n2";
    for (const auto& l : laws)
        for (const char* m : {"dnn", "incta", "bm"}) out << ',' << m << '_' << l.name;
    out << '\n';
    for (const auto& c : cells) {
        out << c.x_p1 << ',' << c.x_t1 << ',' << c.n2;
        for (double v : c.reject) out << ',' << scenario::format_double(v);
        out << '\n';
    }
}

Heatmap conditional_rejection_map(const pipeline::FittedTest& test, const std::vector<HeatmapLaw>& laws,
                                  std::size_t reps, double bm_level, const stats::RandomStream& stream) {
    if (test.scenario.kind != scenario::Kind::AdaptiveBinomial)
        throw UsageError("heatmap: the fitted test must be adaptive-binomial");
    if (reps == 0) throw UsageError("heatmap: need at least one replicate per cell");
    const auto& design = test.scenario.design;
    const auto table = adaptive::reassessment_table(design);
    Heatmap map;
    map.n1 = design.n1;
    map.laws = laws;
    const auto side = static_cast<std::size_t>(design.n1 + 1);
    map.cells.resize(side * side);
    parallel_for(map.cells.size(), [&](std::size_t idx) {
        auto& cell = map.cells[idx];
        cell.x_p1 = static_cast<int>(idx / side);
        cell.x_t1 = static_cast<int>(idx % side);
        cell.n2 = table->n2(cell.x_p1, cell.x_t1);
        cell.reject.assign(laws.size() * 3, 0.0);
        std::vector<scenario::DataSummary> data(reps);
        for (std::size_t l = 0; l < laws.size(); ++l) {
            const auto paths = adaptive::simulate_conditional(cell.x_p1, cell.x_t1, laws[l].rate_p, laws[l].rate_t,
                                                              *table, reps, stream.child(idx).child(l));
            std::size_t incta = 0, bm = 0;
            for (std::size_t i = 0; i < reps; ++i) {
                data[i].path = paths[i];
                incta += adaptive::incta_decision(paths[i], design.n1, test.alpha);
                bm += adaptive::bm_decision(paths[i], design.n1, bm_level);
            }
            std::size_t dnn = 0;
            for (const auto& d : pipeline::decide_batch(test, data)) dnn += d.reject;
            const double n = static_cast<double>(reps);
            cell.reject[Heatmap::column(l, 0)] = static_cast<double>(dnn) / n;
            cell.reject[Heatmap::column(l, 1)] = static_cast<double>(incta) / n;
            cell.reject[Heatmap::column(l, 2)] = static_cast<double>(bm) / n;
        }
    });
    return map;
}

}  // namespace dlht::harness
