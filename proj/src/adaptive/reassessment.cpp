#include "dlht/adaptive/reassessment.hpp"

#include <map>
#include <mutex>
#include <ostream>
#include <stdexcept>

#include "dlht/parallel.hpp"

namespace dlht::adaptive {

ReassessmentTable::ReassessmentTable(const DesignParams& design)
    : design_(design), cells_(static_cast<std::size_t>((design.n1 + 1) * (design.n1 + 1))) {
    design_.validate();
    for (auto& c : cells_) c.store(-1, std::memory_order_relaxed);
}

stats::RandomStream reassessment_stream(const DesignParams& design, int x_p1, int x_t1) {
    const auto cell = static_cast<std::uint64_t>(x_p1) * static_cast<std::uint64_t>(design.n1 + 1) +
                      static_cast<std::uint64_t>(x_t1);
    return stats::RandomStream{design.cep_seed, 0xCE9}.child(cell);
}

int ReassessmentTable::n2(int x_p1, int x_t1) const {
    const int n1 = design_.n1;
    if (x_p1 < 0 || x_t1 < 0 || x_p1 > n1 || x_t1 > n1)
        throw std::domain_error("reassessment: stage-1 counts out of range");
    auto& cell = cells_[static_cast<std::size_t>(x_p1 * (n1 + 1) + x_t1)];
    int v = cell.load(std::memory_order_acquire);
    if (v < 0) {
        // Concurrent first uses compute the same value.
        v = reassess_n2(x_p1, x_t1, design_, reassessment_stream(design_, x_p1, x_t1));
        cell.store(v, std::memory_order_release);
    }
    return v;
}

void ReassessmentTable::fill() const {
    const int side = design_.n1 + 1;
    parallel_for(cells_.size(), [&](std::size_t i) {
        n2(static_cast<int>(i) / side, static_cast<int>(i) % side);
    });
}

std::shared_ptr<const ReassessmentTable> reassessment_table(const DesignParams& design) {
    static std::mutex mutex;
    static std::map<std::uint64_t, std::shared_ptr<const ReassessmentTable>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[design.fingerprint()];
    if (!slot || !(slot->design() == design)) slot = std::make_shared<ReassessmentTable>(design);
    return slot;
}

TrialPath simulate_trial(double pi_p, double pi_t, const ReassessmentTable& table,
                         const stats::RandomStream& stream) {
    auto gen = stream.generator();
    const int n1 = table.design().n1;
    TrialPath path;
    path.x_p1 = static_cast<int>(stats::binomial(gen, n1, pi_p));
    path.x_t1 = static_cast<int>(stats::binomial(gen, n1, pi_t));
    path.n2 = table.n2(path.x_p1, path.x_t1);
    path.x_p2 = static_cast<int>(stats::binomial(gen, path.n2, pi_p));
    path.x_t2 = static_cast<int>(stats::binomial(gen, path.n2, pi_t));
    return path;
}

TrialPath simulate_trial(double pi_p, double pi_t, const DesignParams& design,
                         const stats::RandomStream& stream) {
    return simulate_trial(pi_p, pi_t, *reassessment_table(design), stream);
}

namespace {

constexpr std::size_t kBlock = 2048;

template <class Fn>
std::vector<TrialPath> blocked(std::size_t count, Fn one) {
    std::vector<TrialPath> out(count);
    parallel_for((count + kBlock - 1) / kBlock, [&](std::size_t b) {
        const std::size_t end = std::min(count, (b + 1) * kBlock);
        for (std::size_t i = b * kBlock; i < end; ++i) out[i] = one(i);
    });
    return out;
}

}  // namespace

std::vector<TrialPath> simulate_trials(double pi_p, double pi_t, const ReassessmentTable& table,
                                       std::size_t count, const stats::RandomStream& stream) {
    if (!(pi_p >= 0.0 && pi_p <= 1.0 && pi_t >= 0.0 && pi_t <= 1.0))
        throw std::domain_error("simulate_trials: rates must lie in [0, 1]");
    return blocked(count, [&](std::size_t i) { return simulate_trial(pi_p, pi_t, table, stream.child(i)); });
}

std::vector<TrialPath> simulate_conditional(int x_p1, int x_t1, double pi_p, double pi_t,
                                            const ReassessmentTable& table, std::size_t count,
                                            const stats::RandomStream& stream) {
    const int n2 = table.n2(x_p1, x_t1);
    return blocked(count, [&](std::size_t i) {
        auto gen = stream.child(i).generator();
        TrialPath p{x_p1, x_t1, n2, 0, 0};
        p.x_p2 = static_cast<int>(stats::binomial(gen, n2, pi_p));
        p.x_t2 = static_cast<int>(stats::binomial(gen, n2, pi_t));
        return p;
    });
}

double average_sample_number(std::span<const TrialPath> paths, int n1) {
    if (paths.empty()) throw std::domain_error("average_sample_number: no trials");
    double total = 0.0;
    for (const auto& p : paths) total += p.n2;
    return n1 + total / static_cast<double>(paths.size());
}

void write_cohort(std::ostream& out, std::span<const TrialPath> paths) {
    out << "x_p1,x_t1,n2,x_p2,x_t2\n";
    for (const auto& p : paths)
        out << p.x_p1 << ',' << p.x_t1 << ',' << p.n2 << ',' << p.x_p2 << ',' << p.x_t2 << '\n';
}

}  // namespace dlht::adaptive
