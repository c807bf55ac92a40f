#include "dlht/harness/results.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "dlht/scenario/dataset_io.hpp"

namespace dlht::harness {

double rate_se(double p, std::size_t reps) { return std::sqrt(p * (1.0 - p) / static_cast<double>(reps)); }

void ResultsTable::add(ResultRow row) { rows_.push_back(std::move(row)); }

void ResultsTable::add_rate(std::string experiment, std::string point, std::string method, std::string metric,
                            std::size_t hits, std::size_t reps, double reference) {
    const double p = static_cast<double>(hits) / static_cast<double>(reps);
    rows_.push_back({std::move(experiment), std::move(point), std::move(method), std::move(metric), p,
                     rate_se(p, reps), reps, reference});
}

void ResultsTable::append(const ResultsTable& other) {
    rows_.insert(rows_.end(), other.rows_.begin(), other.rows_.end());
}

const ResultRow& ResultsTable::find(const std::string& point, const std::string& method, const std::string& metric,
                                    const std::string& experiment) const {
    for (const auto& r : rows_)
        if (r.point == point && r.method == method && r.metric == metric &&
            (experiment.empty() || r.experiment == experiment))
            return r;
    throw std::out_of_range("no result row for " + point + "/" + method + "/" + metric);
}

void ResultsTable::write_csv(std::ostream& out) const {
    out << "experiment,point,method,metric,value,mc_se,reps,reference\n";
    for (const auto& r : rows_)
        out << r.experiment << ',' << r.point << ',' << r.method << ',' << r.metric << ','
            << scenario::format_double(r.value) << ',' << scenario::format_double(r.mc_se) << ',' << r.reps << ','
            << (std::isnan(r.reference) ? std::string() : scenario::format_double(r.reference)) << '\n';
}

void ResultsTable::save_csv(const std::filesystem::path& path) const {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_csv(out);
}

void ResultsTable::print(std::ostream& out) const {
    const auto flags = out.flags();
    out << std::left << std::setw(22) << "experiment" << std::setw(32) << "point" << std::setw(13) << "method"
        << std::setw(10) << "metric" << std::right << std::setw(10) << "reference" << std::setw(10) << "value"
        << std::setw(9) << "mc_se" << '\n';
    for (const auto& r : rows_) {
        const bool rate = r.metric != "ASN";
        const double k = rate ? 100.0 : 1.0;
        out << std::left << std::setw(22) << r.experiment << std::setw(32) << r.point << std::setw(13) << r.method
            << std::setw(10) << r.metric << std::right << std::fixed << std::setprecision(rate ? 2 : 1)
            << std::setw(10);
        if (std::isnan(r.reference))
            out << "-";
        else
            out << r.reference * k;
        out << std::setw(10) << r.value * k << std::setw(9) << std::setprecision(rate ? 3 : 2) << r.mc_se * k
            << '\n';
    }
    out.flags(flags);
}

}  // namespace dlht::harness
