#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace dlht::harness {

struct ResultRow {
    std::string experiment;
    std::string point;
    std::string method;
    std::string metric;  // type-I, power, ASN, agreement
    double value = 0.0;
    double mc_se = 0.0;
    std::size_t reps = 0;
    double reference = std::numeric_limits<double>::quiet_NaN();
};

class ResultsTable {
   public:
    void add(ResultRow row);
    // Rate row with binomial standard error sqrt(p (1 - p) / reps).
    void add_rate(std::string experiment, std::string point, std::string method, std::string metric,
                  std::size_t hits, std::size_t reps, double reference);
    void append(const ResultsTable& other);

    const std::vector<ResultRow>& rows() const { return rows_; }
    // First row matching every non-empty key; throws std::out_of_range if absent.
    const ResultRow& find(const std::string& point, const std::string& method, const std::string& metric,
                          const std::string& experiment = {}) const;

    void write_csv(std::ostream& out) const;
    void save_csv(const std::filesystem::path& path) const;
    // Aligned text with reference and reproduced values side by side.
    void print(std::ostream& out) const;

   private:
    std::vector<ResultRow> rows_;
};

double rate_se(double p, std::size_t reps);

}  // namespace dlht::harness
