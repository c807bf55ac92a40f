#pragma once
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dlht/stats/random.hpp"

namespace dlht {

struct LabeledExample {
    std::vector<double> features;
    double label = 0.0;
};

/*
 * Row-major feature matrix with one label per row. The feature block is laid
 * out so that it maps directly onto a column-major (dim x size) matrix.
 */
class Dataset {
   public:
    Dataset() = default;
    explicit Dataset(std::vector<std::string> feature_names);

    std::size_t size() const { return labels_.size(); }
    std::size_t dim() const { return names_.size(); }
    bool empty() const { return labels_.empty(); }
    const std::vector<std::string>& feature_names() const { return names_; }

    void reserve(std::size_t rows);
    void add(std::span<const double> features, double label);
    void add(const LabeledExample& example) { add(example.features, example.label); }
    void append(const Dataset& other);

    std::span<const double> features(std::size_t row) const {
        return {data_.data() + row * dim(), dim()};
    }
    double label(std::size_t row) const { return labels_[row]; }
    LabeledExample example(std::size_t row) const;

    const std::vector<double>& feature_data() const { return data_; }
    const std::vector<double>& labels() const { return labels_; }

    Dataset subset(std::span<const std::size_t> rows) const;

    // Permutes rows; features and labels move together.
    void shuffle(const stats::RandomStream& stream);

   private:
    std::vector<std::string> names_;
    std::vector<double> data_;
    std::vector<double> labels_;
};

// Order-independent checksum over (features, label) pairs; unchanged by any
// joint permutation of rows, changed by separating a label from its row.
std::uint64_t keyed_checksum(const Dataset& data, std::uint64_t key = 0);

// Random permutation of [0, count) drawn from the stream.
std::vector<std::size_t> permutation(std::size_t count, const stats::RandomStream& stream);

}  // namespace dlht
