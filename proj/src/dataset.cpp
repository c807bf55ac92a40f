#include "dlht/dataset.hpp"

#include <cstring>
#include <numeric>

#include "dlht/errors.hpp"

namespace dlht {

Dataset::Dataset(std::vector<std::string> feature_names) : names_(std::move(feature_names)) {
    if (names_.empty()) throw ShapeError("Dataset: at least one feature is required");
}

void Dataset::reserve(std::size_t rows) {
    data_.reserve(rows * dim());
    labels_.reserve(rows);
}

void Dataset::add(std::span<const double> features, double label) {
    if (features.size() != dim())
        throw ShapeError("Dataset::add: expected " + std::to_string(dim()) +
                         " features, got " + std::to_string(features.size()));
    data_.insert(data_.end(), features.begin(), features.end());
    labels_.push_back(label);
}

void Dataset::append(const Dataset& other) {
    if (other.dim() != dim()) throw ShapeError("Dataset::append: feature dimension mismatch");
    data_.insert(data_.end(), other.data_.begin(), other.data_.end());
    labels_.insert(labels_.end(), other.labels_.begin(), other.labels_.end());
}

LabeledExample Dataset::example(std::size_t row) const {
    auto f = features(row);
    return {std::vector<double>(f.begin(), f.end()), labels_[row]};
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
    Dataset out(names_);
    out.reserve(rows.size());
    for (std::size_t r : rows) out.add(features(r), labels_[r]);
    return out;
}

void Dataset::shuffle(const stats::RandomStream& stream) {
    const auto order = permutation(size(), stream);
    *this = subset(order);
}

std::vector<std::size_t> permutation(std::size_t count, const stats::RandomStream& stream) {
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto gen = stream.generator();
    for (std::size_t i = count; i > 1; --i) {
        const auto j = static_cast<std::size_t>(gen() % i);
        std::swap(order[i - 1], order[j]);
    }
    return order;
}

std::uint64_t keyed_checksum(const Dataset& data, std::uint64_t key) {
    std::uint64_t total = 0;
    for (std::size_t r = 0; r < data.size(); ++r) {
        std::uint64_t h = stats::splitmix64(key);
        for (double f : data.features(r)) {
            std::uint64_t bits;
            std::memcpy(&bits, &f, sizeof bits);
            h = stats::splitmix64(h ^ bits);
        }
        const double label = data.label(r);
        std::uint64_t bits;
        std::memcpy(&bits, &label, sizeof bits);
        total += stats::splitmix64(h ^ bits);
    }
    return total;
}

}  // namespace dlht
