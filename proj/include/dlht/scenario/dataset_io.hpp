#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>

#include "dlht/dataset.hpp"
#include "dlht/scenario/scenario.hpp"

namespace dlht::scenario {

inline constexpr int kDataFormatVersion = 1;

// CSV: header of feature names then "label"; shortest round-trip decimals.
void write_dataset_csv(std::ostream& out, const Dataset& data);
Dataset read_dataset_csv(std::istream& in);
void save_dataset(const Dataset& data, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);

// Cache key over the scenario, the seed and the data format version.
std::string dataset_key(const ScenarioSpec& spec, std::uint64_t seed);

// Loads <dir>/<key>.csv if present, otherwise builds, stores and returns it.
Dataset cached_dataset(const std::filesystem::path& dir, const std::string& key,
                       const std::function<Dataset()>& build);

// Shortest decimal that reads back to the same double.
std::string format_double(double v);

}  // namespace dlht::scenario
