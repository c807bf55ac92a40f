#pragma once

#include <filesystem>

#include "dlht/pipeline/fitted_test.hpp"

namespace dlht::pipeline {

inline constexpr int kBundleFormatVersion = 1;

/*
 * Directory with manifest.json, statistic.json and, for network cutoffs,
 * critical.json. Written through a temporary directory and renamed.
 */
void save_bundle(const FittedTest& test, const std::filesystem::path& dir);
FittedTest load_bundle(const std::filesystem::path& dir);

}  // namespace dlht::pipeline
