#pragma once
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>

#include "dlht/neural/network.hpp"
#include "json.hpp"

namespace dlht::nn {

inline constexpr int kModelFormatVersion = 1;

/*
 * Model document: {"format", "version", "spec", "standardizer", "layers": [
 * {"rows", "cols", "weights" (row-major), "bias"}]}. Numbers are written in
 * shortest round-trip decimal form, so load(save(net)) is bit-exact.
 */
nlohmann::json to_document(const Network& net);
Network from_document(const nlohmann::json& doc,
                      std::optional<std::size_t> expected_input_dim = std::nullopt);

std::string save(const Network& net);
Network load(const std::string& text, std::optional<std::size_t> expected_input_dim = std::nullopt);

void save_file(const Network& net, const std::filesystem::path& path);
Network load_file(const std::filesystem::path& path,
                  std::optional<std::size_t> expected_input_dim = std::nullopt);

nlohmann::json spec_to_json(const NetworkSpec& spec);
NetworkSpec spec_from_json(const nlohmann::json& j);

}  // namespace dlht::nn
