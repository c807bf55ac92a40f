#include "dlht/pipeline/bundle.hpp"

#include <fstream>

#include "dlht/errors.hpp"
#include "dlht/neural/serialize.hpp"

namespace dlht::pipeline {

namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

nlohmann::json read_json(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("cannot open " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw LoadError(path.string() + ": " + e.what());
    }
}

}  // namespace

void save_bundle(const FittedTest& test, const fs::path& dir) {
    test.validate();
    nlohmann::json manifest = {{"format", "dlht-bundle"},
                               {"version", kBundleFormatVersion},
                               {"scenario", scenario::to_json(test.scenario)},
                               {"alpha", test.alpha},
                               {"statistic", "statistic.json"},
                               {"provenance", test.provenance}};
    if (const auto* c = std::get_if<ConstantCutoff>(&test.critical))
        manifest["critical"] = {{"type", "constant"}, {"value", c->value}};
    else
        manifest["critical"] = {{"type", "network"}, {"file", "critical.json"}};

    fs::path tmp = dir;
    tmp += ".tmp";
    fs::remove_all(tmp);
    fs::create_directories(tmp);
    write_text(tmp / "statistic.json", nn::save(test.statistic_net));
    if (const auto* net = std::get_if<nn::Network>(&test.critical)) write_text(tmp / "critical.json", nn::save(*net));
    write_text(tmp / "manifest.json", manifest.dump(2));
    fs::remove_all(dir);
    if (dir.has_parent_path()) fs::create_directories(dir.parent_path());
    fs::rename(tmp, dir);
}

FittedTest load_bundle(const fs::path& dir) {
    const auto manifest = read_json(dir / "manifest.json");
    try {
        if (manifest.at("format") != "dlht-bundle") throw LoadError("not a test bundle: " + dir.string());
        if (manifest.at("version").get<int>() != kBundleFormatVersion)
            throw LoadError("unsupported bundle version in " + dir.string());
        auto spec = scenario::scenario_from_json(manifest.at("scenario"));
        std::ifstream in(dir / manifest.at("statistic").get<std::string>(), std::ios::binary);
        if (!in) throw LoadError("bundle is missing its statistic network");
        std::string text((std::istreambuf_iterator<char>(in)), {});
        FittedTest test{spec, manifest.at("alpha").get<double>(), nn::load(text, spec.statistic_dim()),
                        ConstantCutoff{}, manifest.value("provenance", nlohmann::json::object())};
        const auto& crit = manifest.at("critical");
        if (crit.at("type") == "constant") {
            test.critical = ConstantCutoff{crit.at("value").get<double>()};
        } else {
            test.critical = nn::load_file(dir / crit.at("file").get<std::string>(), spec.critical_dim());
        }
        test.validate();
        return test;
    } catch (const nlohmann::json::exception& e) {
        throw LoadError("malformed bundle manifest: " + std::string(e.what()));
    }
}

}  // namespace dlht::pipeline
