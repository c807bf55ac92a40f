#include "dlht/harness/config.hpp"

#include <cmath>
#include <fstream>

#include "dlht/errors.hpp"
#include "dlht/hash.hpp"

namespace dlht::harness {

namespace {

const std::vector<std::string> kComparators{"z-test", "t-test", "welch", "incta", "bm"};

nlohmann::json law_to_json(const scenario::LawParams& l) {
    return {{"mean_t", l.mean_t}, {"sd_t", l.sd_t}, {"mean_p", l.mean_p},
            {"sd_p", l.sd_p},     {"rate_p", l.rate_p}, {"rate_t", l.rate_t}};
}

scenario::LawParams law_from_json(const nlohmann::json& j) {
    scenario::LawParams l;
    l.mean_t = j.value("mean_t", l.mean_t);
    l.sd_t = j.value("sd_t", l.sd_t);
    l.mean_p = j.value("mean_p", l.mean_p);
    l.sd_p = j.value("sd_p", l.sd_p);
    l.rate_p = j.value("rate_p", l.rate_p);
    l.rate_t = j.value("rate_t", l.rate_t);
    return l;
}

std::size_t scale_count(std::size_t v, double scale) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(static_cast<double>(v) * scale)));
}

void merge(nlohmann::json& into, const nlohmann::json& defaults) {
    for (auto it = defaults.begin(); it != defaults.end(); ++it) {
        if (!into.contains(it.key()))
            into[it.key()] = it.value();
        else if (into[it.key()].is_object() && it.value().is_object())
            merge(into[it.key()], it.value());
    }
}

}  // namespace

std::string to_string(Hypothesis h) { return h == Hypothesis::Null ? "null" : "alternative"; }

void ExperimentConfig::validate() const {
    if (name.empty()) throw UsageError("config: name is required");
    scenario.validate();
    fit.statistic_pool.validate();
    if (scenario.critical_dim() > 0) fit.critical_pool.validate();
    fit.statistic_train.validate();
    fit.critical_train.validate();
    if (scenario.b0 + scenario.b1 == 0 || scenario.calibration_reps == 0 || validation_reps == 0)
        throw UsageError("config: Monte Carlo sizes must be at least 1");
    for (const auto& c : comparators)
        if (std::find(kComparators.begin(), kComparators.end(), c) == kComparators.end())
            throw UsageError("config: unknown comparator '" + c + "'");
    if (!(bm_level > 0.0 && bm_level < 1.0)) throw UsageError("config: bm_level must be in (0, 1)");
}

ExperimentConfig ExperimentConfig::scaled(double scale) const {
    if (!(scale > 0.0 && scale <= 1.0)) throw UsageError("scale must be in (0, 1]");
    ExperimentConfig c = *this;
    c.scenario.b0 = scenario.b0 ? scale_count(scenario.b0, scale) : 0;
    c.scenario.b1 = scenario.b1 ? scale_count(scenario.b1, scale) : 0;
    c.scenario.calibration_reps = scale_count(scenario.calibration_reps, scale);
    c.validation_reps = scale_count(validation_reps, scale);
    return c;
}

std::string ExperimentConfig::fingerprint() const {
    auto j = to_json(*this);
    j.erase("output_dir");
    for (auto& p : j["points"]) p.erase("reference");
    return hex64(fnv1a(j.dump()));
}

nlohmann::json to_json(const ExperimentConfig& c) {
    nlohmann::json points = nlohmann::json::array();
    for (const auto& p : c.points)
        points.push_back({{"label", p.label},
                          {"hypothesis", to_string(p.hypothesis)},
                          {"law", law_to_json(p.law)},
                          {"reference", p.reference}});
    return {{"name", c.name},
            {"seed", c.seed},
            {"scenario", scenario::to_json(c.scenario)},
            {"fit", pipeline::fit_options_to_json(c.fit)},
            {"validation", {{"reps", c.validation_reps}, {"points", points}}},
            {"comparators", c.comparators},
            {"bm_level", c.bm_level},
            {"bm_calibrate", c.bm_calibrate},
            {"output_dir", c.output_dir.string()}};
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
    try {
        ExperimentConfig c;
        c.name = j.at("name").get<std::string>();
        if (!j.contains("seed")) throw UsageError("config '" + c.name + "': seed is required");
        c.seed = j.at("seed").get<std::uint64_t>();
        c.scenario = scenario::scenario_from_json(j.at("scenario"));
        c.fit = pipeline::fit_options_from_json(j.value("fit", nlohmann::json::object()), c.scenario);
        if (j.contains("validation")) {
            const auto& v = j["validation"];
            c.validation_reps = v.value("reps", c.validation_reps);
            for (const auto& p : v.value("points", nlohmann::json::array())) {
                ValidationPoint vp;
                vp.label = p.at("label").get<std::string>();
                const auto h = p.value("hypothesis", std::string("null"));
                if (h != "null" && h != "alternative") throw UsageError("config: bad hypothesis '" + h + "'");
                vp.hypothesis = h == "null" ? Hypothesis::Null : Hypothesis::Alternative;
                vp.law = law_from_json(p.at("law"));
                if (p.contains("reference")) vp.reference = p["reference"].get<std::map<std::string, double>>();
                c.points.push_back(std::move(vp));
            }
        }
        c.comparators = j.value("comparators", std::vector<std::string>{});
        c.bm_level = j.value("bm_level", c.bm_level);
        c.bm_calibrate = j.value("bm_calibrate", c.bm_calibrate);
        c.output_dir = j.value("output_dir", std::string("out/") + c.name);
        c.validate();
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("config: ") + e.what());
    } catch (const std::invalid_argument& e) {
        if (dynamic_cast<const UsageError*>(&e)) throw;
        throw UsageError(std::string("config: ") + e.what());
    }
}

std::vector<ExperimentConfig> configs_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw UsageError("config: expected a JSON object");
    if (!j.contains("experiments")) return {config_from_json(j)};
    const auto defaults = j.value("defaults", nlohmann::json::object());
    std::vector<ExperimentConfig> out;
    for (auto e : j.at("experiments")) {
        merge(e, defaults);
        out.push_back(config_from_json(e));
    }
    if (out.empty()) throw UsageError("config: no experiments");
    return out;
}

std::vector<ExperimentConfig> load_configs(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in, nullptr, true, true);
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(path.string() + ": " + e.what());
    }
    return configs_from_json(j);
}

}  // namespace dlht::harness
