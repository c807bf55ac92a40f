#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include "doctest.h"
#include "dlht/errors.hpp"
#include "dlht/neural/serialize.hpp"
#include "dlht/pipeline/bundle.hpp"
#include "dlht/pipeline/calibration.hpp"
#include "dlht/pipeline/fitted_test.hpp"
#include "dlht/pipeline/selection.hpp"
#include "dlht/scenario/generators.hpp"
#include "dlht/stats/distributions.hpp"

using namespace dlht;
using namespace dlht::pipeline;
using scenario::Kind;
using scenario::ScenarioSpec;

namespace {

nn::NetworkSpec mlp(std::size_t dim, std::vector<std::size_t> hidden, nn::Head head = nn::Head::LogitClassifier) {
    nn::NetworkSpec s;
    s.input_dim = dim;
    s.hidden_layers = std::move(hidden);
    s.head = head;
    return s;
}

Dataset separable(std::size_t rows, std::uint64_t seed) {
    Dataset d({"a", "b"});
    auto g = stats::RandomStream{seed, 1}.generator();
    for (std::size_t i = 0; i < rows; ++i) {
        const double y = i % 2;
        const double x[2] = {g.normal() * 0.3 + (y ? 2.0 : -2.0), g.normal()};
        d.add(x, y);
    }
    return d;
}

nn::TrainConfig quick(std::size_t epochs, std::size_t batch) {
    nn::TrainConfig c;
    c.epochs = epochs;
    c.batch_size = batch;
    c.seed = 3;
    return c;
}

ScenarioSpec known_spec() {
    ScenarioSpec s;
    s.kind = Kind::NormalKnownSigma;
    s.n = 50;
    s.alt_means = {0.2, 0.3, 0.4};
    s.b0 = s.b1 = 4000;
    return s;
}

BatchStatistic first_feature(std::size_t dim) {
    return [dim](std::span<const double> rows) {
        std::vector<double> v(rows.size() / dim);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = rows[i * dim];
        return v;
    };
}

// Statistic = delta1 + delta2 through a ReLU pair; cutoff fixed at `cut`.
FittedTest handmade_adaptive(double cut) {
    ScenarioSpec s;
    s.kind = Kind::AdaptiveBinomial;
    s.rate_grid = {0.27};
    s.critical_lo = 0.05;
    s.critical_hi = 0.5;
    std::vector<nn::DenseLayer> layers(2);
    layers[0].weights = Eigen::MatrixXd{{1, 1, 0}, {-1, -1, 0}};
    layers[0].bias = Eigen::VectorXd::Zero(2);
    layers[1].weights = Eigen::MatrixXd{{1, -1}};
    layers[1].bias = Eigen::VectorXd::Zero(1);
    nn::Network stat(mlp(3, {2}), nn::Standardizer::identity(3), layers);
    std::vector<nn::DenseLayer> cl(2);
    cl[0].weights = Eigen::MatrixXd::Zero(1, 1);
    cl[0].bias = Eigen::VectorXd::Zero(1);
    cl[1].weights = Eigen::MatrixXd::Zero(1, 1);
    cl[1].bias = Eigen::VectorXd::Constant(1, cut);
    nn::Network crit(mlp(1, {1}, nn::Head::LinearRegressor), nn::Standardizer::identity(1), cl);
    return FittedTest{s, 0.05, stat, crit, {}};
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("candidate pool grid and validation") {
    auto pool = CandidatePool::grid(3, {2, 4}, {10, 40}, nn::Head::LogitClassifier, 0.1);
    CHECK(pool.specs.size() == 4);
    CHECK(pool.specs[3].hidden_layers == std::vector<std::size_t>{40, 40, 40, 40});
    CHECK_THROWS_AS(CandidatePool{}.validate(), std::invalid_argument);
    pool.specs.push_back(mlp(2, {5}));
    CHECK_THROWS_AS(pool.validate(), std::invalid_argument);
}

TEST_CASE("pool of one selects it") {
    CandidatePool pool{{mlp(2, {8})}};
    auto sel = select_structure(pool, separable(400, 1), quick(20, 32), {5, 0});
    CHECK(sel.report.selected == 0);
    CHECK(sel.report.candidates.size() == 1);
    CHECK(sel.network.spec() == pool.specs[0]);
}

TEST_CASE("separable data: every candidate reaches low loss") {
    auto pool = CandidatePool::grid(2, {1, 2}, {4, 16}, nn::Head::LogitClassifier, 0.0);
    auto sel = select_structure(pool, separable(2000, 2), quick(30, 32), {6, 0});
    for (const auto& c : sel.report.candidates) {
        CHECK_FALSE(c.diverged);
        CHECK(c.validation_loss < 0.1);
    }
    const auto j = sel.report.to_json();
    CHECK(j["candidates"].size() == 4);
}

TEST_CASE("pick_best tie-breaks") {
    CandidateReport a{mlp(2, {10, 10}), 0.3, false, {}};
    CandidateReport b{mlp(2, {10}), 0.3, false, {}};
    CandidateReport c{mlp(2, {4, 4}), 0.3, false, {}};
    CandidateReport worse{mlp(2, {1}), 0.31, false, {}};
    std::vector<CandidateReport> v{a, b, worse};
    CHECK(pick_best(v) == 1);
    // same loss, fewer parameters wins over fewer layers
    CHECK(c.spec.parameter_count() < b.spec.parameter_count());
    v = {b, c};
    CHECK(pick_best(v) == 1);
    // duplicates keep pool order
    v = {a, a, a};
    CHECK(pick_best(v) == 0);
    CandidateReport dead{mlp(2, {1}), 0.0, true, "nan"};
    v = {dead, a};
    CHECK(pick_best(v) == 1);
    v = {dead, dead};
    CHECK_THROWS_AS(pick_best(v), SelectionError);
}

TEST_CASE("selection is deterministic") {
    auto pool = CandidatePool::grid(2, {1, 2}, {4}, nn::Head::LogitClassifier, 0.1);
    auto a = select_structure(pool, separable(600, 4), quick(5, 32), {9, 2});
    auto b = select_structure(pool, separable(600, 4), quick(5, 32), {9, 2});
    CHECK(nn::save(a.network) == nn::save(b.network));
}

TEST_CASE("known-sigma statistic is increasing in the mean") {
    const auto spec = known_spec();
    const auto data = scenario::generate_training(spec, {11, 0});
    CandidatePool pool{{mlp(1, {10, 10})}};
    pool.specs[0].dropout_rate = 0.1;
    const auto net = fit_statistic_net(data, pool, quick(10, 100), {12, 0});
    std::vector<double> grid;
    for (double m = -0.3; m <= 0.7; m += 0.01) grid.push_back(m);
    const auto s = net.linear_predictors(grid);
    std::size_t inversions = 0;
    for (std::size_t i = 1; i < s.size(); ++i) inversions += s[i] < s[i - 1] - 1e-9;
    CHECK(inversions == 0);
    CHECK(s.back() > s.front() + 1.0);

    Dataset flipped(data.feature_names());
    for (std::size_t i = 0; i < data.size(); ++i) flipped.add(data.features(i), 1.0 - data.label(i));
    const auto fnet = fit_statistic_net(flipped, pool, quick(10, 100), {12, 0});
    const auto f = fnet.linear_predictors(grid);
    CHECK(f.back() < f.front() - 1.0);
}

TEST_CASE("statistic network rejects regression data") {
    Dataset d({"x"});
    const double x = 1.0;
    for (int i = 0; i < 20; ++i) d.add({&x, 1}, 0.5);
    CHECK_THROWS_AS(fit_statistic_net(d, {{mlp(1, {2})}}, quick(1, 4), {1, 0}), std::invalid_argument);
}

TEST_CASE("constant cutoff") {
    auto spec = known_spec();
    const auto law = scenario::null_law_for(spec, {});
    const auto stat = first_feature(1);
    const double sd = 1.0 / std::sqrt(50.0);

    SUBCASE("alpha 0.5 gives the median") {
        auto c = calibrate_constant_cutoff(stat, spec, law, 100001, 0.5, {21, 0});
        CHECK(std::abs(c.value) < 3e-3);
    }
    SUBCASE("sample mean gives the z cutoff") {
        auto c = calibrate_constant_cutoff(stat, spec, law, 100000, 0.05, {22, 0});
        CHECK(std::abs(c.value - 1.6448536 * sd) < 4e-3);
    }
    SUBCASE("rejection rate on fresh null data") {
        auto c = calibrate_constant_cutoff(stat, spec, law, 1000000, 0.05, {23, 0});
        const auto fresh = scenario::simulate_statistic_features(spec, law, 1000000, {24, 0});
        const double rate =
            static_cast<double>(std::count_if(fresh.begin(), fresh.end(), [&](double v) { return v > c.value; })) /
            1e6;
        CHECK(std::abs(rate - 0.05) < 0.001);
    }
    CHECK_THROWS_AS(calibrate_constant_cutoff(stat, spec, law, 0, 0.05, {1, 0}), InsufficientData);
    CHECK_THROWS_AS(calibrate_constant_cutoff(stat, spec, law, 10, 1.0, {1, 0}), std::invalid_argument);
}

TEST_CASE("critical labels and network") {
    ScenarioSpec spec;
    spec.kind = Kind::NormalUnknownSigma;
    spec.n = 100;
    spec.sigma_grid = {1.0};
    spec.alt_powers = {0.9};
    spec.critical_lo = 0.6;
    spec.critical_hi = 2.4;
    spec.critical_points = 100;
    const auto inputs = scenario::gen_critical_inputs(spec);
    REQUIRE(inputs.size() == 100);
    const auto pool = CandidatePool::grid(1, {2}, {30}, nn::Head::LinearRegressor, 0.0);
    auto cfg = quick(1000, 10);

    SUBCASE("constant statistic") {
        BatchStatistic constant = [](std::span<const double> rows) {
            return std::vector<double>(rows.size() / 2, 0.7);
        };
        auto fit = fit_critical_net(constant, spec, inputs, 200, 0.05, pool, cfg, {31, 0});
        for (double y : fit.labels) CHECK(y == 0.7);
        CHECK(fit.validation_mse < 1e-4);
        const double mid = 1.55;
        CHECK(std::abs(fit.network.forward({&mid, 1}).output - 0.7) < 0.01);
    }
    SUBCASE("sample mean: cutoff linear in sigma") {
        auto fit = fit_critical_net(first_feature(2), spec, inputs, 20000, 0.05, pool, cfg, {32, 0});
        for (std::size_t l = 0; l < inputs.size(); ++l)
            CHECK(std::abs(fit.labels[l] - 0.16448536 * inputs[l][0]) < 0.01 * inputs[l][0]);
        CHECK(fit.validation_mse < 1e-3);
        for (double mid = 0.65; mid < 2.4; mid += 0.1) {
            const double q = fit.network.forward({&mid, 1}).output;
            CHECK(std::abs(q - 0.16448536 * mid) < 0.02 * mid + 0.005);
        }
    }
    CHECK_THROWS_AS(fit_critical_net(first_feature(2), spec, inputs, 10, 0.05,
                                     CandidatePool::grid(1, {1}, {2}, nn::Head::LogitClassifier, 0.0), cfg, {1, 0}),
                    std::invalid_argument);
}

TEST_CASE("decision rule") {
    auto test = handmade_adaptive(0.1);
    SUBCASE("no responders in either arm") {
        const auto d = decide(test, scenario::Observation{adaptive::TrialPath{0, 0, 21, 0, 0}});
        CHECK(d.statistic == 0.0);
        CHECK(d.cutoff == doctest::Approx(0.1));
        CHECK_FALSE(d.reject);
    }
    SUBCASE("strong treatment effect") {
        const auto d = decide(test, scenario::Observation{adaptive::TrialPath{10, 60, 21, 2, 18}});
        CHECK(d.reject);
    }
    SUBCASE("statistic equal to the cutoff does not reject") {
        auto tie = handmade_adaptive(0.0);
        CHECK_FALSE(decide(tie, scenario::Observation{adaptive::TrialPath{5, 5, 21, 3, 3}}).reject);
    }
    SUBCASE("kind mismatch") {
        CHECK_THROWS_AS(decide(test, scenario::Observation{scenario::OneSample{{1.0, 2.0}}}), UsageError);
    }
    SUBCASE("batch agrees with single decisions") {
        std::vector<scenario::DataSummary> batch(3);
        batch[0].path = {0, 0, 21, 0, 0};
        batch[1].path = {10, 60, 21, 2, 18};
        batch[2].path = {40, 20, 100, 30, 20};
        const auto out = decide_batch(test, batch);
        for (std::size_t i = 0; i < 3; ++i) {
            const auto one = decide(test, batch[i]);
            CHECK(out[i].statistic == doctest::Approx(one.statistic));
            CHECK(out[i].reject == one.reject);
        }
    }
}

TEST_CASE("fit_test on known sigma and bundle round trip") {
    auto spec = known_spec();
    spec.b0 = spec.b1 = 2000;
    spec.calibration_reps = 100000;
    auto opts = default_fit_options(spec);
    opts.statistic_pool = CandidatePool::grid(1, {2}, {10}, nn::Head::LogitClassifier, 0.1);
    opts.statistic_train = quick(10, 100);
    const auto test = fit_test(spec, scenario::generate_training(spec, {41, 0}), opts, {42, 0});
    REQUIRE(std::holds_alternative<ConstantCutoff>(test.critical));

    // far above the null mean rejects, far below does not
    std::vector<double> hi(50, 1.0), lo(50, -1.0);
    CHECK(decide(test, scenario::Observation{scenario::OneSample{hi}}).reject);
    CHECK_FALSE(decide(test, scenario::Observation{scenario::OneSample{lo}}).reject);
    CHECK_THROWS_AS(decide(test, scenario::Observation{scenario::OneSample{{1.0, 2.0}}}), UsageError);

    const auto dir = std::filesystem::temp_directory_path() / "dlht_bundle_test";
    save_bundle(test, dir);
    CHECK(std::filesystem::exists(dir / "manifest.json"));
    CHECK(std::filesystem::exists(dir / "statistic.json"));
    const auto back = load_bundle(dir);
    CHECK(nn::save(back.statistic_net) == nn::save(test.statistic_net));
    CHECK(std::get<ConstantCutoff>(back.critical).value == std::get<ConstantCutoff>(test.critical).value);
    CHECK(back.provenance == test.provenance);
    for (double m = -0.5; m <= 0.8; m += 0.05) {
        std::vector<double> x(50, m);
        const scenario::Observation obs{scenario::OneSample{x}};
        CHECK(decide(back, obs).reject == decide(test, obs).reject);
    }

    std::ofstream(dir / "manifest.json") << "{\"format\": \"dlht-bundle\", \"version\": 99}";
    CHECK_THROWS_AS(load_bundle(dir), LoadError);
    std::filesystem::remove_all(dir);
    CHECK_THROWS_AS(load_bundle(dir), LoadError);
}

TEST_CASE("bundle round trip with a critical network") {
    auto test = handmade_adaptive(0.25);
    const auto dir = std::filesystem::temp_directory_path() / "dlht_bundle_test2";
    save_bundle(test, dir);
    CHECK(std::filesystem::exists(dir / "critical.json"));
    const auto back = load_bundle(dir);
    CHECK(nn::save(std::get<nn::Network>(back.critical)) == nn::save(std::get<nn::Network>(test.critical)));
    std::filesystem::remove_all(dir);
}

TEST_CASE("fit options json") {
    ScenarioSpec spec;
    spec.kind = Kind::BehrensFisher;
    auto j = nlohmann::json::parse(R"({"statistic_pool": {"depths": [2], "widths": [10, 20]},
        "critical_train": {"epochs": 50, "batch_size": 8}})");
    auto o = fit_options_from_json(j, spec);
    CHECK(o.statistic_pool.specs.size() == 2);
    CHECK(o.statistic_pool.specs[0].input_dim == 3);
    CHECK(o.critical_pool.specs.front().input_dim == 2);
    CHECK(o.critical_train.epochs == 50);
    auto back = fit_options_from_json(fit_options_to_json(o), spec);
    CHECK(back.statistic_pool.specs == o.statistic_pool.specs);
    CHECK(back.critical_train.batch_size == 8);
}

}  // TEST_SUITE
