#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "dlht/errors.hpp"
#include "dlht/scenario/dataset_io.hpp"
#include "dlht/scenario/generators.hpp"
#include "dlht/scenario/scenario.hpp"

using namespace dlht;
using namespace dlht::scenario;

namespace {

ScenarioSpec known(double mu1, std::size_t b0, std::size_t b1) {
    ScenarioSpec s;
    s.kind = Kind::NormalKnownSigma;
    s.n = 50;
    s.alt_means = {mu1};
    s.sigma_grid = {1.0};
    s.b0 = b0;
    s.b1 = b1;
    return s;
}

ScenarioSpec unknown(std::vector<double> grid, std::size_t n) {
    ScenarioSpec s;
    s.kind = Kind::NormalUnknownSigma;
    s.n = n;
    s.sigma_grid = std::move(grid);
    s.alt_powers = {0.9};
    s.critical_lo = 0.6;
    s.critical_hi = 2.4;
    s.critical_points = 100;
    s.b0 = s.b1 = 500;
    return s;
}

ScenarioSpec behrens_fisher() {
    ScenarioSpec s;
    s.kind = Kind::BehrensFisher;
    s.n = 100;
    s.sigma_grid = {0.8, 0.9, 1.0, 1.1, 1.2};
    s.alt_powers = {0.6, 0.8};
    s.critical_lo = 0.8;
    s.critical_hi = 1.2;
    s.critical_points = 10;
    s.b0 = s.b1 = 20;
    return s;
}

ScenarioSpec adaptive_spec() {
    ScenarioSpec s;
    s.kind = Kind::AdaptiveBinomial;
    for (int i = 5; i <= 50; ++i) s.rate_grid.push_back(i / 100.0);
    s.critical_lo = 0.05;
    s.critical_hi = 0.5;
    s.critical_points = 100;
    s.design.cep_mc_iters = 1000;
    s.b0 = s.b1 = 30;
    return s;
}

double column_mean(const Dataset& d, std::size_t col, double label) {
    double total = 0;
    std::size_t count = 0;
    for (std::size_t r = 0; r < d.size(); ++r)
        if (d.label(r) == label) {
            total += d.features(r)[col];
            ++count;
        }
    return total / static_cast<double>(count);
}

// Two-sample Kolmogorov-Smirnov distance.
double ks_distance(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double best = 0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= v) ++i;
        while (j < b.size() && b[j] <= v) ++j;
        best = std::max(best, std::fabs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
    }
    return best;
}

}  // namespace

TEST_SUITE("scenario") {

TEST_CASE("gen_simple_known") {
    const auto d = gen_simple_known(known(0.414, 1000, 1000), {1, 1});
    CHECK(d.size() == 2000);
    CHECK(std::fabs(column_mean(d, 0, 1.0) - 0.414) < 0.02);
    CHECK(std::fabs(column_mean(d, 0, 0.0)) < 0.02);

    const auto zero_alt = gen_simple_known(known(0.414, 300, 0), {1, 2});
    CHECK(std::all_of(zero_alt.labels().begin(), zero_alt.labels().end(), [](double y) { return y == 0.0; }));
}

TEST_CASE("identical laws give indistinguishable classes") {
    int passes = 0;
    const int reps = 40;
    for (int rep = 0; rep < reps; ++rep) {
        const auto d = gen_simple_known(known(0.0, 1000, 1000), {2, static_cast<std::uint64_t>(rep)});
        std::vector<double> a, b;
        for (std::size_t r = 0; r < d.size(); ++r) (d.label(r) > 0.5 ? b : a).push_back(d.features(r)[0]);
        // Asymptotic 95% critical value for equal sizes.
        passes += ks_distance(a, b) < 1.358 * std::sqrt(2.0 / 1000.0);
    }
    CHECK(passes >= reps * 9 / 10);
}

TEST_CASE("gen_simple_unknown") {
    std::vector<double> grid;
    for (int i = 0; i < 10; ++i) grid.push_back(0.6 + 0.2 * i);
    auto spec = unknown(grid, 100);
    spec.b0 = spec.b1 = 100;
    const auto d = gen_simple_unknown(spec, {3, 1});
    CHECK(spec.training_sets() == 10);
    CHECK(d.size() == 10 * 200);
    const auto ones = std::count(d.labels().begin(), d.labels().end(), 1.0);
    CHECK(ones == 10 * 100);

    auto single = unknown({1.0}, 100);
    single.b0 = single.b1 = 2000;
    const auto s = gen_simple_unknown(single, {3, 2});
    double total = 0;
    for (std::size_t r = 0; r < s.size(); ++r) total += s.features(r)[1];
    CHECK(std::fabs(total / s.size() - 0.9975) < 0.01);
    CHECK(std::count(s.labels().begin(), s.labels().end(), 1.0) * 2 == static_cast<long>(s.size()));
}

TEST_CASE("gen_behrens_fisher") {
    const auto spec = behrens_fisher();
    CHECK(spec.training_sets() == 50);
    const auto d = gen_behrens_fisher(spec, {4, 1});
    CHECK(d.size() == 50 * 40);
    CHECK(d.dim() == 3);

    ScenarioSpec s = spec;
    LawParams null_law;
    null_law.sd_p = null_law.sd_t = 1.0;
    const std::size_t b0 = 4000;
    const auto draws = simulate_many(s, null_law, b0, {4, 2});
    double diff = 0;
    for (const auto& x : draws) diff += statistic_features(s, x)[0];
    CHECK(std::fabs(diff / b0) < 3 * std::sqrt(2.0 / s.n) / std::sqrt(static_cast<double>(b0)));

    LawParams uneven;
    uneven.sd_p = 0.8;
    uneven.sd_t = 1.2;
    const auto u = simulate_many(s, uneven, b0, {4, 3});
    double f2 = 0, f3 = 0;
    for (const auto& x : u) {
        const auto f = statistic_features(s, x);
        f2 += f[1];
        f3 += f[2];
    }
    CHECK(std::fabs(f2 / b0 - 0.8) < 0.01);
    CHECK(std::fabs(f3 / b0 - 1.2) < 0.01);
}

TEST_CASE("gen_adaptive") {
    const auto spec = adaptive_spec();
    CHECK(spec.training_sets() == 46);
    CHECK(spec.rate_grid.front() == 0.05);
    CHECK(std::fabs(spec.rate_grid.back() - 0.50) < 1e-12);
    const auto d = gen_adaptive(spec, spec.design, {5, 1});
    CHECK(d.size() == 46 * 60);
    double mean_null = 0;
    std::size_t nulls = 0;
    for (std::size_t r = 0; r < d.size(); ++r) {
        const auto f = d.features(r);
        REQUIRE(f[2] >= 21);
        REQUIRE(f[2] <= 340);
        if (d.label(r) == 0.0) {
            mean_null += f[0];
            ++nulls;
        }
    }
    // Stage-1 difference sd is at most sqrt(2 * 0.25 / 85) per row.
    CHECK(std::fabs(mean_null / nulls) < 4 * std::sqrt(0.5 / 85) / std::sqrt(static_cast<double>(nulls)));
}

TEST_CASE("gen_critical_inputs") {
    const auto u = gen_critical_inputs(unknown({1.0}, 100));
    CHECK(u.size() == 100);
    CHECK(u.front()[0] == 0.6);
    CHECK(u.back()[0] == 2.4);
    CHECK(std::fabs((u[1][0] - u[0][0]) - 1.8 / 99) < 1e-12);
    const auto a = gen_critical_inputs(adaptive_spec());
    CHECK(a.size() == 100);
    CHECK(a.front()[0] == 0.05);
    CHECK(a.back()[0] == 0.5);
    const auto b = gen_critical_inputs(behrens_fisher());
    CHECK(b.size() == 100);
    CHECK(b.front().size() == 2);
    CHECK(gen_critical_inputs(known(0.3, 1, 1)).empty());
}

TEST_CASE("regeneration is bit identical and features are finite") {
    auto spec = unknown({0.6, 1.5, 2.4}, 30);
    const auto a = gen_simple_unknown(spec, {6, 1});
    const auto b = gen_simple_unknown(spec, {6, 1});
    CHECK(a.feature_data() == b.feature_data());
    CHECK(a.labels() == b.labels());
    CHECK(std::all_of(a.feature_data().begin(), a.feature_data().end(), [](double v) { return std::isfinite(v); }));
}

TEST_CASE("shuffling keeps rows and labels together") {
    auto d = gen_simple_known(known(0.3, 200, 200), {7, 1});
    const auto before = keyed_checksum(d, 42);
    d.shuffle({7, 2});
    CHECK(keyed_checksum(d, 42) == before);
    Dataset swapped(d.feature_names());
    for (std::size_t r = 0; r < d.size(); ++r) swapped.add(d.features(r), d.label((r + 1) % d.size()));
    CHECK(keyed_checksum(swapped, 42) != before);
}

TEST_CASE("dataset csv round trip") {
    const auto d = gen_behrens_fisher(behrens_fisher(), {8, 1});
    std::stringstream ss;
    write_dataset_csv(ss, d);
    const auto back = read_dataset_csv(ss);
    CHECK(back.feature_names() == d.feature_names());
    CHECK(back.feature_data() == d.feature_data());
    CHECK(back.labels() == d.labels());
    std::stringstream bad("a,b\n1,2\n");
    CHECK_THROWS_AS(read_dataset_csv(bad), LoadError);
}

TEST_CASE("scenario json round trip and keys") {
    const auto spec = adaptive_spec();
    const auto back = scenario_from_json(to_json(spec));
    CHECK(to_json(back) == to_json(spec));
    CHECK(dataset_key(spec, 1) == dataset_key(back, 1));
    CHECK(dataset_key(spec, 1) != dataset_key(spec, 2));
    auto edited = spec;
    edited.b0 += 1;
    CHECK(dataset_key(edited, 1) != dataset_key(spec, 1));
    nlohmann::json j = {{"kind", "adaptive-binomial"}, {"rate_grid", {{"from", 0.05}, {"to", 0.5}, {"step", 0.01}}},
                        {"critical_lo", 0.05}, {"critical_hi", 0.5}};
    CHECK(scenario_from_json(j).rate_grid.size() == 46);
    CHECK_THROWS_AS(kind_from_string("nope"), UsageError);
}

TEST_CASE("observations are checked against the scenario kind") {
    const auto spec = known(0.3, 1, 1);
    CHECK_THROWS_AS(summarize_observation(spec, TwoSample{{1, 2}, {3, 4}}), UsageError);
    OneSample ok{std::vector<double>(50, 1.0)};
    CHECK(summarize_observation(spec, ok).x.mean == 1.0);
}

}  // TEST_SUITE
