#include <cmath>
#include <iterator>
#include <map>
#include <sstream>
#include <string>

#include "doctest.h"
#include "dlht/errors.hpp"
#include "dlht/harness/asn.hpp"
#include "dlht/harness/config.hpp"
#include "dlht/harness/results.hpp"
#include "dlht/stats/special.hpp"

using namespace dlht;
using namespace dlht::harness;

namespace {

// Power rising smoothly from about 0.5 at n2_max = 21 towards 1.
double smooth_power(int m) { return stats::normal_cdf(0.12 * std::sqrt(static_cast<double>(m)) - 0.5); }

const char* kExample = R"({
  "name": "known-sigma-n50",
  "seed": 7,
  "scenario": {
    "kind": "normal-known-sigma",
    "n": 50, "alpha": 0.05, "null_mean": 0,
    "sigma_grid": [1.0], "alt_means": [0.233, 0.414],
    "b0": 500000, "b1": 500000, "calibration_reps": 1000000
  },
  "fit": {
    "statistic_pool": {"depths": [2, 4], "widths": [10, 40], "dropout": 0.1},
    "statistic_train": {"epochs": 10, "batch_size": 1000, "learning_rate": 0.001}
  },
  "comparators": ["z-test"],
  "validation": {
    "reps": 200000,
    "points": [
      {"label": "null", "hypothesis": "null", "law": {"mean_t": 0, "sd_t": 1}},
      {"label": "mu=0.233", "hypothesis": "alternative", "law": {"mean_t": 0.233, "sd_t": 1},
       "reference": {"DNN": 0.5}}
    ]
  }
})";

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("n2_max search ends with both bracket ends near the target") {
    AsnOptions o;
    std::map<int, int> calls;
    const auto pw = [&](int m) {
        ++calls[m];
        return smooth_power(m);
    };
    const int m = search_n2_max(pw, 21, 340, o);
    REQUIRE(m > 21);
    CHECK(smooth_power(m) >= o.target_power);
    CHECK(smooth_power(m) <= o.target_power + o.tolerance);
    CHECK(calls.size() <= 8);
    const auto below = std::prev(calls.lower_bound(m));
    CHECK((below->first == m - 1 || smooth_power(below->first) >= o.target_power - o.tolerance));
    for (const auto& [k, n] : calls) CHECK(n == 1);
}

TEST_CASE("n2_max search with a zero tolerance returns the first passing value") {
    AsnOptions o;
    o.tolerance = 0.0;
    const int m = search_n2_max(smooth_power, 21, 340, o);
    CHECK(smooth_power(m) >= o.target_power);
    CHECK(smooth_power(m - 1) < o.target_power);
}

TEST_CASE("n2_max search starting below the answer") {
    AsnOptions o;
    o.tolerance = 0.0;
    const int m = search_n2_max(smooth_power, 21, 30, o);
    CHECK(smooth_power(m) >= o.target_power);
    CHECK(smooth_power(m - 1) < o.target_power);
}

TEST_CASE("n2_max search does not stop at the cap on a plateau") {
    AsnOptions o;
    // Reaches 0.9 at 500 and creeps to 0.903 by 1200.
    const auto flat = [](int m) { return m < 500 ? 0.85 + 0.05 * (m - 21) / 479.0 : 0.9 + 0.003 * (m - 500) / 700.0; };
    const int m = search_n2_max(flat, 21, 340, o);
    CHECK(m < 1200);
    CHECK(flat(m) >= 0.9);
    CHECK(m <= 600);
}

TEST_CASE("n2_max search edge cases") {
    AsnOptions o;
    CHECK(search_n2_max([](int) { return 0.95; }, 21, 340, o) == 21);
    CHECK(search_n2_max([](int) { return 0.5; }, 21, 340, o) == -1);
    // Step function: everything from 100 on passes.
    o.tolerance = 0.0;
    CHECK(search_n2_max([](int m) { return m >= 100 ? 0.93 : 0.6; }, 21, 340, o) == 100);
    CHECK_THROWS_AS(dnn_refit_from_string("sometimes"), UsageError);
    CHECK(dnn_refit_from_string("retrain") == DnnRefit::Retrain);
}

TEST_CASE("documented example config parses") {
    const auto list = configs_from_json(nlohmann::json::parse(kExample));
    REQUIRE(list.size() == 1);
    const auto& c = list.front();
    CHECK(c.seed == 7);
    CHECK(c.points.size() == 2);
    CHECK(c.points[1].hypothesis == Hypothesis::Alternative);
    CHECK(c.points[1].reference.at("DNN") == 0.5);
    CHECK(c.fit.statistic_pool.specs.size() == 4);
    const auto half = c.scaled(0.1);
    CHECK(half.scenario.b0 == 50000);
    CHECK(half.validation_reps == 20000);
    CHECK(half.fingerprint() != c.fingerprint());
}

TEST_CASE("config errors are usage errors") {
    auto j = nlohmann::json::parse(kExample);
    j.erase("seed");
    CHECK_THROWS_AS(configs_from_json(j), UsageError);
    j = nlohmann::json::parse(kExample);
    j["comparators"] = {"sign-test"};
    CHECK_THROWS_AS(configs_from_json(j), UsageError);
    j = nlohmann::json::parse(kExample);
    j["scenario"]["kind"] = "poisson";
    CHECK_THROWS_AS(configs_from_json(j), UsageError);
}

TEST_CASE("defaults merge into each experiment") {
    auto one = nlohmann::json::parse(kExample);
    nlohmann::json file = {{"defaults", one}, {"experiments", nlohmann::json::array()}};
    file["experiments"].push_back({{"name", "a"}});
    file["experiments"].push_back({{"name", "b"}, {"seed", 9}, {"scenario", {{"n", 150}}}});
    const auto list = configs_from_json(file);
    REQUIRE(list.size() == 2);
    CHECK(list[0].seed == 7);
    CHECK(list[1].seed == 9);
    CHECK(list[1].scenario.n == 150);
    CHECK(list[1].scenario.kind == scenario::Kind::NormalKnownSigma);
}

TEST_CASE("results csv") {
    ResultsTable t;
    t.add_rate("e", "p", "DNN", "power", 900, 1000, 0.9);
    std::ostringstream out;
    t.write_csv(out);
    const auto text = out.str();
    CHECK(text.find("experiment,point,method,metric,value,mc_se,reps,reference") == 0);
    CHECK(text.find("e,p,DNN,power,0.9,") != std::string::npos);
    CHECK(t.find("p", "DNN", "power").mc_se == doctest::Approx(std::sqrt(0.9 * 0.1 / 1000)));
}

}
