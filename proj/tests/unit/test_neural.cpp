#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "dlht/errors.hpp"
#include "dlht/neural/network.hpp"
#include "dlht/neural/serialize.hpp"
#include "dlht/neural/train.hpp"
#include "dlht/stats/random.hpp"

using namespace dlht;
using namespace dlht::nn;

namespace {

NetworkSpec make_spec(std::size_t dim, std::vector<std::size_t> hidden, Head head, double dropout = 0.0) {
    NetworkSpec s;
    s.input_dim = dim;
    s.hidden_layers = std::move(hidden);
    s.head = head;
    s.dropout_rate = dropout;
    return s;
}

Dataset separable(std::size_t count, std::uint64_t seed) {
    Dataset d({"x"});
    stats::Generator gen(seed, 0);
    for (std::size_t i = 0; i < count; ++i) {
        const double mag = 1.0 + 2.0 * gen.uniform();
        const bool pos = gen.uniform() < 0.5;
        const double x = pos ? mag : -mag;
        d.add(std::vector<double>{x}, pos ? 1.0 : 0.0);
    }
    return d;
}

}  // namespace

TEST_SUITE("neural") {

TEST_CASE("forward examples") {
    const auto spec = make_spec(3, {4, 4}, Head::LogitClassifier);
    const auto zero = Network::zeros(spec);
    const std::vector<double> x{1.0, -2.0, 3.5};
    const auto p = zero.forward(x);
    CHECK(p.linear_predictor == 0.0);
    CHECK(p.output == 0.5);

    auto lin = Network::zeros(make_spec(1, {}, Head::LinearRegressor));
    lin.mutable_layers()[0].weights(0, 0) = 2.0;
    const std::vector<double> in{1.5};
    CHECK(lin.forward(in).linear_predictor == 3.0);
    CHECK(lin.forward(in).output == 3.0);

    const std::vector<double> bad{1.0, 2.0};
    CHECK_THROWS_AS(zero.forward(bad), ShapeError);
}

TEST_CASE("classifier output is increasing in the linear predictor") {
    double prev = -1;
    for (double z = -30; z <= 30; z += 0.25) {
        const double s = sigmoid(z);
        CHECK(s > prev);
        prev = s;
    }
}

TEST_CASE("spec validation") {
    CHECK_THROWS(make_spec(0, {3}, Head::LogitClassifier).validate());
    CHECK_THROWS(make_spec(1, {0}, Head::LogitClassifier).validate());
    CHECK_THROWS(make_spec(1, {3}, Head::LogitClassifier, 1.0).validate());
    CHECK_NOTHROW(make_spec(1, {3}, Head::LogitClassifier, 0.1).validate());
    CHECK(make_spec(2, {3}, Head::LinearRegressor).parameter_count() == 2 * 3 + 3 + 3 + 1);
    CHECK(head_from_string(to_string(Head::LinearRegressor)) == Head::LinearRegressor);
}

TEST_CASE("bce_loss examples") {
    const std::vector<double> z0{0.0}, y1{1.0};
    CHECK(bce_loss(z0, y1) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    const std::vector<double> z50{50.0};
    const double sat = bce_loss(z50, y1);
    CHECK(std::isfinite(sat));
    CHECK(sat <= 1e-20);
    const std::vector<double> zz{0.0, 0.0}, y01{0.0, 1.0};
    CHECK(bce_loss(zz, y01) == doctest::Approx(0.693147).epsilon(1e-6));
    CHECK_THROWS_AS(bce_loss(zz, y1), ShapeError);
}

TEST_CASE("bce_loss is finite over a wide range") {
    for (double z : {-1e6, -1e3, -50.0, 0.0, 50.0, 1e3, 1e6}) {
        for (double y : {0.0, 1.0}) {
            const std::vector<double> zs{z}, ys{y};
            CHECK(std::isfinite(bce_loss(zs, ys)));
        }
    }
}

TEST_CASE("mse_loss examples") {
    const std::vector<double> a{1.0, 2.0};
    CHECK(mse_loss(a, a) == 0.0);
    CHECK(mse_loss(std::vector<double>{0.0}, std::vector<double>{2.0}) == 4.0);
    CHECK(mse_loss(std::vector<double>{1.0, 3.0}, std::vector<double>{0.0, 0.0}) == 5.0);
    CHECK_THROWS_AS(mse_loss(a, std::vector<double>{1.0}), ShapeError);
}

TEST_CASE("gradient check on every pool structure") {
    stats::Generator gen(2024, 0);
    for (Head head : {Head::LogitClassifier, Head::LinearRegressor}) {
        for (std::size_t dim : {1u, 3u}) {
            std::vector<double> x(dim);
            for (auto& v : x) v = gen.normal();
            // First-fold pool: depth {2, 4} x width {10, 40}.
            for (std::size_t depth : {2u, 4u})
                for (std::size_t width : {10u, 40u}) {
                    const auto spec = make_spec(dim, std::vector<std::size_t>(depth, width), head);
                    CAPTURE(spec.describe());
                    CHECK(gradient_check(spec, x, 1.0, depth * 100 + width) < 1e-5);
                }
            // Second-fold pool: depth {2, 3} x width {30, 40, 50}.
            for (std::size_t depth : {2u, 3u})
                for (std::size_t width : {30u, 40u, 50u}) {
                    const auto spec = make_spec(dim, std::vector<std::size_t>(depth, width), head);
                    CAPTURE(spec.describe());
                    CHECK(gradient_check(spec, x, 0.3, depth * 100 + width) < 1e-5);
                }
        }
    }
    CHECK(gradient_check(make_spec(3, {5, 5}, Head::LogitClassifier), std::vector<double>{0.3, -1.2, 0.8}, 0.0) < 1e-5);
}

TEST_CASE("zero network has exactly zero hidden-weight gradients") {
    const auto net = Network::zeros(make_spec(2, {5, 5}, Head::LogitClassifier));
    Eigen::MatrixXd cols = Eigen::MatrixXd::Zero(2, 1);
    const std::vector<double> label{1.0};
    Gradients g;
    loss_and_gradients(net, cols, label, g);
    for (std::size_t k = 0; k + 1 < g.weights.size(); ++k) {
        CHECK(g.weights[k].cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("train separates linearly separable data") {
    const auto data = separable(4000, 1);
    const auto test = separable(2000, 2);
    TrainConfig cfg;
    cfg.epochs = 20;
    cfg.batch_size = 64;
    cfg.seed = 5;
    const auto res = train(make_spec(1, {10, 10}, Head::LogitClassifier), data, cfg);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < test.size(); ++i) {
        const double p = res.network.forward(test.features(i)).output;
        correct += (p > 0.5) == (test.label(i) > 0.5);
    }
    CHECK(static_cast<double>(correct) / test.size() >= 0.99);
    CHECK(res.history.train_loss.back() <= res.history.train_loss.front());
    CHECK(res.final_validation_loss() < 0.1);
}

TEST_CASE("train fits a linear regression target") {
    Dataset data({"x"}), held({"x"});
    for (int i = 0; i <= 2000; ++i) {
        const double x = i / 2000.0;
        (i % 5 == 0 ? held : data).add(std::vector<double>{x}, 3.0 * x);
    }
    TrainConfig cfg;
    cfg.epochs = 60;
    cfg.batch_size = 32;
    cfg.seed = 9;
    const auto res = train(make_spec(1, {10, 10}, Head::LinearRegressor), data, cfg, &held);
    CHECK(dataset_loss(res.network, held) <= 1e-3);
}

TEST_CASE("train rejects bad input") {
    TrainConfig cfg;
    const auto spec = make_spec(1, {4}, Head::LogitClassifier);
    CHECK_THROWS(train(spec, Dataset({"x"}), cfg));
    Dataset bad({"x"});
    for (int i = 0; i < 20; ++i) bad.add(std::vector<double>{i == 3 ? std::nan("") : 1.0 * i}, i % 2);
    CHECK_THROWS_AS(train(spec, bad, cfg), TrainingDiverged);
    Dataset wrong({"x", "y"});
    wrong.add(std::vector<double>{1, 2}, 1);
    wrong.add(std::vector<double>{2, 1}, 0);
    CHECK_THROWS_AS(train(spec, wrong, cfg), ShapeError);
    cfg.epochs = 0;
    CHECK_THROWS(cfg.validate());
}

TEST_CASE("training is deterministic under a seed") {
    const auto data = separable(1000, 3);
    TrainConfig cfg;
    cfg.epochs = 40;
    cfg.batch_size = 32;
    cfg.seed = 77;
    const auto spec = make_spec(1, {10, 10}, Head::LogitClassifier, 0.1);
    const auto a = train(spec, data, cfg);
    const auto b = train(spec, data, cfg);
    CHECK(save(a.network) == save(b.network));
    cfg.seed = 78;
    const auto c = train(spec, data, cfg);
    CHECK(save(a.network) != save(c.network));
    CHECK(a.final_validation_loss() < 0.1);
    CHECK(c.final_validation_loss() < 0.1);
}

TEST_CASE("dropout: inference ignores it and training matches it in expectation") {
    const auto spec = make_spec(2, {20, 20}, Head::LogitClassifier, 0.3);
    auto net = initialize(spec, 4);
    const std::vector<double> x{0.7, -0.4};
    const double inference = net.forward(x).linear_predictor;
    CHECK(net.forward(x).linear_predictor == inference);

    auto one_layer = initialize(make_spec(2, {20}, Head::LogitClassifier, 0.3), 4);
    for (auto& l : one_layer.mutable_layers()) l.bias.setConstant(0.1);
    const double target = one_layer.forward(x).linear_predictor;
    stats::Generator gen(5, 5);
    const int reps = 20000;
    double sum = 0, sq = 0;
    for (int i = 0; i < reps; ++i) {
        const double v = training_forward(one_layer, x, gen)[0];
        sum += v;
        sq += v * v;
    }
    const double mean = sum / reps;
    const double se = std::sqrt((sq / reps - mean * mean) / reps);
    CHECK(std::fabs(mean - target) < 3 * se + 1e-12);
}

TEST_CASE("serialization round trip is bit exact") {
    const auto data = separable(500, 4);
    TrainConfig cfg;
    cfg.epochs = 2;
    cfg.batch_size = 32;
    const auto net = train(make_spec(1, {10, 10}, Head::LogitClassifier), data, cfg).network;
    const auto back = load(save(net));
    stats::Generator gen(1, 1);
    for (int i = 0; i < 100; ++i) {
        const std::vector<double> x{gen.normal() * 3};
        REQUIRE(back.forward(x).linear_predictor == net.forward(x).linear_predictor);
    }
    CHECK(back.spec() == net.spec());
    CHECK(save(back) == save(net));

    auto doc = to_document(net);
    doc["layers"][0]["rows"] = 11;
    CHECK_THROWS_AS(from_document(doc), LoadError);
    auto doc2 = to_document(net);
    doc2["version"] = kModelFormatVersion + 1;
    CHECK_THROWS_AS(from_document(doc2), LoadError);
    CHECK_THROWS_AS(load("not json"), LoadError);

    const auto big = initialize(make_spec(4, {5}, Head::LogitClassifier), 1);
    CHECK_THROWS_AS(load(save(big), 2), ShapeError);
}

TEST_CASE("standardizer maps zero variance to unit scale") {
    Dataset d({"a", "b"});
    d.add(std::vector<double>{1.0, 5.0}, 0);
    d.add(std::vector<double>{3.0, 5.0}, 1);
    const auto s = Standardizer::fit(d);
    CHECK(s.shift(0) == 2.0);
    CHECK(s.scale(0) == 1.0);
    CHECK(s.shift(1) == 5.0);
    CHECK(s.scale(1) == 1.0);
}

}  // TEST_SUITE
