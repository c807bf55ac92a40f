#include "dlht/neural/serialize.hpp"

#include <fstream>
#include <sstream>

#include "dlht/errors.hpp"

namespace dlht::nn {

using nlohmann::json;

json spec_to_json(const NetworkSpec& spec) {
    return {{"input_dim", spec.input_dim},
            {"hidden_layers", spec.hidden_layers},
            {"head", to_string(spec.head)},
            {"dropout_rate", spec.dropout_rate}};
}

NetworkSpec spec_from_json(const json& j) {
    NetworkSpec spec;
    spec.input_dim = j.at("input_dim").get<std::size_t>();
    spec.hidden_layers = j.at("hidden_layers").get<std::vector<std::size_t>>();
    spec.head = head_from_string(j.at("head").get<std::string>());
    spec.dropout_rate = j.value("dropout_rate", 0.0);
    spec.validate();
    return spec;
}

json to_document(const Network& net) {
    json layers = json::array();
    for (const auto& l : net.layers()) {
        std::vector<double> w;
        w.reserve(static_cast<std::size_t>(l.weights.size()));
        for (Eigen::Index i = 0; i < l.weights.rows(); ++i)
            for (Eigen::Index j = 0; j < l.weights.cols(); ++j) w.push_back(l.weights(i, j));
        layers.push_back({{"rows", l.weights.rows()},
                          {"cols", l.weights.cols()},
                          {"weights", w},
                          {"bias", std::vector<double>(l.bias.data(), l.bias.data() + l.bias.size())}});
    }
    const auto& st = net.standardizer();
    return {{"format", "dlht-model"},
            {"version", kModelFormatVersion},
            {"spec", spec_to_json(net.spec())},
            {"standardizer",
             {{"shift", std::vector<double>(st.shift.data(), st.shift.data() + st.shift.size())},
              {"scale", std::vector<double>(st.scale.data(), st.scale.data() + st.scale.size())}}},
            {"layers", layers}};
}

Network from_document(const json& doc, std::optional<std::size_t> expected_input_dim) {
    try {
        if (doc.value("format", std::string{}) != "dlht-model")
            throw LoadError("model document: missing or unknown format tag");
        const int version = doc.at("version").get<int>();
        if (version != kModelFormatVersion)
            throw LoadError("model document: unsupported version " + std::to_string(version));
        const NetworkSpec spec = spec_from_json(doc.at("spec"));
        if (expected_input_dim && *expected_input_dim != spec.input_dim)
            throw ShapeError("model document: input_dim " + std::to_string(spec.input_dim) +
                             " does not match expected " + std::to_string(*expected_input_dim));
        const auto shift = doc.at("standardizer").at("shift").get<std::vector<double>>();
        const auto scale = doc.at("standardizer").at("scale").get<std::vector<double>>();
        if (shift.size() != spec.input_dim || scale.size() != spec.input_dim)
            throw LoadError("model document: standardizer length mismatch");
        Standardizer st{Eigen::Map<const Eigen::VectorXd>(shift.data(), static_cast<Eigen::Index>(shift.size())),
                        Eigen::Map<const Eigen::VectorXd>(scale.data(), static_cast<Eigen::Index>(scale.size()))};
        std::vector<DenseLayer> layers;
        for (const auto& lj : doc.at("layers")) {
            const auto rows = lj.at("rows").get<Eigen::Index>();
            const auto cols = lj.at("cols").get<Eigen::Index>();
            const auto w = lj.at("weights").get<std::vector<double>>();
            const auto b = lj.at("bias").get<std::vector<double>>();
            if (rows < 1 || cols < 1 || static_cast<Eigen::Index>(w.size()) != rows * cols ||
                static_cast<Eigen::Index>(b.size()) != rows)
                throw LoadError("model document: weight count inconsistent with layer shape");
            DenseLayer layer{Eigen::MatrixXd(rows, cols), Eigen::VectorXd(rows)};
            for (Eigen::Index i = 0; i < rows; ++i) {
                for (Eigen::Index j = 0; j < cols; ++j)
                    layer.weights(i, j) = w[static_cast<std::size_t>(i * cols + j)];
                layer.bias(i) = b[static_cast<std::size_t>(i)];
            }
            layers.push_back(std::move(layer));
        }
        try {
            return Network(spec, std::move(st), std::move(layers));
        } catch (const ShapeError& e) {
            throw LoadError(std::string("model document: ") + e.what());
        }
    } catch (const json::exception& e) {
        throw LoadError(std::string("model document: ") + e.what());
    }
}

std::string save(const Network& net) { return to_document(net).dump(1); }

Network load(const std::string& text, std::optional<std::size_t> expected_input_dim) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw LoadError(std::string("model document: ") + e.what());
    }
    return from_document(doc, expected_input_dim);
}

void save_file(const Network& net, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << save(net) << "\n";
}

Network load_file(const std::filesystem::path& path, std::optional<std::size_t> expected_input_dim) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return load(ss.str(), expected_input_dim);
}

}  // namespace dlht::nn
