#include "dlht/scenario/dataset_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "dlht/errors.hpp"
#include "dlht/hash.hpp"

namespace dlht::scenario {

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
    for (const auto& name : data.feature_names()) out << name << ',';
    out << "label\n";
    for (std::size_t r = 0; r < data.size(); ++r) {
        for (double f : data.features(r)) out << format_double(f) << ',';
        out << format_double(data.label(r)) << '\n';
    }
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

double parse_double(const std::string& s, std::size_t line) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw LoadError("dataset: bad number '" + s + "' on line " + std::to_string(line));
    return v;
}

}  // namespace

Dataset read_dataset_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw LoadError("dataset: missing header");
    auto header = split(line);
    if (header.size() < 2 || header.back() != "label") throw LoadError("dataset: header must end with 'label'");
    header.pop_back();
    Dataset data(header);
    std::vector<double> row(header.size());
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != header.size() + 1)
            throw LoadError("dataset: wrong field count on line " + std::to_string(lineno));
        for (std::size_t i = 0; i < row.size(); ++i) row[i] = parse_double(cells[i], lineno);
        data.add(row, parse_double(cells.back(), lineno));
    }
    return data;
}

void save_dataset(const Dataset& data, const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw std::runtime_error("cannot write " + tmp);
        write_dataset_csv(out, data);
    }
    std::filesystem::rename(tmp, path);
}

Dataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open " + path.string());
    return read_dataset_csv(in);
}

std::string dataset_key(const ScenarioSpec& spec, std::uint64_t seed) {
    const std::string text = to_json(spec).dump() + "|seed=" + std::to_string(seed) +
                             "|v=" + std::to_string(kDataFormatVersion);
    return to_string(spec.kind) + "-" + hex64(fnv1a(text));
}

Dataset cached_dataset(const std::filesystem::path& dir, const std::string& key,
                       const std::function<Dataset()>& build) {
    const auto path = dir / (key + ".csv");
    if (std::filesystem::exists(path)) return load_dataset(path);
    Dataset data = build();
    save_dataset(data, path);
    return data;
}

}  // namespace dlht::scenario
