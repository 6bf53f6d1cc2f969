#include "ismnet/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "ismnet/error.hpp"
#include "json.hpp"

namespace ismnet::io {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ifstream open_in(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    return in;
}

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    return out;
}

bool skip_line(const std::string& line) {
    const auto p = line.find_first_not_of(" \t\r");
    return p == std::string::npos || line[p] == '#';
}

bool parse_label(std::string_view tok, NodeLabel& out) {
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    return ec == std::errc() && ptr == tok.data() + tok.size();
}

bool parse_real(std::string_view tok, double& out) {
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    return ec == std::errc() && ptr == tok.data() + tok.size();
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto p = s.find(sep, start);
        out.push_back(s.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
        if (p == std::string_view::npos) break;
        start = p + 1;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    return s;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::vector<std::pair<NodeLabel, NodeLabel>> read_edge_list(std::istream& in) {
    std::vector<std::pair<NodeLabel, NodeLabel>> edges;
    std::string line;
    for (std::size_t lineno = 0; std::getline(in, line); ++lineno) {
        if (skip_line(line)) continue;
        std::istringstream ss(line);
        std::string a, b;
        NodeLabel u = 0, v = 0;
        if (!(ss >> a >> b) || !parse_label(a, u) || !parse_label(b, v))
            throw ParseError(lineno, "expected two non-negative integer node ids");
        // A third column (edge weight/timestamp) is tolerated and ignored.
        if (u == v) throw ParseError(lineno, "self-loop on node " + a);
        edges.emplace_back(u, v);
    }
    return edges;
}

std::vector<std::pair<NodeLabel, NodeLabel>> read_edge_list(const fs::path& path) {
    auto in = open_in(path);
    return read_edge_list(in);
}

std::vector<SimplexRecord> read_simplex_list(std::istream& in) {
    std::vector<SimplexRecord> records;
    std::string line;
    for (std::size_t lineno = 0; std::getline(in, line); ++lineno) {
        if (skip_line(line)) continue;
        std::istringstream ss(line);
        SimplexRecord rec;
        std::string tok;
        bool have_weight = false;
        while (ss >> tok) {
            if (have_weight) throw ParseError(lineno, "weight token must be last");
            if (tok.rfind("w=", 0) == 0) {
                if (!parse_real(std::string_view(tok).substr(2), rec.weight) || rec.weight < 0.0)
                    throw ParseError(lineno, "bad weight token '" + tok + "'");
                have_weight = true;
                continue;
            }
            NodeLabel l = 0;
            if (!parse_label(tok, l)) throw ParseError(lineno, "bad vertex label '" + tok + "'");
            rec.vertices.push_back(l);
        }
        if (rec.vertices.empty()) throw ParseError(lineno, "record has no vertices");
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<SimplexRecord> read_simplex_list(const fs::path& path) {
    auto in = open_in(path);
    return read_simplex_list(in);
}

void save_complex(const SimplicialComplex& complex, const fs::path& dir) {
    fs::create_directories(dir);
    json counts = json::array();
    for (int h = 0; h <= complex.max_order(); ++h) {
        const auto& layer = complex.layer(h);
        counts.push_back(layer.size());
        auto out = open_out(dir / ("layer_" + std::to_string(h) + ".csv"));
        for (SimplexId id = 0; id < layer.size(); ++id) {
            auto s = layer[id];
            for (std::size_t i = 0; i < s.size(); ++i) out << (i ? "," : "") << s[i];
            out << '\n';
        }
    }
    json manifest;
    manifest["n"] = complex.node_count();
    manifest["max_order"] = complex.max_order();
    manifest["counts"] = counts;
    for (int h = 0; h <= complex.max_order(); ++h) manifest["n_" + std::to_string(h)] = complex.count(h);
    manifest["labels"] = std::vector<NodeLabel>(complex.labels().begin(), complex.labels().end());
    manifest["content_hash"] = complex.content_hash();
    auto out = open_out(dir / "manifest.json");
    out << manifest.dump(2) << '\n';
}

SimplicialComplex load_complex(const fs::path& dir) {
    json manifest;
    {
        auto in = open_in(dir / "manifest.json");
        try {
            in >> manifest;
        } catch (const json::exception& e) {
            throw Error("bad manifest in " + dir.string() + ": " + e.what());
        }
    }
    auto labels = manifest.at("labels").get<std::vector<NodeLabel>>();
    const int max_order = manifest.at("max_order").get<int>();
    std::vector<SimplexLayer> layers;
    for (int h = 0; h <= max_order; ++h) {
        auto in = open_in(dir / ("layer_" + std::to_string(h) + ".csv"));
        std::vector<NodeId> flat;
        std::string line;
        for (std::size_t lineno = 0; std::getline(in, line); ++lineno) {
            if (trim(line).empty()) continue;
            const auto fields = split(trim(line), ',');
            if (fields.size() != static_cast<std::size_t>(h) + 1)
                throw ParseError(lineno, "layer " + std::to_string(h) + " row has wrong arity");
            for (auto f : fields) {
                NodeLabel v = 0;
                if (!parse_label(f, v)) throw ParseError(lineno, "bad node id in layer " + std::to_string(h));
                flat.push_back(static_cast<NodeId>(v));
            }
        }
        try {
            layers.emplace_back(h, std::move(flat));
        } catch (const std::invalid_argument& e) {
            throw Error("layer " + std::to_string(h) + ": " + e.what());
        }
    }
    try {
        return SimplicialComplex(std::move(labels), std::move(layers));
    } catch (const std::invalid_argument& e) {
        throw Error("complex in " + dir.string() + ": " + e.what());
    }
}

void write_scores_csv(const fs::path& path, const InfluenceScores& scores) {
    auto out = open_out(path);
    out << "simplex_id,score\n";
    for (std::size_t i = 0; i < scores.size(); ++i)
        if (scores.is_observed(i)) out << i << ',' << format_double(scores.values[i]) << '\n';
}

InfluenceScores read_scores_csv(const fs::path& path, std::size_t n) {
    auto in = open_in(path);
    auto scores = InfluenceScores::unobserved(n);
    std::string line;
    if (!std::getline(in, line) || trim(line) != "simplex_id,score")
        throw ParseError(0, path.string() + ": expected header 'simplex_id,score'");
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
        if (trim(line).empty()) continue;
        const auto fields = split(trim(line), ',');
        NodeLabel id = 0;
        double v = 0.0;
        if (fields.size() != 2 || !parse_label(fields[0], id) || !parse_real(fields[1], v))
            throw ParseError(lineno, path.string() + ": malformed score row");
        if (id >= n) throw ParseError(lineno, path.string() + ": simplex id out of range");
        scores.values[id] = v;
        scores.observed[id] = 1;
    }
    return scores;
}

void write_features_csv(const fs::path& path, const std::vector<std::string>& names, const DenseMatrix& features) {
    if (names.size() != features.cols()) throw DimensionError("feature names do not match columns");
    auto out = open_out(path);
    out << "simplex_id";
    for (const auto& n : names) out << ',' << n;
    out << '\n';
    for (std::size_t r = 0; r < features.rows(); ++r) {
        out << r;
        for (double v : features.row(r)) out << ',' << format_double(v);
        out << '\n';
    }
}

DenseMatrix read_features_csv(const fs::path& path, std::vector<std::string>* names) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError(0, path.string() + ": empty feature file");
    const auto header = split(trim(line), ',');
    if (header.empty() || header[0] != "simplex_id") throw ParseError(0, path.string() + ": bad feature header");
    const std::size_t d = header.size() - 1;
    if (names) {
        names->clear();
        for (std::size_t i = 1; i < header.size(); ++i) names->emplace_back(header[i]);
    }
    std::vector<double> values;
    std::size_t rows = 0;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
        if (trim(line).empty()) continue;
        const auto fields = split(trim(line), ',');
        NodeLabel id = 0;
        if (fields.size() != d + 1 || !parse_label(fields[0], id) || id != rows)
            throw ParseError(lineno, path.string() + ": malformed feature row");
        for (std::size_t c = 1; c <= d; ++c) {
            double v = 0.0;
            if (!parse_real(fields[c], v)) throw ParseError(lineno, path.string() + ": bad feature value");
            values.push_back(v);
        }
        ++rows;
    }
    DenseMatrix m(rows, d);
    std::copy(values.begin(), values.end(), m.data().begin());
    return m;
}

void write_matrix_market(const fs::path& path, const CsrMatrix& m) {
    auto out = open_out(path);
    ismnet::write_matrix_market(out, m);
}

}  // namespace ismnet::io
