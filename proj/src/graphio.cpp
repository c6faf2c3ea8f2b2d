#include "rotsync/graphio.hpp"

#include <fstream>

#include <json.hpp>

namespace rotsync::graphio {

using nlohmann::json;

namespace {

double require_number(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number()) {
        throw ParseError(std::string("expected numeric field \"") + key + "\"");
    }
    return j[key].get<double>();
}

int require_int(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number_integer()) {
        throw ParseError(std::string("expected integer field \"") + key + "\"");
    }
    return j[key].get<int>();
}

}  // namespace

json noise_to_json(const noise::NoiseModel& model) {
    switch (model.kind) {
        case noise::NoiseKind::Uniform:
            return json{{"kind", "uniform"}};
        case noise::NoiseKind::Langevin:
            return json{{"kind", "langevin"}, {"kappa", model.kappa}};
        case noise::NoiseKind::LangevinOutlier:
            return json{{"kind", "langevin_outlier"}, {"kappa", model.kappa}, {"p", model.p}};
        case noise::NoiseKind::Exact:
            return json{{"kind", "exact"}};
    }
    throw Error("noise_to_json: unknown kind");
}

noise::NoiseModel noise_from_json(const json& j, int n) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
        throw ParseError("noise model: expected object with string field \"kind\"");
    }
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "uniform") return noise::NoiseModel::uniform(n);
    if (kind == "exact") return noise::NoiseModel::exact(n);
    if (kind == "langevin") {
        return noise::NoiseModel::langevin(n, require_number(j, "kappa"));
    }
    if (kind == "langevin_outlier") {
        return noise::NoiseModel::langevin_outlier(n, require_number(j, "kappa"),
                                                   require_number(j, "p"));
    }
    throw ParseError("noise model: unknown kind \"" + kind + "\"");
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j, int n) {
    if (!j.is_array() || static_cast<int>(j.size()) != n) {
        throw ParseError("matrix: expected " + std::to_string(n) + " rows");
    }
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i) {
        if (!j[i].is_array() || static_cast<int>(j[i].size()) != n) {
            throw ParseError("matrix: row " + std::to_string(i + 1) + " must have " +
                             std::to_string(n) + " entries");
        }
        for (int c = 0; c < n; ++c) {
            if (!j[i][c].is_number()) throw ParseError("matrix: non-numeric entry");
            m(i, c) = j[i][c].get<double>();
        }
    }
    return m;
}

GraphFile parse_graph(const json& j) {
    if (!j.is_object()) throw ParseError("graph file: expected a JSON object");
    GraphFile file;
    auto& g = file.graph;
    g.n = require_int(j, "n");
    g.num_nodes = require_int(j, "nodes");
    if (g.n < 2) throw ParseError("graph file: \"n\" must be >= 2");
    if (g.num_nodes < 1) throw ParseError("graph file: \"nodes\" must be >= 1");

    if (j.contains("anchors")) {
        if (!j["anchors"].is_array()) throw ParseError("graph file: \"anchors\" must be an array");
        for (const auto& a : j["anchors"]) {
            if (!a.is_number_integer()) throw ParseError("graph file: anchor must be an integer");
            const int idx = a.get<int>();
            if (idx < 1 || idx > g.num_nodes) {
                throw ParseError("graph file: anchor index " + std::to_string(idx) +
                                 " out of range 1.." + std::to_string(g.num_nodes));
            }
            g.anchors.push_back(idx - 1);
        }
        std::sort(g.anchors.begin(), g.anchors.end());
    }

    if (!j.contains("edges") || !j["edges"].is_array()) {
        throw ParseError("graph file: expected array field \"edges\"");
    }
    int line = 0;
    for (const auto& e : j["edges"]) {
        ++line;
        const std::string where = "edge " + std::to_string(line) + ": ";
        if (!e.is_object()) throw ParseError(where + "expected an object");
        const int i = require_int(e, "i");
        const int jj = require_int(e, "j");
        if (i < 1 || i > g.num_nodes || jj < 1 || jj > g.num_nodes) {
            throw ParseError(where + "node index out of range");
        }
        if (i == jj) throw ParseError(where + "self-loop");
        if (!e.contains("noise")) throw ParseError(where + "missing \"noise\"");
        graphcore::Edge edge;
        edge.i = std::min(i, jj) - 1;
        edge.j = std::max(i, jj) - 1;
        edge.model = noise_from_json(e["noise"], g.n);
        g.edges.push_back(std::move(edge));
    }
    try {
        g.validate();
    } catch (const Error& err) {
        throw ParseError(err.what());
    }

    if (j.contains("truth")) {
        if (!j["truth"].is_array() || static_cast<int>(j["truth"].size()) != g.num_nodes) {
            throw ParseError("graph file: \"truth\" must list one matrix per node");
        }
        songeom::RotationTuple truth;
        for (const auto& m : j["truth"]) truth.push_back(matrix_from_json(m, g.n));
        for (const auto& r : truth) {
            if (!songeom::is_rotation(r, 1e-9)) {
                throw ParseError("graph file: truth entry is not a rotation");
            }
        }
        file.truth = std::move(truth);
    }
    return file;
}

GraphFile load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open graph file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("graph file: ") + e.what());
    }
    return parse_graph(j);
}

json graph_to_json(const GraphFile& file) {
    const auto& g = file.graph;
    json j;
    j["n"] = g.n;
    j["nodes"] = g.num_nodes;
    json anchors = json::array();
    for (int a : g.anchors) anchors.push_back(a + 1);
    j["anchors"] = std::move(anchors);
    json edges = json::array();
    for (const auto& e : g.edges) {
        edges.push_back(json{{"i", e.i + 1}, {"j", e.j + 1}, {"noise", noise_to_json(e.model)}});
    }
    j["edges"] = std::move(edges);
    if (file.truth) {
        json truth = json::array();
        for (const auto& r : *file.truth) truth.push_back(matrix_to_json(r));
        j["truth"] = std::move(truth);
    }
    return j;
}

}  // namespace rotsync::graphio
