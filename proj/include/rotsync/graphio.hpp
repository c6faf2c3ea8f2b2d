#pragma once

#include <istream>
#include <optional>
#include <string>

#include <json.hpp>

#include "rotsync/graphcore.hpp"
#include "rotsync/songeom.hpp"

// Graph-file schema shared by the CLI and tests. Node indices are 1-based
// in files and converted to 0-based internally.
namespace rotsync::graphio {

struct GraphFile {
    graphcore::MeasurementGraph graph;
    std::optional<songeom::RotationTuple> truth;
};

nlohmann::json noise_to_json(const noise::NoiseModel& model);
noise::NoiseModel noise_from_json(const nlohmann::json& j, int n);

GraphFile parse_graph(const nlohmann::json& j);
GraphFile load_graph(const std::string& path);
nlohmann::json graph_to_json(const GraphFile& file);

/// Row-major matrix serialization used inside graph and rotation files.
nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, int n);

}  // namespace rotsync::graphio
