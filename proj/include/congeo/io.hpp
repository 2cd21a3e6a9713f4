#pragma once

#include <Eigen/Dense>
#include <string>

#include <json.hpp>

#include "congeo/descent.hpp"
#include "congeo/distgeo.hpp"
#include "congeo/infonce.hpp"
#include "congeo/metrics.hpp"
#include "congeo/optima.hpp"

namespace congeo {

Eigen::MatrixXd read_matrix_csv(const std::string& path);
void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& M);

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);
nlohmann::json matrix_to_json(const Eigen::MatrixXd& M);

// P2 grayscale; pixel = floor((v + 1) * 127.5 + 0.5) clamped to [0, 255],
// mapping cosine -1..1 onto black..white
void write_pgm(const std::string& path, const Eigen::MatrixXd& values);

nlohmann::json to_json(const LossReport& rep);
nlohmann::json to_json(const GeometryReport& rep);
nlohmann::json to_json(const MetricsReport& rep);
nlohmann::json to_json(const PrototypeGeometry& geo);
nlohmann::json to_json(const DescentTrace& trace);

// one {step, loss, gap, grad_norm} object per line
void write_trace_jsonl(const std::string& path, const DescentTrace& trace);

nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace congeo
