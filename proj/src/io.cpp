#include "congeo/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

namespace congeo {

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::IoError, "cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        fail(ErrorCode::IoError, path + ": bad number '" + cell + "'");
      }
    }
    if (row.empty()) continue;
    if (!rows.empty())
      require(row.size() == rows.front().size(), ErrorCode::IoError,
              path + ": ragged rows");
    rows.push_back(std::move(row));
  }
  require(!rows.empty(), ErrorCode::IoError, path + ": empty matrix");
  Eigen::MatrixXd M(rows.size(), rows.front().size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows[i].size(); ++j) M(i, j) = rows[i][j];
  return M;
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& M) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::IoError, "cannot write " + path);
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      if (j) out << ',';
      out << M(i, j);
    }
    out << '\n';
  }
  require(out.good(), ErrorCode::IoError, "write failed for " + path);
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  require(j.contains("data") && j["data"].is_array(), ErrorCode::BadConfig,
          "matrix JSON needs a 'data' array");
  const auto& data = j["data"];
  require(!data.empty(), ErrorCode::BadConfig, "empty matrix");
  const size_t cols = data[0].size();
  Eigen::MatrixXd M(data.size(), cols);
  for (size_t i = 0; i < data.size(); ++i) {
    require(data[i].is_array() && data[i].size() == cols, ErrorCode::BadConfig,
            "ragged matrix JSON");
    for (size_t k = 0; k < cols; ++k) M(i, k) = data[i][k].get<double>();
  }
  if (j.contains("n"))
    require(j["n"].get<int>() == static_cast<int>(M.rows()),
            ErrorCode::BadConfig, "matrix JSON 'n' mismatch");
  return M;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& M) {
  nlohmann::json data = nlohmann::json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    data.push_back(std::move(row));
  }
  return {{"n", M.rows()}, {"data", std::move(data)}};
}

void write_pgm(const std::string& path, const Eigen::MatrixXd& values) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::IoError, "cannot write " + path);
  out << "P2\n" << values.cols() << ' ' << values.rows() << "\n255\n";
  int per_line = 0;
  for (Eigen::Index i = 0; i < values.rows(); ++i)
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      int pix = static_cast<int>(
          std::floor((values(i, j) + 1.0) * 127.5 + 0.5));
      pix = std::clamp(pix, 0, 255);
      out << pix;
      if (++per_line == 16) {
        out << '\n';
        per_line = 0;
      } else {
        out << ' ';
      }
    }
  if (per_line) out << '\n';
  require(out.good(), ErrorCode::IoError, "write failed for " + path);
}

nlohmann::json to_json(const LossReport& rep) {
  return {{"loss", rep.loss},
          {"bound", rep.bound},
          {"gap", rep.gap},
          {"attained", rep.attained},
          {"ratio_undefined", rep.ratio_undefined}};
}

nlohmann::json to_json(const GeometryReport& rep) {
  nlohmann::json spectrum = nlohmann::json::array();
  for (Eigen::Index i = 0; i < rep.eigen_spectrum.size(); ++i)
    spectrum.push_back(rep.eigen_spectrum(i));
  nlohmann::json j = {{"is_edm", rep.is_edm},
                      {"embedding_dim", rep.embedding_dim},
                      {"is_spherical", rep.is_spherical},
                      {"rank_d", rep.rank_d},
                      {"eigen_spectrum", std::move(spectrum)}};
  if (rep.is_spherical)
    j["radius"] = rep.radius;
  else
    j["radius"] = nullptr;
  return j;
}

nlohmann::json to_json(const MetricsReport& rep) {
  nlohmann::json j = {{"delta_w", rep.delta.gap},
                      {"ratio_undefined", rep.delta.ratio_undefined},
                      {"loss", rep.delta.loss},
                      {"bound", rep.delta.bound},
                      {"attained", rep.delta.attained},
                      {"r2_ssim", rep.r2_ssim},
                      {"r2_proc_rigid", rep.r2_proc_rigid},
                      {"r2_proc_linear", rep.r2_proc_linear}};
  if (rep.r2_proc_local)
    j["r2_proc_local"] = *rep.r2_proc_local;
  else
    j["r2_proc_local"] = nullptr;
  return j;
}

nlohmann::json to_json(const PrototypeGeometry& geo) {
  return {{"C", geo.C},
          {"gram", matrix_to_json(geo.gram)["data"]},
          {"mu", matrix_to_json(geo.mu)["data"]}};
}

nlohmann::json to_json(const DescentTrace& trace) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : trace.checkpoints)
    points.push_back({{"step", p.step},
                      {"loss", p.loss},
                      {"gap", p.gap},
                      {"grad_norm", p.grad_norm}});
  return {{"converged", trace.converged},
          {"loss", trace.loss},
          {"gap", trace.gap},
          {"grad_norm", trace.grad_norm},
          {"ratio_undefined", trace.ratio_undefined},
          {"restart", trace.restart},
          {"accepted_steps", trace.accepted_steps},
          {"checkpoints", std::move(points)}};
}

void write_trace_jsonl(const std::string& path, const DescentTrace& trace) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::IoError, "cannot write " + path);
  for (const auto& p : trace.checkpoints) {
    nlohmann::json j = {{"step", p.step},
                        {"loss", p.loss},
                        {"gap", p.gap},
                        {"grad_norm", p.grad_norm}};
    out << j.dump() << '\n';
  }
  require(out.good(), ErrorCode::IoError, "write failed for " + path);
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::IoError, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::BadConfig, path + ": " + e.what());
  }
  return j;
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::IoError, "cannot write " + path);
  out << j.dump(2) << '\n';
  require(out.good(), ErrorCode::IoError, "write failed for " + path);
}

}  // namespace congeo
