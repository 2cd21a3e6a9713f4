#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "congeo/descent.hpp"

namespace congeo {

struct ExperimentConfig {
  std::string name;
  nlohmann::json params;  // per-experiment scheme parameters
  DescentConfig descent;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  int threads = 1;
};

// validates the raw JSON {"experiment", "params", "descent", "out", "seed"}
ExperimentConfig parse_experiment_config(const nlohmann::json& j);

DescentConfig descent_config_from_json(const nlohmann::json& j,
                                       const DescentConfig& base);
nlohmann::json descent_config_to_json(const DescentConfig& cfg);

// dispatch on cfg.name; writes config.json, report.json, tables/, heatmaps/
nlohmann::json run_experiment(const ExperimentConfig& cfg);

nlohmann::json run_imbalanced_supcon(const ExperimentConfig& cfg);
nlohmann::json run_yaware_sphere(const ExperimentConfig& cfg);
nlohmann::json run_kernel_pca(const ExperimentConfig& cfg);
nlohmann::json run_quasi_optima(const ExperimentConfig& cfg);

// mean cosine per class block; the diagonal blocks exclude self-pairs
Eigen::MatrixXd block_mean_cosines(const Embedding& Z,
                                   const ClassPartition& p);
// smallest within-class cosine (class-collapse score)
double min_intra_cosine(const Embedding& Z, const ClassPartition& p);
// max |B_cc' + 1/(C-1)| over c != c'
double regularity_deviation(const Eigen::MatrixXd& block_means);

// consistent soft SupCon temperature: 1 + tau log(eps) = -1/(C-1)
double soft_supcon_tau_star(int C, double epsilon);

}  // namespace congeo
