#pragma once

#include <optional>

#include "congeo/infonce.hpp"
#include "congeo/matrices.hpp"

namespace congeo {

struct MetricsReport {
  LossReport delta;  // delta.gap is the loss gap Delta_W
  double r2_ssim = 0.0;
  double r2_proc_rigid = 0.0;
  double r2_proc_linear = 0.0;
  std::optional<double> r2_proc_local;
};

// r^2 of s(z_i, z_j) as a predictor of s(z*_i, z*_j) over all n^2 pairs,
// diagonal included; biased variance normalization
double coefficient_of_similarity(const Embedding& Z, const Embedding& Zstar,
                                 const SimilaritySpec& spec);

MetricsReport full_report(const WeightMatrix& W, const Embedding& Z,
                          const Embedding& Zstar, const SimilaritySpec& spec,
                          const ClassPartition* groups = nullptr);

}  // namespace congeo
