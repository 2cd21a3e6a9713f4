#include "congeo/metrics.hpp"

#include <cmath>

#include "congeo/distgeo.hpp"

namespace congeo {

double coefficient_of_similarity(const Embedding& Z, const Embedding& Zstar,
                                 const SimilaritySpec& spec) {
  require(Z.n() == Zstar.n(), ErrorCode::SizeMismatch,
          "embeddings disagree on n");
  const Eigen::MatrixXd S = similarity_matrix(Z, spec);
  const Eigen::MatrixXd T = similarity_matrix(Zstar, spec);
  const double n2 = static_cast<double>(T.size());
  const double mean = T.mean();
  const double var = (T.array() - mean).square().sum() / n2;
  require(var > 1e-30 * std::max(1.0, mean * mean), ErrorCode::DegenerateTarget,
          "target similarities have zero variance");
  const double resid = (S - T).squaredNorm() / n2;
  return 1.0 - resid / var;
}

MetricsReport full_report(const WeightMatrix& W, const Embedding& Z,
                          const Embedding& Zstar, const SimilaritySpec& spec,
                          const ClassPartition* groups) {
  MetricsReport rep;
  rep.delta = loss_gap(W, Z, spec);
  rep.r2_ssim = coefficient_of_similarity(Z, Zstar, spec);
  rep.r2_proc_rigid =
      procrustes_align(Z, Zstar, ProcrustesMode::rigid).r2;
  rep.r2_proc_linear =
      procrustes_align(Z, Zstar, ProcrustesMode::linear).r2;
  if (groups != nullptr)
    rep.r2_proc_local = grouped_procrustes(Z, Zstar, *groups);
  return rep;
}

}  // namespace congeo
