#include "congeo/weights.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace congeo {

WeightMatrix supcon_weights(const ClassPartition& p) {
  require(p.min_size() >= 2, ErrorCode::SingletonClass,
          "every class needs at least 2 members");
  const int n = p.n();
  Eigen::MatrixXd w(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      w(i, j) = p.class_of(i) == p.class_of(j) ? 1.0 : 0.0;
  return WeightMatrix(w);
}

WeightMatrix soft_supcon_weights(const ClassPartition& p, double epsilon) {
  require(epsilon > 0.0 && epsilon < 1.0, ErrorCode::BadEpsilon,
          "epsilon must lie in (0,1)");
  const int n = p.n();
  Eigen::MatrixXd w(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      w(i, j) = p.class_of(i) == p.class_of(j) ? 1.0 : epsilon;
  return WeightMatrix(w);
}

WeightMatrix y_aware_weights(const LabelSet& labels) {
  const int n = labels.n();
  require(n >= 2, ErrorCode::InvalidArgument, "need at least 2 samples");
  require(labels.y.allFinite(), ErrorCode::NonFinite, "non-finite label");
  Eigen::MatrixXd w(n, n);
  for (int i = 0; i < n; ++i) {
    w(i, i) = 1.0;
    for (int j = i + 1; j < n; ++j) {
      const double d2 = (labels.y.row(i) - labels.y.row(j)).squaredNorm();
      w(i, j) = std::exp(-d2);
      w(j, i) = w(i, j);
    }
  }
  return WeightMatrix(w);
}

WeightMatrix xclr_weights(const LabelSet& labels, double tau_prime) {
  require(tau_prime > 0.0, ErrorCode::InvalidArgument,
          "tau' must be positive");
  const int n = labels.n();
  require(n >= 2, ErrorCode::InvalidArgument, "need at least 2 samples");
  require(labels.y.allFinite(), ErrorCode::NonFinite, "non-finite label");
  Eigen::MatrixXd yh(n, labels.ell());
  for (int i = 0; i < n; ++i) {
    const double nrm = labels.y.row(i).norm();
    require(nrm > 0.0, ErrorCode::ZeroLabelVector,
            "label row " + std::to_string(i) + " is zero");
    yh.row(i) = labels.y.row(i) / nrm;
  }
  Eigen::MatrixXd w(n, n);
  for (int i = 0; i < n; ++i) {
    w(i, i) = std::exp(1.0 / tau_prime);
    for (int j = i + 1; j < n; ++j) {
      double c = yh.row(i).dot(yh.row(j));
      c = std::min(1.0, std::max(-1.0, c));
      w(i, j) = std::exp(c / tau_prime);
      w(j, i) = w(i, j);
    }
  }
  return WeightMatrix(w);
}

WeightMatrix kernel_weights(const Eigen::MatrixXd& K) {
  Eigen::MatrixXd Ks = detail::check_and_symmetrize(K, "kernel");
  const int n = static_cast<int>(Ks.rows());
  require(n >= 2, ErrorCode::InvalidArgument, "need at least 2 samples");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Ks,
                                                    Eigen::EigenvaluesOnly);
  const double lmax = std::max(1.0, es.eigenvalues().maxCoeff());
  require(es.eigenvalues().minCoeff() >= -1e-8 * lmax, ErrorCode::NotPSD,
          "kernel has negative eigenvalue " +
              std::to_string(es.eigenvalues().minCoeff()));
  Eigen::MatrixXd w(n, n);
  for (int i = 0; i < n; ++i) {
    w(i, i) = 1.0;
    for (int j = i + 1; j < n; ++j) {
      const double d = Ks(i, i) + Ks(j, j) - 2.0 * Ks(i, j);
      w(i, j) = std::exp(-d);
      w(j, i) = w(i, j);
    }
  }
  return WeightMatrix(w);
}

WeightMatrix combine_weights(const WeightMatrix& A, const WeightMatrix& B) {
  require(A.n() == B.n(), ErrorCode::SizeMismatch,
          "factors are " + std::to_string(A.n()) + " and " +
              std::to_string(B.n()) + " samples");
  return WeightMatrix(A.mat().cwiseProduct(B.mat()));
}

}  // namespace congeo
