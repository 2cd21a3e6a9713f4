#include "congeo/matrices.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace congeo {

namespace detail {

Eigen::MatrixXd check_and_symmetrize(const Eigen::MatrixXd& raw,
                                     const char* what) {
  require(raw.rows() == raw.cols(), ErrorCode::InvalidArgument,
          std::string(what) + ": matrix must be square");
  require(raw.rows() >= 1, ErrorCode::InvalidArgument,
          std::string(what) + ": empty matrix");
  require(raw.allFinite(), ErrorCode::NonFinite,
          std::string(what) + ": non-finite entry");
  const double scale = raw.cwiseAbs().maxCoeff();
  const double asym = (raw - raw.transpose()).cwiseAbs().maxCoeff();
  require(asym <= 1e-9 * scale || asym == 0.0, ErrorCode::AsymmetricInput,
          std::string(what) + ": asymmetry " + std::to_string(asym) +
              " exceeds tolerance");
  return (raw + raw.transpose()) / 2.0;
}

}  // namespace detail

WeightMatrix::WeightMatrix(const Eigen::MatrixXd& raw) {
  w_ = detail::check_and_symmetrize(raw, "weights");
  const int n = static_cast<int>(w_.rows());
  row_sums_.resize(n);
  has_zeros_ = false;
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double v = w_(i, j);
      require(v >= 0.0, ErrorCode::NegativeWeight,
              "w(" + std::to_string(i) + "," + std::to_string(j) + ") = " +
                  std::to_string(v));
      if (v == 0.0) has_zeros_ = true;
      s += v;
    }
    require(s > 0.0, ErrorCode::IllConditioned,
            "row " + std::to_string(i) + " has no positive off-diagonal entry");
    row_sums_(i) = s;
  }
}

DissimilarityMatrix::DissimilarityMatrix(const Eigen::MatrixXd& raw) {
  d_ = detail::check_and_symmetrize(raw, "dissimilarity");
  const double scale = std::max(1.0, d_.cwiseAbs().maxCoeff());
  const double diag = d_.diagonal().cwiseAbs().maxCoeff();
  require(diag <= 1e-9 * scale, ErrorCode::InvalidArgument,
          "diagonal must be zero, found " + std::to_string(diag));
  d_.diagonal().setZero();
}

ClassPartition::ClassPartition(std::vector<int> sizes) {
  require(!sizes.empty(), ErrorCode::InvalidArgument, "no classes");
  for (int s : sizes)
    require(s >= 1, ErrorCode::InvalidArgument, "class sizes must be >= 1");
  sizes_ = std::move(sizes);
  n_ = std::accumulate(sizes_.begin(), sizes_.end(), 0);
  assignment_.reserve(n_);
  for (int c = 0; c < C(); ++c)
    assignment_.insert(assignment_.end(), sizes_[c], c);
  perm_.resize(n_);
  std::iota(perm_.begin(), perm_.end(), 0);
}

ClassPartition ClassPartition::from_assignment(
    const std::vector<int>& assignment) {
  require(!assignment.empty(), ErrorCode::InvalidArgument, "no samples");
  const int n = static_cast<int>(assignment.size());
  const int C = *std::max_element(assignment.begin(), assignment.end()) + 1;
  for (int a : assignment)
    require(a >= 0 && a < C, ErrorCode::InvalidArgument,
            "class ids must be 0..C-1");
  std::vector<int> counts(C, 0);
  for (int a : assignment) counts[a]++;
  for (int c = 0; c < C; ++c)
    require(counts[c] >= 1, ErrorCode::InvalidArgument,
            "class " + std::to_string(c) + " is empty");

  ClassPartition p;
  p.n_ = n;
  p.sizes_ = counts;
  p.perm_.resize(n);
  std::iota(p.perm_.begin(), p.perm_.end(), 0);
  std::stable_sort(p.perm_.begin(), p.perm_.end(),
                   [&](int a, int b) { return assignment[a] < assignment[b]; });
  p.assignment_.resize(n);
  for (int k = 0; k < n; ++k) p.assignment_[k] = assignment[p.perm_[k]];
  return p;
}

std::pair<int, int> ClassPartition::block(int c) const {
  require(c >= 0 && c < C(), ErrorCode::InvalidArgument, "class out of range");
  int begin = 0;
  for (int i = 0; i < c; ++i) begin += sizes_[i];
  return {begin, begin + sizes_[c]};
}

int ClassPartition::min_size() const {
  return *std::min_element(sizes_.begin(), sizes_.end());
}

WeightMatrix validate_weight_matrix(const Eigen::MatrixXd& raw) {
  return WeightMatrix(raw);
}

DissimilarityMatrix weights_to_dissimilarity(const WeightMatrix& W) {
  const int n = W.n();
  const Eigen::MatrixXd& w = W.mat();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      require(w(i, j) > 0.0, ErrorCode::ZeroWeight,
              "w(" + std::to_string(i) + "," + std::to_string(j) +
                  ") = 0 has no finite dissimilarity");
      d(i, j) = -std::log(w(i, j));
    }
  return DissimilarityMatrix((d + d.transpose()) / 2.0);
}

WeightMatrix dissimilarity_to_weights(const DissimilarityMatrix& D) {
  Eigen::MatrixXd w = (-D.mat()).array().exp();
  return WeightMatrix(w);
}

}  // namespace congeo
