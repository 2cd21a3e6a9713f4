#pragma once

#include <Eigen/Dense>
#include <vector>

#include "congeo/errors.hpp"

namespace congeo {

struct SimilaritySpec {
  enum class Kind { Euclidean, Spherical };
  Kind kind = Kind::Euclidean;
  double tau = 1.0;  // read only when kind == Spherical

  static SimilaritySpec euclidean() { return {Kind::Euclidean, 1.0}; }
  static SimilaritySpec spherical(double tau) {
    require(tau > 0.0, ErrorCode::InvalidArgument, "tau must be positive");
    return {Kind::Spherical, tau};
  }
};

struct Embedding {
  Eigen::MatrixXd z;  // n x q

  Embedding() = default;
  explicit Embedding(Eigen::MatrixXd m) : z(std::move(m)) {}
  int n() const { return static_cast<int>(z.rows()); }
  int q() const { return static_cast<int>(z.cols()); }
};

// Symmetric nonnegative pairwise weights. The diagonal is stored but never
// read by any loss or bound computation. Construction validates symmetry
// (then symmetrizes), nonnegativity, and well-conditioning: every row must
// have a strictly positive off-diagonal entry.
class WeightMatrix {
 public:
  explicit WeightMatrix(const Eigen::MatrixXd& raw);

  int n() const { return static_cast<int>(w_.rows()); }
  const Eigen::MatrixXd& mat() const { return w_; }
  bool has_zeros() const { return has_zeros_; }
  bool well_conditioned() const { return true; }  // enforced at construction
  // sum of off-diagonal entries of row i
  double row_sum(int i) const { return row_sums_(i); }
  const Eigen::VectorXd& row_sums() const { return row_sums_; }

 private:
  Eigen::MatrixXd w_;
  Eigen::VectorXd row_sums_;
  bool has_zeros_ = false;
};

// Symmetric matrix with zero diagonal; candidate (spherical) EDM. Entries
// are squared distances when the matrix certifies as an EDM.
class DissimilarityMatrix {
 public:
  explicit DissimilarityMatrix(const Eigen::MatrixXd& raw);

  int n() const { return static_cast<int>(d_.rows()); }
  const Eigen::MatrixXd& mat() const { return d_; }

 private:
  Eigen::MatrixXd d_;
};

// Classes are kept as contiguous index blocks internally; the permutation
// mapping block order back to the caller's order is recorded.
class ClassPartition {
 public:
  // contiguous blocks in the given order
  explicit ClassPartition(std::vector<int> sizes);
  // arbitrary per-sample assignment with class ids 0..C-1
  static ClassPartition from_assignment(const std::vector<int>& assignment);

  int C() const { return static_cast<int>(sizes_.size()); }
  int n() const { return n_; }
  const std::vector<int>& sizes() const { return sizes_; }
  int size(int c) const { return sizes_[c]; }
  // class of internal (block-order) index k
  int class_of(int k) const { return assignment_[k]; }
  const std::vector<int>& assignment() const { return assignment_; }
  // user index of internal index k
  int to_user(int k) const { return perm_[k]; }
  const std::vector<int>& permutation() const { return perm_; }
  // [begin, end) internal range of class c
  std::pair<int, int> block(int c) const;
  int min_size() const;

 private:
  ClassPartition() = default;
  int n_ = 0;
  std::vector<int> sizes_;
  std::vector<int> assignment_;  // internal order, contiguous
  std::vector<int> perm_;        // internal index -> user index
};

struct LabelSet {
  Eigen::MatrixXd y;  // n x ell, continuous labels

  LabelSet() = default;
  explicit LabelSet(Eigen::MatrixXd m) : y(std::move(m)) {}
  int n() const { return static_cast<int>(y.rows()); }
  int ell() const { return static_cast<int>(y.cols()); }
};

WeightMatrix validate_weight_matrix(const Eigen::MatrixXd& raw);

// d_ij = -log(w_ij); requires strictly positive off-diagonal weights
DissimilarityMatrix weights_to_dissimilarity(const WeightMatrix& W);
// w_ij = exp(-d_ij), unit diagonal
WeightMatrix dissimilarity_to_weights(const DissimilarityMatrix& D);

namespace detail {
// symmetry gate shared by WeightMatrix / DissimilarityMatrix:
// max |a_ij - a_ji| <= 1e-9 * max |a|, then (A + A^T)/2
Eigen::MatrixXd check_and_symmetrize(const Eigen::MatrixXd& raw,
                                     const char* what);
}  // namespace detail

}  // namespace congeo
