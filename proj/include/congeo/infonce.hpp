#pragma once

#include <Eigen/Dense>

#include "congeo/matrices.hpp"

namespace congeo {

struct LossReport {
  double loss = 0.0;
  double bound = 0.0;
  // relative gap loss/bound - 1; absolute gap loss - bound when the bound
  // is zero (ratio_undefined set)
  double gap = 0.0;
  bool attained = false;  // gap <= 1e-4
  bool ratio_undefined = false;
};

// s_ij = -||z_i - z_j||^2 (Euclidean) or cos(z_i, z_j)/tau (Spherical);
// exactly symmetric, diagonal 0 resp. 1/tau
Eigen::MatrixXd similarity_matrix(const Embedding& Z,
                                  const SimilaritySpec& spec);

double infonce_loss(const WeightMatrix& W, const Eigen::MatrixXd& S);

// H(p_W), the minimum achievable loss over all similarity matrices
double entropic_bound(const WeightMatrix& W);

LossReport loss_gap(const WeightMatrix& W, const Embedding& Z,
                    const SimilaritySpec& spec);

Eigen::MatrixXd loss_gradient(const WeightMatrix& W, const Embedding& Z,
                              const SimilaritySpec& spec);

struct LossGrad {
  double loss = 0.0;
  Eigen::MatrixXd grad;
};

// row-normalized off-diagonal weights p_ij = w_ij / sum_{k != i} w_ik
Eigen::MatrixXd pair_distribution(const WeightMatrix& W);

// least-squares shift c for the attainment family s_ij = log w_ij + c;
// requires strictly positive off-diagonal weights
double fitted_log_shift(const WeightMatrix& W, const Eigen::MatrixXd& S);

namespace detail {
// shared loss/gradient path (descent hot loop); P = pair_distribution(W)
double loss_from_pairs(const Eigen::MatrixXd& P, const Eigen::MatrixXd& S);
LossGrad loss_grad_from_pairs(const Eigen::MatrixXd& P, const Embedding& Z,
                              const SimilaritySpec& spec);
double bound_from_pairs(const Eigen::MatrixXd& P);
}  // namespace detail

}  // namespace congeo
