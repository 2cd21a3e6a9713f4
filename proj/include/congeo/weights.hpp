#pragma once

#include <Eigen/Dense>

#include "congeo/matrices.hpp"

namespace congeo {

// w_ij = 1 same class, 0 otherwise; every class needs >= 2 members so each
// row keeps a positive off-diagonal entry
WeightMatrix supcon_weights(const ClassPartition& p);

// w_ij = 1 same class, epsilon in (0,1) otherwise
WeightMatrix soft_supcon_weights(const ClassPartition& p, double epsilon);

// w_ij = exp(-||y_i - y_j||^2)
WeightMatrix y_aware_weights(const LabelSet& labels);

// w_ij = exp(cos(y_i, y_j)/tau')
WeightMatrix xclr_weights(const LabelSet& labels, double tau_prime);

// w_ij = exp(-(k_ii + k_jj - 2 k_ij)) for a PSD kernel K
WeightMatrix kernel_weights(const Eigen::MatrixXd& K);

// Hadamard product: dissimilarities add across schemes
WeightMatrix combine_weights(const WeightMatrix& A, const WeightMatrix& B);

}  // namespace congeo
