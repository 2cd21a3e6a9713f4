#pragma once

#include <Eigen/Dense>

#include "congeo/matrices.hpp"

namespace congeo {

struct PrototypeGeometry {
  int C = 0;
  Eigen::MatrixXd mu;    // C x q unit prototypes
  Eigen::MatrixXd gram;  // C x C cosine matrix
};

// labels zero-padded to q columns; attains the bound for
// w = exp(-||y_i - y_j||^2) under the Euclidean similarity
Embedding optimum_euclidean_labels(const LabelSet& labels, int q);

// rows (y_i/||y_i||, sqrt(tau'/tau - 1), 0, ...); attains the bound for
// xclr weights at temperature tau' under Spherical(tau)
Embedding optimum_xclr(const LabelSet& labels, double tau, double tau_prime,
                       int q);

// full class collapse onto simplex prototypes with pairwise cosine
// beta = 1 + tau log(epsilon)
Embedding optimum_soft_supcon(const ClassPartition& p, double epsilon,
                              double tau, int q);

// reduced prototype optimization over unit vectors in R^C
PrototypeGeometry optimum_hard_supcon(const ClassPartition& p, double tau,
                                      int q);

// the reduced objective L(mu) evaluated at a prototype Gram
double hard_supcon_reduced_loss(const ClassPartition& p, double tau,
                                const Eigen::MatrixXd& gram);

// z_i = m * mu_{c_i}; near-optimal for Hard SupCon under the Euclidean
// similarity as m grows
Embedding quasi_optimum_euclidean_supcon(const ClassPartition& p,
                                         const Eigen::MatrixXd& prototypes,
                                         double m);

// C unit vectors with pairwise cosine -1/(C-1) and zero sum
PrototypeGeometry regular_simplex(int C, int q);

// coordinate concatenation; squared distances add
Embedding product_geometry(const Embedding& A, const Embedding& B);

}  // namespace congeo
