#pragma once

#include <Eigen/Dense>

#include "congeo/matrices.hpp"

namespace congeo {

struct GeometryReport {
  bool is_edm = false;
  int embedding_dim = 0;  // r = rank of the centered Gram
  bool is_spherical = false;
  double radius = 0.0;  // meaningful only when is_spherical
  int rank_d = 0;
  Eigen::VectorXd eigen_spectrum;  // eigenvalues of B = -1/2 J D J, ascending
};

GeometryReport certify(const DissimilarityMatrix& D);

// classical realization from the top-r eigenpairs, zero-padded to q columns
Embedding realize_euclidean(const DissimilarityMatrix& D, int q);

// unit-norm points with cos(z_i, z_j) = 1 - tau * d_ij
Embedding realize_spherical(const DissimilarityMatrix& D, double tau, int q);

enum class ProcrustesMode { rigid, linear };

struct ProcrustesResult {
  Eigen::MatrixXd omega;  // q x q orthogonal
  Eigen::VectorXd b;      // translation (zero in linear mode)
  double r2 = 0.0;
};

// best || omega z_i + b - z*_i || fit over the full orthogonal group
ProcrustesResult procrustes_align(const Embedding& Z, const Embedding& Zstar,
                                  ProcrustesMode mode);

// per-class rigid alignment pooled into one r^2
double grouped_procrustes(const Embedding& Z, const Embedding& Zstar,
                          const ClassPartition& groups);

}  // namespace congeo
