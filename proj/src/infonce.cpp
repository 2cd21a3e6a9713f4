#include "congeo/infonce.hpp"

#include <cmath>
#include <limits>

namespace congeo {

namespace {

constexpr double kAttainedTol = 1e-4;

void check_sizes(const WeightMatrix& W, const Eigen::MatrixXd& S) {
  require(S.rows() == S.cols(), ErrorCode::InvalidArgument,
          "similarity matrix must be square");
  require(W.n() == S.rows(), ErrorCode::SizeMismatch,
          "weights are " + std::to_string(W.n()) + "x" + std::to_string(W.n()) +
              ", similarities " + std::to_string(S.rows()) + "x" +
              std::to_string(S.cols()));
  require(S.allFinite(), ErrorCode::NonFinite, "non-finite similarity");
  const double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
  const double asym = (S - S.transpose()).cwiseAbs().maxCoeff();
  require(asym <= 1e-9 * scale, ErrorCode::InvalidArgument,
          "similarity matrix must be symmetric");
}

// exact mirror of the upper triangle; products are commutative so
// Z Z^T is already symmetric in exact arithmetic, this removes any
// residual evaluation-order asymmetry
void mirror_upper(Eigen::MatrixXd& M) {
  const int n = static_cast<int>(M.rows());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) M(j, i) = M(i, j);
}

}  // namespace

Eigen::MatrixXd similarity_matrix(const Embedding& Z,
                                  const SimilaritySpec& spec) {
  const int n = Z.n();
  require(n >= 1, ErrorCode::InvalidArgument, "empty embedding");
  require(Z.z.allFinite(), ErrorCode::NonFinite, "non-finite embedding");
  if (spec.kind == SimilaritySpec::Kind::Euclidean) {
    Eigen::MatrixXd G = Z.z * Z.z.transpose();
    mirror_upper(G);
    Eigen::VectorXd sq = G.diagonal();
    Eigen::MatrixXd S(n, n);
    for (int i = 0; i < n; ++i) {
      S(i, i) = 0.0;
      for (int j = i + 1; j < n; ++j) {
        const double d2 = sq(i) + sq(j) - 2.0 * G(i, j);
        S(i, j) = -d2;
        S(j, i) = -d2;
      }
    }
    return S;
  }
  require(spec.tau > 0.0, ErrorCode::InvalidArgument, "tau must be positive");
  Eigen::MatrixXd Zh(n, Z.q());
  for (int i = 0; i < n; ++i) {
    const double nrm = Z.z.row(i).norm();
    require(nrm > 0.0, ErrorCode::ZeroVector,
            "row " + std::to_string(i) + " has zero norm");
    Zh.row(i) = Z.z.row(i) / nrm;
  }
  Eigen::MatrixXd S = Zh * Zh.transpose();
  mirror_upper(S);
  S = S.cwiseMin(1.0).cwiseMax(-1.0);
  S /= spec.tau;
  S.diagonal().setConstant(1.0 / spec.tau);
  return S;
}

Eigen::MatrixXd pair_distribution(const WeightMatrix& W) {
  const int n = W.n();
  Eigen::MatrixXd P(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      P(i, j) = (i == j) ? 0.0 : W.mat()(i, j) / W.row_sum(i);
  }
  return P;
}

namespace detail {

double loss_from_pairs(const Eigen::MatrixXd& P, const Eigen::MatrixXd& S) {
  const int n = static_cast<int>(P.rows());
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j)
      if (j != i && S(i, j) > mx) mx = S(i, j);
    double se = 0.0;
    for (int j = 0; j < n; ++j)
      if (j != i) se += std::exp(S(i, j) - mx);
    const double lse = mx + std::log(se);
    double row = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i || P(i, j) == 0.0) continue;  // 0 * log 0 := 0
      row += P(i, j) * (lse - S(i, j));
    }
    total += row;
  }
  return total / n;
}

double bound_from_pairs(const Eigen::MatrixXd& P) {
  const int n = static_cast<int>(P.rows());
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) {
      const double p = P(i, j);
      if (j == i || p == 0.0) continue;
      row += p * std::log(p);
    }
    total += row;
  }
  return -total / n;
}

LossGrad loss_grad_from_pairs(const Eigen::MatrixXd& P, const Embedding& Z,
                              const SimilaritySpec& spec) {
  const int n = Z.n();
  const bool spherical = spec.kind == SimilaritySpec::Kind::Spherical;

  Eigen::MatrixXd Zh;
  Eigen::VectorXd norms;
  Eigen::MatrixXd Cos;
  Eigen::MatrixXd S;
  if (spherical) {
    Zh.resize(n, Z.q());
    norms.resize(n);
    for (int i = 0; i < n; ++i) {
      norms(i) = Z.z.row(i).norm();
      require(norms(i) > 0.0, ErrorCode::ZeroVector,
              "row " + std::to_string(i) + " has zero norm");
      Zh.row(i) = Z.z.row(i) / norms(i);
    }
    Cos = Zh * Zh.transpose();
    mirror_upper(Cos);
    Cos = Cos.cwiseMin(1.0).cwiseMax(-1.0);
    Cos.diagonal().setOnes();
    S = Cos / spec.tau;
  } else {
    Eigen::MatrixXd G = Z.z * Z.z.transpose();
    mirror_upper(G);
    Eigen::VectorXd sq = G.diagonal();
    S.resize(n, n);
    for (int i = 0; i < n; ++i) {
      S(i, i) = 0.0;
      for (int j = i + 1; j < n; ++j) {
        const double d2 = sq(i) + sq(j) - 2.0 * G(i, j);
        S(i, j) = -d2;
        S(j, i) = -d2;
      }
    }
  }

  // per-row softmax over j != i and the weighted cross-entropy
  Eigen::MatrixXd Q(n, n);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j)
      if (j != i && S(i, j) > mx) mx = S(i, j);
    double se = 0.0;
    for (int j = 0; j < n; ++j) {
      const double e = (j == i) ? 0.0 : std::exp(S(i, j) - mx);
      Q(i, j) = e;
      se += e;
    }
    Q.row(i) /= se;
    const double lse = mx + std::log(se);
    double row = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i || P(i, j) == 0.0) continue;
      row += P(i, j) * (lse - S(i, j));
    }
    total += row;
  }

  // dL/ds_ab = -(p_ab - q_ab)/n; symmetrize since s_ab = s_ba
  Eigen::MatrixXd G = (Q - P) / n;
  Eigen::MatrixXd H = G + G.transpose();

  LossGrad out;
  out.loss = total / n;
  if (spherical) {
    Eigen::MatrixXd HZ = H * Zh;
    Eigen::VectorXd rad = (H.array() * Cos.array()).rowwise().sum();
    out.grad.resize(n, Z.q());
    for (int i = 0; i < n; ++i)
      out.grad.row(i) =
          (HZ.row(i) - rad(i) * Zh.row(i)) / (spec.tau * norms(i));
  } else {
    Eigen::VectorXd hs = H.rowwise().sum();
    out.grad = -2.0 * (hs.asDiagonal() * Z.z - H * Z.z);
  }
  return out;
}

}  // namespace detail

double infonce_loss(const WeightMatrix& W, const Eigen::MatrixXd& S) {
  check_sizes(W, S);
  return detail::loss_from_pairs(pair_distribution(W), S);
}

double entropic_bound(const WeightMatrix& W) {
  return detail::bound_from_pairs(pair_distribution(W));
}

LossReport loss_gap(const WeightMatrix& W, const Embedding& Z,
                    const SimilaritySpec& spec) {
  require(W.n() == Z.n(), ErrorCode::SizeMismatch,
          "weights and embedding disagree on n");
  const Eigen::MatrixXd P = pair_distribution(W);
  const Eigen::MatrixXd S = similarity_matrix(Z, spec);
  LossReport rep;
  rep.loss = detail::loss_from_pairs(P, S);
  rep.bound = detail::bound_from_pairs(P);
  if (rep.bound > 0.0) {
    rep.gap = std::max(rep.loss / rep.bound - 1.0, 0.0);
    rep.ratio_undefined = false;
  } else {
    rep.gap = std::max(rep.loss - rep.bound, 0.0);
    rep.ratio_undefined = true;
  }
  rep.attained = rep.gap <= kAttainedTol;
  return rep;
}

Eigen::MatrixXd loss_gradient(const WeightMatrix& W, const Embedding& Z,
                              const SimilaritySpec& spec) {
  require(W.n() == Z.n(), ErrorCode::SizeMismatch,
          "weights and embedding disagree on n");
  return detail::loss_grad_from_pairs(pair_distribution(W), Z, spec).grad;
}

double fitted_log_shift(const WeightMatrix& W, const Eigen::MatrixXd& S) {
  check_sizes(W, S);
  const int n = W.n();
  double acc = 0.0;
  long count = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      require(W.mat()(i, j) > 0.0, ErrorCode::ZeroWeight,
              "shift fit needs dense weights");
      acc += S(i, j) - std::log(W.mat()(i, j));
      ++count;
    }
  return acc / static_cast<double>(count);
}

}  // namespace congeo
