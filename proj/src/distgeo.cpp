#include "congeo/distgeo.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

namespace congeo {

namespace {

constexpr double kRankRel = 1e-8;

struct Certification {
  GeometryReport report;
  Eigen::MatrixXd generators;  // n x r when is_edm, recentered later
};

// circumcenter of rows of P by least squares on
// 2 <a, p_i - p_0> = ||p_i||^2 - ||p_0||^2
bool circumcenter(const Eigen::MatrixXd& P, Eigen::VectorXd& center,
                  double& radius) {
  const int n = static_cast<int>(P.rows());
  const int r = static_cast<int>(P.cols());
  if (r == 0 || n < 2) return false;
  Eigen::MatrixXd A(n - 1, r);
  Eigen::VectorXd rhs(n - 1);
  const double sq0 = P.row(0).squaredNorm();
  for (int i = 1; i < n; ++i) {
    A.row(i - 1) = 2.0 * (P.row(i) - P.row(0));
    rhs(i - 1) = P.row(i).squaredNorm() - sq0;
  }
  center = A.colPivHouseholderQr().solve(rhs);
  Eigen::VectorXd dist(n);
  for (int i = 0; i < n; ++i)
    dist(i) = (P.row(i).transpose() - center).norm();
  radius = dist.mean();
  if (radius <= 0.0) return false;
  return (dist.array() - radius).abs().maxCoeff() <= 1e-6 * radius;
}

Certification certify_impl(const DissimilarityMatrix& D) {
  const int n = D.n();
  const Eigen::MatrixXd& d = D.mat();

  Eigen::MatrixXd J =
      Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / n);
  Eigen::MatrixXd B = -0.5 * J * d * J;
  B = (B + B.transpose()) / 2.0;

  Certification cert;
  GeometryReport& rep = cert.report;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
  rep.eigen_spectrum = es.eigenvalues();
  const double lmax = std::max(1.0, rep.eigen_spectrum.maxCoeff());
  const double tol = kRankRel * lmax;
  rep.is_edm = rep.eigen_spectrum.minCoeff() >= -tol;
  int r = 0;
  for (int i = 0; i < n; ++i)
    if (rep.eigen_spectrum(i) > tol) ++r;
  rep.embedding_dim = r;

  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ed(d,
                                                      Eigen::EigenvaluesOnly);
    const double dmax = std::max(1.0, ed.eigenvalues().cwiseAbs().maxCoeff());
    rep.rank_d = 0;
    for (int i = 0; i < n; ++i)
      if (std::abs(ed.eigenvalues()(i)) > kRankRel * dmax) ++rep.rank_d;
  }

  rep.is_spherical = false;
  rep.radius = 0.0;
  if (!rep.is_edm || r == 0) return cert;

  // classical realization: eigenvalues ascending, take the top r
  Eigen::MatrixXd P(n, r);
  for (int k = 0; k < r; ++k) {
    const int idx = n - 1 - k;
    P.col(k) = es.eigenvectors().col(idx) *
               std::sqrt(std::max(rep.eigen_spectrum(idx), 0.0));
  }
  cert.generators = P;

  // rank criterion needs r <= n-2; at r = n-1 the circumcenter check alone
  // decides
  bool rank_ok = (r <= n - 2) ? (rep.rank_d == r + 1) : true;
  if (rank_ok) {
    Eigen::VectorXd center;
    double radius = 0.0;
    if (circumcenter(P, center, radius)) {
      rep.is_spherical = true;
      rep.radius = radius;
    }
  }
  return cert;
}

}  // namespace

GeometryReport certify(const DissimilarityMatrix& D) {
  return certify_impl(D).report;
}

Embedding realize_euclidean(const DissimilarityMatrix& D, int q) {
  require(q >= 1, ErrorCode::InvalidArgument, "q must be >= 1");
  Certification cert = certify_impl(D);
  require(cert.report.is_edm, ErrorCode::NotEDM,
          "matrix is not a Euclidean distance matrix");
  const int r = cert.report.embedding_dim;
  require(r <= q, ErrorCode::DimensionTooSmall,
          "embedding dimension " + std::to_string(r) + " exceeds q = " +
              std::to_string(q));
  Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(D.n(), q);
  if (r > 0) Z.leftCols(r) = cert.generators;
  return Embedding(std::move(Z));
}

Embedding realize_spherical(const DissimilarityMatrix& D, double tau, int q) {
  require(tau > 0.0, ErrorCode::InvalidArgument, "tau must be positive");
  require(q >= 1, ErrorCode::InvalidArgument, "q must be >= 1");
  Certification cert = certify_impl(D);
  require(cert.report.is_edm && cert.report.is_spherical,
          ErrorCode::NotSphericalEDM, "matrix is not a spherical EDM");
  const int n = D.n();
  const int r = cert.report.embedding_dim;
  require(r <= q, ErrorCode::DimensionTooSmall,
          "embedding dimension " + std::to_string(r) + " exceeds q = " +
              std::to_string(q));

  const double rho = cert.report.radius;
  double radicand = 1.0 / (2.0 * tau) - rho * rho;
  // Theorem equality case rho = 1/sqrt(2 tau): rounding must not yield NaN
  if (std::abs(radicand) <= 1e-12) radicand = 0.0;
  require(radicand >= 0.0, ErrorCode::RadiusTooLarge,
          "sphere radius " + std::to_string(rho) + " exceeds 1/sqrt(2 tau)");
  const double h = std::sqrt(radicand);
  require(h == 0.0 || r < q, ErrorCode::DimensionTooSmall,
          "padding coordinate needs one extra dimension");

  // recenter generators on the circumcenter so every row has norm rho
  Eigen::VectorXd center;
  double rho_check = 0.0;
  circumcenter(cert.generators, center, rho_check);
  Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(n, q);
  Z.leftCols(r) = cert.generators.rowwise() - center.transpose();
  if (h > 0.0) Z.col(r).setConstant(h);
  Z *= std::sqrt(2.0 * tau);
  for (int i = 0; i < n; ++i) Z.row(i) /= Z.row(i).norm();
  return Embedding(std::move(Z));
}

ProcrustesResult procrustes_align(const Embedding& Z, const Embedding& Zstar,
                                  ProcrustesMode mode) {
  require(Z.n() == Zstar.n(), ErrorCode::SizeMismatch,
          "embeddings disagree on n");
  require(Z.q() == Zstar.q(), ErrorCode::SizeMismatch,
          "embeddings disagree on q");
  const int n = Z.n();
  const int q = Z.q();

  Eigen::RowVectorXd mz = Eigen::RowVectorXd::Zero(q);
  Eigen::RowVectorXd ms = Eigen::RowVectorXd::Zero(q);
  if (mode == ProcrustesMode::rigid) {
    mz = Z.z.colwise().mean();
    ms = Zstar.z.colwise().mean();
  }
  Eigen::MatrixXd Zc = Z.z.rowwise() - mz;
  Eigen::MatrixXd Sc = Zstar.z.rowwise() - ms;

  const double var = Sc.squaredNorm() / n;
  const double scale = std::max(1.0, Zstar.z.squaredNorm() / n);
  require(var > 1e-30 * scale, ErrorCode::DegenerateTarget,
          "target has zero similarity variance under alignment");

  Eigen::MatrixXd M = Sc.transpose() * Zc;  // q x q cross-covariance
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  ProcrustesResult res;
  res.omega = svd.matrixU() * svd.matrixV().transpose();
  res.b = mode == ProcrustesMode::rigid
              ? (ms.transpose() - res.omega * mz.transpose()).eval()
              : Eigen::VectorXd::Zero(q).eval();
  const double resid =
      (Zc * res.omega.transpose() - Sc).squaredNorm() / n;
  res.r2 = 1.0 - resid / var;
  return res;
}

double grouped_procrustes(const Embedding& Z, const Embedding& Zstar,
                          const ClassPartition& groups) {
  require(Z.n() == Zstar.n(), ErrorCode::SizeMismatch,
          "embeddings disagree on n");
  require(groups.n() == Z.n(), ErrorCode::SizeMismatch,
          "partition does not cover the embedding");
  double resid_total = 0.0;
  double var_total = 0.0;
  for (int c = 0; c < groups.C(); ++c) {
    auto [b, e] = groups.block(c);
    const int m = e - b;
    Embedding zg(Z.z.middleRows(b, m));
    Embedding sg(Zstar.z.middleRows(b, m));
    ProcrustesResult pr = procrustes_align(zg, sg, ProcrustesMode::rigid);
    Eigen::RowVectorXd msg = sg.z.colwise().mean();
    const double var = (sg.z.rowwise() - msg).squaredNorm();
    resid_total += (1.0 - pr.r2) * var;
    var_total += var;
  }
  require(var_total > 0.0, ErrorCode::DegenerateTarget,
          "all groups have zero target variance");
  return 1.0 - resid_total / var_total;
}

}  // namespace congeo
