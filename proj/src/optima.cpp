#include "congeo/optima.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "congeo/distgeo.hpp"
#include "congeo/rng.hpp"

namespace congeo {

namespace {

// unit-row realization of a PSD Gram, padded to q columns
Eigen::MatrixXd realize_gram(const Eigen::MatrixXd& G, int q) {
  const int C = static_cast<int>(G.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  const double lmax = std::max(1.0, es.eigenvalues().maxCoeff());
  Eigen::MatrixXd mu = Eigen::MatrixXd::Zero(C, q);
  int col = 0;
  for (int k = C - 1; k >= 0 && col < q; --k) {
    const double lam = es.eigenvalues()(k);
    if (lam <= 1e-8 * lmax) break;
    mu.col(col++) = es.eigenvectors().col(k) * std::sqrt(lam);
  }
  for (int i = 0; i < C; ++i) {
    const double nrm = mu.row(i).norm();
    if (nrm > 0.0) mu.row(i) /= nrm;
  }
  return mu;
}

struct ReducedEval {
  double loss = 0.0;
  Eigen::MatrixXd grad;  // C x dim, Euclidean gradient w.r.t. mu
};

// L(mu) = (1/n) sum_c l_c log((l_c - 1) + sum_{c' != c} l_c' e^{(G_cc'-1)/tau}),
// the spec form with e^{1/tau} factored out of the log; exponents stay <= 0
ReducedEval reduced_eval(const Eigen::MatrixXd& mu,
                         const std::vector<int>& sizes, double tau, int n) {
  const int C = static_cast<int>(sizes.size());
  Eigen::MatrixXd G = mu * mu.transpose();
  Eigen::MatrixXd E(C, C);
  for (int a = 0; a < C; ++a)
    for (int b = 0; b < C; ++b)
      E(a, b) = (a == b) ? 0.0 : std::exp((G(a, b) - 1.0) / tau);

  Eigen::VectorXd den(C);
  double loss = 0.0;
  for (int c = 0; c < C; ++c) {
    double s = sizes[c] - 1.0;
    for (int cp = 0; cp < C; ++cp)
      if (cp != c) s += sizes[cp] * E(c, cp);
    den(c) = s;
    loss += sizes[c] * std::log(s);
  }
  loss /= n;

  ReducedEval out;
  out.loss = loss;
  out.grad = Eigen::MatrixXd::Zero(mu.rows(), mu.cols());
  for (int c = 0; c < C; ++c)
    for (int cp = 0; cp < C; ++cp) {
      if (cp == c) continue;
      const double coef = sizes[c] * sizes[cp] * E(c, cp) *
                          (1.0 / den(c) + 1.0 / den(cp)) / (n * tau);
      out.grad.row(c) += coef * mu.row(cp);
    }
  return out;
}

}  // namespace

Embedding optimum_euclidean_labels(const LabelSet& labels, int q) {
  require(labels.ell() <= q, ErrorCode::DimensionTooSmall,
          "label dimension " + std::to_string(labels.ell()) + " exceeds q = " +
              std::to_string(q));
  Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(labels.n(), q);
  Z.leftCols(labels.ell()) = labels.y;
  return Embedding(std::move(Z));
}

Embedding optimum_xclr(const LabelSet& labels, double tau, double tau_prime,
                       int q) {
  require(tau > 0.0 && tau_prime > 0.0, ErrorCode::InvalidArgument,
          "temperatures must be positive");
  require(tau <= tau_prime, ErrorCode::TemperatureOrder,
          "requires tau <= tau'");
  require(labels.ell() < q, ErrorCode::DimensionTooSmall,
          "needs q > label dimension for the padding coordinate");
  const int n = labels.n();
  const double h = std::sqrt(std::max(tau_prime / tau - 1.0, 0.0));
  Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(n, q);
  for (int i = 0; i < n; ++i) {
    const double nrm = labels.y.row(i).norm();
    require(nrm > 0.0, ErrorCode::ZeroLabelVector,
            "label row " + std::to_string(i) + " is zero");
    Z.row(i).head(labels.ell()) = labels.y.row(i) / nrm;
    Z(i, labels.ell()) = h;
  }
  return Embedding(std::move(Z));
}

Embedding optimum_soft_supcon(const ClassPartition& p, double epsilon,
                              double tau, int q) {
  require(epsilon > 0.0 && epsilon < 1.0, ErrorCode::BadEpsilon,
          "epsilon must lie in (0,1)");
  require(tau > 0.0, ErrorCode::InvalidArgument, "tau must be positive");
  const int C = p.C();
  require(C >= 2, ErrorCode::InvalidArgument, "need at least 2 classes");
  require(C <= q, ErrorCode::DimensionTooSmall,
          "needs q >= C = " + std::to_string(C));
  const double beta = 1.0 + tau * std::log(epsilon);
  require(beta >= -1.0 / (C - 1) - 1e-12, ErrorCode::InfeasibleBeta,
          "beta = " + std::to_string(beta) + " below -1/(C-1)");

  // prototype spherical EDM: d = (1 - beta)/tau between distinct classes
  const double d = (1.0 - beta) / tau;
  Eigen::MatrixXd D = Eigen::MatrixXd::Constant(C, C, d);
  D.diagonal().setZero();
  Embedding mu = realize_spherical(DissimilarityMatrix(D), tau, q);

  Eigen::MatrixXd Z(p.n(), q);
  for (int i = 0; i < p.n(); ++i) Z.row(i) = mu.z.row(p.class_of(i));
  return Embedding(std::move(Z));
}

double hard_supcon_reduced_loss(const ClassPartition& p, double tau,
                                const Eigen::MatrixXd& gram) {
  require(gram.rows() == p.C() && gram.cols() == p.C(),
          ErrorCode::SizeMismatch, "gram must be C x C");
  const int C = p.C();
  double loss = 0.0;
  for (int c = 0; c < C; ++c) {
    double s = p.size(c) - 1.0;
    for (int cp = 0; cp < C; ++cp)
      if (cp != c) s += p.size(cp) * std::exp((gram(c, cp) - 1.0) / tau);
    loss += p.size(c) * std::log(s);
  }
  return loss / p.n();
}

PrototypeGeometry optimum_hard_supcon(const ClassPartition& p, double tau,
                                      int q) {
  require(tau > 0.0, ErrorCode::InvalidArgument, "tau must be positive");
  const int C = p.C();
  require(C >= 2, ErrorCode::InvalidArgument, "need at least 2 classes");
  require(p.min_size() >= 2, ErrorCode::SingletonClass,
          "every class needs at least 2 members");
  require(C <= q, ErrorCode::DimensionTooSmall,
          "needs q >= C = " + std::to_string(C));

  // Burer-Monteiro factorization: prototypes live in R^C, which loses no
  // solutions since the optimal Gram has rank <= C
  constexpr int kRestarts = 8;
  constexpr int kBudget = 50000;
  constexpr double kStep0 = 0.1;
  constexpr double kDecay = 0.5;
  constexpr double kGradTol = 1e-6;
  constexpr std::uint64_t kSeed = 2026;

  const int n = p.n();
  Eigen::MatrixXd best_mu;
  double best_loss = std::numeric_limits<double>::infinity();
  double best_grad = std::numeric_limits<double>::infinity();

  for (int restart = 0; restart < kRestarts; ++restart) {
    Rng rng(kSeed + restart);
    Eigen::MatrixXd mu = rng.gaussian(C, C);
    for (int i = 0; i < C; ++i) mu.row(i) /= mu.row(i).norm();

    ReducedEval ev = reduced_eval(mu, p.sizes(), tau, n);
    double eta = kStep0;
    int decays = 0;
    double grad_norm = 0.0;
    for (int it = 0; it < kBudget; ++it) {
      // tangent projection, then renormalize after the step
      Eigen::MatrixXd g = ev.grad;
      for (int i = 0; i < C; ++i)
        g.row(i) -= g.row(i).dot(mu.row(i)) * mu.row(i);
      grad_norm = g.norm();
      if (grad_norm <= kGradTol) break;

      double t = eta;
      bool accepted = false;
      for (int h = 0; h < 31; ++h) {
        Eigen::MatrixXd cand = mu - t * g;
        for (int i = 0; i < C; ++i) cand.row(i) /= cand.row(i).norm();
        ReducedEval ce = reduced_eval(cand, p.sizes(), tau, n);
        if (ce.loss < ev.loss) {
          mu = std::move(cand);
          ev = std::move(ce);
          accepted = true;
          break;
        }
        t /= 2.0;
      }
      if (accepted) {
        eta = std::min(t * 2.0, 1e6);
        decays = 0;
      } else {
        eta *= kDecay;
        if (++decays >= 3) break;
      }
    }
    if (ev.loss < best_loss) {
      best_loss = ev.loss;
      best_mu = mu;
      best_grad = grad_norm;
    }
  }
  require(best_grad <= kGradTol, ErrorCode::NonConvergence,
          "reduced optimizer gradient norm " + std::to_string(best_grad) +
              " after budget");

  PrototypeGeometry geo;
  geo.C = C;
  geo.gram = best_mu * best_mu.transpose();
  geo.gram = ((geo.gram + geo.gram.transpose()) / 2.0).eval();
  geo.gram = geo.gram.cwiseMin(1.0).cwiseMax(-1.0);
  geo.gram.diagonal().setOnes();
  geo.mu = realize_gram(geo.gram, q);
  return geo;
}

Embedding quasi_optimum_euclidean_supcon(const ClassPartition& p,
                                         const Eigen::MatrixXd& prototypes,
                                         double m) {
  require(m >= 0.0, ErrorCode::InvalidArgument, "m must be nonnegative");
  require(prototypes.rows() == p.C(), ErrorCode::SizeMismatch,
          "need one prototype per class");
  const int C = p.C();
  double scale = std::max(1.0, prototypes.cwiseAbs().maxCoeff());
  for (int a = 0; a < C; ++a)
    for (int b = a + 1; b < C; ++b)
      require((prototypes.row(a) - prototypes.row(b)).norm() > 1e-12 * scale,
              ErrorCode::DuplicatePrototypes,
              "prototypes " + std::to_string(a) + " and " + std::to_string(b) +
                  " coincide");
  Eigen::MatrixXd Z(p.n(), prototypes.cols());
  for (int i = 0; i < p.n(); ++i)
    Z.row(i) = m * prototypes.row(p.class_of(i));
  return Embedding(std::move(Z));
}

PrototypeGeometry regular_simplex(int C, int q) {
  require(C >= 2, ErrorCode::InvalidArgument, "need C >= 2");
  require(C <= q + 1, ErrorCode::DimensionTooSmall,
          "a regular " + std::to_string(C) + "-simplex needs q >= C-1");
  const double a = 1.0 / (C - 1);
  Eigen::MatrixXd G = Eigen::MatrixXd::Constant(C, C, -a);
  G.diagonal().setConstant(1.0);
  PrototypeGeometry geo;
  geo.C = C;
  geo.gram = G;
  geo.mu = realize_gram(G, q);
  return geo;
}

Embedding product_geometry(const Embedding& A, const Embedding& B) {
  require(A.n() == B.n(), ErrorCode::SizeMismatch,
          "factors disagree on n");
  Eigen::MatrixXd Z(A.n(), A.q() + B.q());
  Z.leftCols(A.q()) = A.z;
  Z.rightCols(B.q()) = B.z;
  return Embedding(std::move(Z));
}

}  // namespace congeo
