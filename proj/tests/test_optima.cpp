#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "congeo/infonce.hpp"
#include "congeo/optima.hpp"
#include "congeo/weights.hpp"
#include "test_support.hpp"

using namespace congeo;
using testsupport::pairwise_sq_dists;

TEST_SUITE("optima") {

TEST_CASE("padded labels attain the y-aware bound under Euclidean similarity") {
  congeo::Rng rng(101);
  LabelSet y(rng.gaussian(8, 2));
  Embedding Z = optimum_euclidean_labels(y, 5);
  CHECK(Z.q() == 5);
  CHECK(Z.z.leftCols(2) == y.y);
  CHECK(Z.z.rightCols(3).cwiseAbs().maxCoeff() == 0.0);

  WeightMatrix W = y_aware_weights(y);
  LossReport rep = loss_gap(W, Z, SimilaritySpec::euclidean());
  CHECK(rep.gap <= 1e-8);
  CHECK(rep.attained);

  CHECK_FAILS(optimum_euclidean_labels(y, 1), DimensionTooSmall);
}

TEST_CASE("xclr optimum at equal temperatures is the normalized label") {
  congeo::Rng rng(103);
  LabelSet y(rng.gaussian(6, 2));
  Embedding Z = optimum_xclr(y, 0.1, 0.1, 3);
  for (int i = 0; i < 6; ++i) {
    CHECK(Z.z(i, 2) == 0.0);
    CHECK(std::abs(Z.z.row(i).norm() - 1.0) <= 1e-12);
    Eigen::RowVectorXd yhat = y.y.row(i) / y.y.row(i).norm();
    CHECK((Z.z.row(i).head(2) - yhat).cwiseAbs().maxCoeff() <= 1e-15);
  }
}

TEST_CASE("xclr padding coordinate interpolates toward collapse") {
  congeo::Rng rng(107);
  const double tau = 0.25;
  const double tau_prime = 0.5;  // tau'/tau - 1 = 1, padding height 1
  Eigen::MatrixXd raw = rng.gaussian(6, 2);
  raw.row(3) = raw.row(0);  // identical labels must land on the same point
  LabelSet y(raw);
  Embedding Z = optimum_xclr(y, tau, tau_prime, 4);

  Eigen::MatrixXd cosz = similarity_matrix(Z, SimilaritySpec::spherical(1.0));
  Eigen::MatrixXd cosy(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      cosy(i, j) = y.y.row(i).dot(y.y.row(j)) /
                   (y.y.row(i).norm() * y.y.row(j).norm());

  const double lam = tau / tau_prime;
  for (int i = 0; i < 6; ++i) {
    CHECK(std::abs(Z.z.row(i).norm() - std::sqrt(2.0)) <= 1e-12);
    for (int j = 0; j < 6; ++j)
      CHECK(std::abs(cosz(i, j) - (lam * cosy(i, j) + 1.0 - lam)) <= 1e-12);
  }
  CHECK(std::abs(cosz(0, 3) - 1.0) <= 1e-12);

  WeightMatrix W = xclr_weights(y, tau_prime);
  LossReport rep = loss_gap(W, Z, SimilaritySpec::spherical(tau));
  CHECK(rep.gap <= 1e-8);
}

TEST_CASE("xclr optimum input validation") {
  congeo::Rng rng(109);
  LabelSet y(rng.gaussian(4, 2));
  CHECK_FAILS(optimum_xclr(y, 0.5, 0.2, 4), TemperatureOrder);
  CHECK_FAILS(optimum_xclr(y, 0.1, 0.2, 2), DimensionTooSmall);
  Eigen::MatrixXd raw = y.y;
  raw.row(1).setZero();
  CHECK_FAILS(optimum_xclr(LabelSet(raw), 0.1, 0.2, 4), ZeroLabelVector);
}

TEST_CASE("soft supcon collapse at the consistency temperature") {
  // C = 10, epsilon = e^-1, tau = C/((C-1)(-log eps)) = 10/9: beta = -1/9
  ClassPartition p(std::vector<int>(10, 2));
  const double eps = std::exp(-1.0);
  const double tau = 10.0 / 9.0;
  Embedding Z = optimum_soft_supcon(p, eps, tau, 10);

  Eigen::MatrixXd cos = Z.z * Z.z.transpose();
  for (int i = 0; i < p.n(); ++i)
    for (int j = 0; j < p.n(); ++j) {
      const double want =
          p.class_of(i) == p.class_of(j) ? 1.0 : -1.0 / 9.0;
      CHECK(std::abs(cos(i, j) - want) <= 1e-9);
    }

  WeightMatrix W = soft_supcon_weights(p, eps);
  LossReport rep = loss_gap(W, Z, SimilaritySpec::spherical(tau));
  CHECK(rep.gap <= 1e-8);
}

TEST_CASE("soft supcon antipodal pair at the feasibility boundary") {
  ClassPartition p({2, 2});
  Embedding Z = optimum_soft_supcon(p, std::exp(-2.0), 1.0, 2);
  Eigen::MatrixXd cos = Z.z * Z.z.transpose();
  CHECK(std::abs(cos(0, 2) + 1.0) <= 1e-9);
  CHECK(std::abs(cos(0, 1) - 1.0) <= 1e-9);
}

TEST_CASE("soft supcon optimum input validation") {
  ClassPartition p3({2, 2, 2});
  CHECK_FAILS(optimum_soft_supcon(p3, std::exp(-1.0), 2.0, 3), InfeasibleBeta);
  CHECK_FAILS(optimum_soft_supcon(p3, 1.0, 0.5, 3), BadEpsilon);
  CHECK_FAILS(optimum_soft_supcon(p3, 0.0, 0.5, 3), BadEpsilon);
  CHECK_FAILS(optimum_soft_supcon(p3, std::exp(-1.0), 0.5, 2),
              DimensionTooSmall);
}

TEST_CASE("hard supcon prototypes form a regular simplex when balanced") {
  ClassPartition p({2, 2, 2, 2});
  PrototypeGeometry geo = optimum_hard_supcon(p, 0.1, 4);
  CHECK(geo.C == 4);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      if (a != b) CHECK(std::abs(geo.gram(a, b) + 1.0 / 3.0) <= 5e-3);
  CHECK((geo.mu * geo.mu.transpose() - geo.gram).cwiseAbs().maxCoeff() <=
        1e-8);
  for (int a = 0; a < 4; ++a)
    CHECK(std::abs(geo.mu.row(a).norm() - 1.0) <= 1e-12);
}

TEST_CASE("two imbalanced classes still repel to antipodes") {
  // C = 2 reduces to one cosine t; grid search is the oracle
  ClassPartition p({3, 5});
  const double tau = 0.3;
  double best_t = 2.0;
  double best_loss = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= 2000; ++k) {
    const double t = -1.0 + 2.0 * k / 2000.0;
    Eigen::MatrixXd G(2, 2);
    G << 1.0, t, t, 1.0;
    const double l = hard_supcon_reduced_loss(p, tau, G);
    if (l < best_loss) {
      best_loss = l;
      best_t = t;
    }
  }
  CHECK(best_t == -1.0);

  PrototypeGeometry geo = optimum_hard_supcon(p, tau, 2);
  CHECK(std::abs(geo.gram(0, 1) - best_t) <= 1e-3);
  CHECK(hard_supcon_reduced_loss(p, tau, geo.gram) <= best_loss + 1e-8);
}

TEST_CASE("classes of equal size are exchangeable in the optimal gram") {
  ClassPartition p({3, 3, 7, 7});
  PrototypeGeometry geo = optimum_hard_supcon(p, 0.1, 4);
  // the four small-large cosines agree; the small-small cosine differs from
  // the large-large one in general, but each is a single orbit
  const double cross = geo.gram(0, 2);
  CHECK(std::abs(geo.gram(0, 3) - cross) <= 1e-2);
  CHECK(std::abs(geo.gram(1, 2) - cross) <= 1e-2);
  CHECK(std::abs(geo.gram(1, 3) - cross) <= 1e-2);
  CHECK(cross < 0.0);
}

TEST_CASE("reduced objective equals the full loss at collapsed embeddings") {
  ClassPartition p({2, 3, 4});
  const double tau = 0.4;
  PrototypeGeometry geo = optimum_hard_supcon(p, tau, 3);

  Eigen::MatrixXd Z(p.n(), 3);
  for (int i = 0; i < p.n(); ++i) Z.row(i) = geo.mu.row(p.class_of(i));
  WeightMatrix W = supcon_weights(p);
  Eigen::MatrixXd S =
      similarity_matrix(Embedding(Z), SimilaritySpec::spherical(tau));
  const double full = infonce_loss(W, S);
  const double reduced = hard_supcon_reduced_loss(p, tau, geo.gram);
  CHECK(std::abs(full - reduced) <= 1e-12);
}

TEST_CASE("hard supcon optimum input validation") {
  CHECK_FAILS(optimum_hard_supcon(ClassPartition({1, 3}), 0.1, 2),
              SingletonClass);
  CHECK_FAILS(optimum_hard_supcon(ClassPartition({2, 2, 2}), 0.1, 2),
              DimensionTooSmall);
  ClassPartition p({2, 2});
  Eigen::MatrixXd bad(2, 2);
  bad << 1, 0, 1, 0;
  CHECK_FAILS(quasi_optimum_euclidean_supcon(p, bad, 1.0),
              DuplicatePrototypes);
  Eigen::MatrixXd ok(2, 2);
  ok << 1, 0, 0, 1;
  CHECK_FAILS(quasi_optimum_euclidean_supcon(p, ok, -1.0), InvalidArgument);
  CHECK_FAILS(hard_supcon_reduced_loss(p, 0.1, Eigen::MatrixXd::Identity(3, 3)),
              SizeMismatch);
}

TEST_CASE("quasi optimum at m = 0 collapses to the uniform loss") {
  ClassPartition p({4, 4, 4});
  Eigen::MatrixXd proto(3, 2);
  proto << 0, 0, 1, 0, 0.5, std::sqrt(3.0) / 2.0;
  Embedding Z = quasi_optimum_euclidean_supcon(p, proto, 0.0);
  CHECK(Z.z.cwiseAbs().maxCoeff() == 0.0);
  WeightMatrix W = supcon_weights(p);
  Eigen::MatrixXd S = similarity_matrix(Z, SimilaritySpec::euclidean());
  CHECK(infonce_loss(W, S) == doctest::Approx(std::log(11.0)).epsilon(1e-14));
}

TEST_CASE("regular simplex geometries") {
  PrototypeGeometry two = regular_simplex(2, 1);
  CHECK(std::abs(std::abs(two.mu(0, 0)) - 1.0) <= 1e-12);
  CHECK(std::abs(two.mu(0, 0) + two.mu(1, 0)) <= 1e-12);

  PrototypeGeometry three = regular_simplex(3, 2);
  Eigen::MatrixXd G = three.mu * three.mu.transpose();
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      CHECK(std::abs(G(a, b) - (a == b ? 1.0 : -0.5)) <= 1e-12);
  CHECK(three.mu.colwise().sum().cwiseAbs().maxCoeff() <= 1e-9);

  PrototypeGeometry ten = regular_simplex(10, 9);
  Eigen::MatrixXd G10 = ten.mu * ten.mu.transpose();
  for (int a = 0; a < 10; ++a)
    for (int b = 0; b < 10; ++b)
      CHECK(std::abs(G10(a, b) - (a == b ? 1.0 : -1.0 / 9.0)) <= 1e-12);

  CHECK_FAILS(regular_simplex(3, 1), DimensionTooSmall);
  CHECK_FAILS(regular_simplex(1, 3), InvalidArgument);
}

TEST_CASE("product geometry adds squared distances") {
  congeo::Rng rng(113);
  Embedding A(rng.gaussian(7, 2));
  Embedding B(rng.gaussian(7, 3));
  Embedding Z = product_geometry(A, B);
  CHECK(Z.q() == 5);
  CHECK(Z.z.leftCols(2) == A.z);
  CHECK(Z.z.rightCols(3) == B.z);
  Eigen::MatrixXd want = pairwise_sq_dists(A.z) + pairwise_sq_dists(B.z);
  CHECK((pairwise_sq_dists(Z.z) - want).cwiseAbs().maxCoeff() <= 1e-12);

  Embedding still(Eigen::MatrixXd::Zero(7, 2));
  Embedding Z2 = product_geometry(A, still);
  CHECK((pairwise_sq_dists(Z2.z) - pairwise_sq_dists(A.z))
            .cwiseAbs()
            .maxCoeff() == 0.0);

  CHECK_FAILS(product_geometry(A, Embedding(rng.gaussian(6, 2))),
              SizeMismatch);
}

TEST_CASE("a product of per-factor optima attains the combined bound") {
  congeo::Rng rng(127);
  ClassPartition p({2, 2, 2});
  const double eps = std::exp(-1.0);
  LabelSet y(rng.gaussian(6, 2));

  // class prototypes scaled so the inter-class squared distance is -log eps
  PrototypeGeometry simplex = regular_simplex(3, 2);
  const double scale = std::sqrt(-std::log(eps) / 3.0);
  Eigen::MatrixXd A(6, 2);
  for (int i = 0; i < 6; ++i)
    A.row(i) = scale * simplex.mu.row(p.class_of(i));

  Embedding Z = product_geometry(Embedding(A), optimum_euclidean_labels(y, 2));
  WeightMatrix W = combine_weights(soft_supcon_weights(p, eps),
                                   y_aware_weights(y));
  LossReport rep = loss_gap(W, Z, SimilaritySpec::euclidean());
  CHECK(rep.gap <= 1e-8);
  CHECK(rep.attained);
}

}  // TEST_SUITE
