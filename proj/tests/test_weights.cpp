#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "congeo/weights.hpp"
#include "test_support.hpp"

using namespace congeo;

TEST_SUITE("weights") {

TEST_CASE("supcon weights form one-blocks") {
  WeightMatrix W = supcon_weights(ClassPartition({2, 2}));
  Eigen::MatrixXd expect(4, 4);
  expect << 1, 1, 0, 0,
            1, 1, 0, 0,
            0, 0, 1, 1,
            0, 0, 1, 1;
  CHECK(W.mat() == expect);
  CHECK(W.has_zeros());
}

TEST_CASE("single class supcon is uniform") {
  WeightMatrix W = supcon_weights(ClassPartition({2}));
  CHECK(W.mat() == Eigen::MatrixXd::Ones(2, 2));
  CHECK(!W.has_zeros());
}

TEST_CASE("singleton classes are rejected") {
  CHECK_FAILS(supcon_weights(ClassPartition({1, 3})), SingletonClass);
}

TEST_CASE("soft supcon interpolates intra and inter") {
  const double eps = std::exp(-1.0);
  WeightMatrix W = soft_supcon_weights(ClassPartition({2, 2}), eps);
  CHECK(W.mat()(0, 1) == 1.0);
  CHECK(W.mat()(0, 2) == doctest::Approx(0.36787944117144233).epsilon(1e-15));
  CHECK(!W.has_zeros());
  CHECK_FAILS(soft_supcon_weights(ClassPartition({2, 2}), 1.0), BadEpsilon);
  CHECK_FAILS(soft_supcon_weights(ClassPartition({2, 2}), 0.0), BadEpsilon);
}

TEST_CASE("soft supcon approaches supcon as epsilon vanishes") {
  ClassPartition p({2, 3, 2});
  Eigen::MatrixXd hard = supcon_weights(p).mat();
  Eigen::MatrixXd soft = soft_supcon_weights(p, 1e-8).mat();
  CHECK((hard - soft).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("y-aware weights follow the Gaussian kernel") {
  Eigen::MatrixXd y(3, 1);
  y << 0, 1, 2;
  WeightMatrix W = y_aware_weights(LabelSet(y));
  CHECK(W.mat()(0, 1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(W.mat()(0, 2) == doctest::Approx(std::exp(-4.0)).epsilon(1e-15));
  Eigen::MatrixXd same(2, 2);
  same << 3, 1, 3, 1;
  CHECK(y_aware_weights(LabelSet(same)).mat()(0, 1) == 1.0);
}

TEST_CASE("xclr weights exponentiate label cosines") {
  Eigen::MatrixXd y(3, 2);
  y << 1, 0,
       0, 1,
       2, 0;
  WeightMatrix W = xclr_weights(LabelSet(y), 1.0);
  CHECK(W.mat()(0, 2) == doctest::Approx(std::exp(1.0)).epsilon(1e-15));
  CHECK(W.mat()(0, 1) == doctest::Approx(1.0).epsilon(1e-15));

  Eigen::MatrixXd anti(2, 1);
  anti << 1, -2;
  CHECK(xclr_weights(LabelSet(anti), 0.5).mat()(0, 1) ==
        doctest::Approx(std::exp(-2.0)).epsilon(1e-15));

  Eigen::MatrixXd zero(2, 2);
  zero << 1, 0, 0, 0;
  CHECK_FAILS(xclr_weights(LabelSet(zero), 1.0), ZeroLabelVector);
  CHECK_FAILS(xclr_weights(LabelSet(y), 0.0), InvalidArgument);
}

TEST_CASE("kernel weights use the squared kernel distance") {
  WeightMatrix W = kernel_weights(Eigen::MatrixXd::Identity(3, 3));
  CHECK(W.mat()(0, 1) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));

  Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(3, 3);
  bad(2, 2) = -0.1;
  CHECK_FAILS(kernel_weights(bad), NotPSD);
}

TEST_CASE("linear kernel weights equal y-aware weights") {
  Eigen::MatrixXd y(3, 1);
  y << 0, 1, 2;
  Eigen::MatrixXd K = y * y.transpose();
  Eigen::MatrixXd a = kernel_weights(K).mat();
  Eigen::MatrixXd b = y_aware_weights(LabelSet(y)).mat();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      CHECK(std::abs(a(i, j) - b(i, j)) <= 1e-12);
    }
}

TEST_CASE("combined weights multiply entrywise") {
  congeo::Rng rng(11);
  Eigen::MatrixXd y = rng.gaussian(4, 2);
  WeightMatrix A = soft_supcon_weights(ClassPartition({2, 2}), std::exp(-1.0));
  WeightMatrix B = y_aware_weights(LabelSet(y));
  WeightMatrix AB = combine_weights(A, B);
  // dissimilarities add: d = 1{classes differ} + ||y_i - y_j||^2
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      if (i == j) continue;
      const double d = (i / 2 == j / 2 ? 0.0 : 1.0) +
                       (y.row(i) - y.row(j)).squaredNorm();
      CHECK(-std::log(AB.mat()(i, j)) == doctest::Approx(d).epsilon(1e-12));
    }

  WeightMatrix ones(Eigen::MatrixXd::Ones(4, 4));
  CHECK(combine_weights(ones, B).mat() == B.mat());

  WeightMatrix BA = combine_weights(B, A);
  CHECK(AB.mat() == BA.mat());

  WeightMatrix hard = supcon_weights(ClassPartition({2, 2}));
  CHECK(combine_weights(hard, B).mat()(0, 2) == 0.0);

  CHECK_FAILS(combine_weights(A, WeightMatrix(Eigen::MatrixXd::Ones(3, 3))),
              SizeMismatch);
}

TEST_CASE("combine is associative") {
  congeo::Rng rng(13);
  WeightMatrix A(testsupport::random_dense_weights(5, rng));
  WeightMatrix B(testsupport::random_dense_weights(5, rng));
  WeightMatrix C(testsupport::random_dense_weights(5, rng));
  Eigen::MatrixXd left = combine_weights(combine_weights(A, B), C).mat();
  Eigen::MatrixXd right = combine_weights(A, combine_weights(B, C)).mat();
  CHECK((left - right).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("every constructor output revalidates") {
  congeo::Rng rng(17);
  Eigen::MatrixXd y = rng.gaussian(5, 2);
  for (const Eigen::MatrixXd& w :
       {supcon_weights(ClassPartition({2, 3})).mat(),
        soft_supcon_weights(ClassPartition({2, 3}), 0.3).mat(),
        y_aware_weights(LabelSet(y)).mat(),
        xclr_weights(LabelSet(y), 0.2).mat(),
        kernel_weights(y * y.transpose()).mat()}) {
    WeightMatrix W = validate_weight_matrix(w);
    CHECK(W.mat() == w);
  }
}

}  // TEST_SUITE
