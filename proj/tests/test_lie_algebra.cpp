#include <gtest/gtest.h>

#include <complex>
#include <sstream>

#include "curvlab/lie_algebra.hpp"

using namespace curvlab;
using CMat = Eigen::Matrix3cd;

namespace {

// Gell-Mann basis X_a = -i lambda_a / 2 as explicit 3x3 matrices.
std::vector<CMat> gell_mann_basis() {
  const std::complex<double> I(0, 1);
  std::vector<CMat> l(8, CMat::Zero());
  l[0](0, 1) = l[0](1, 0) = 1;
  l[1](0, 1) = -I, l[1](1, 0) = I;
  l[2](0, 0) = 1, l[2](1, 1) = -1;
  l[3](0, 2) = l[3](2, 0) = 1;
  l[4](0, 2) = -I, l[4](2, 0) = I;
  l[5](1, 2) = l[5](2, 1) = 1;
  l[6](1, 2) = -I, l[6](2, 1) = I;
  l[7](0, 0) = l[7](1, 1) = 1 / std::sqrt(3.0), l[7](2, 2) = -2 / std::sqrt(3.0);
  for (auto& m : l) m *= -0.5 * I;
  return l;
}

}  // namespace

TEST(LieAlgebra, Su3MatchesMatrixCommutators) {
  const LieAlgebra g = LieAlgebra::su3();
  const auto X = gell_mann_basis();
  for (int a = 0; a < 8; ++a)
    for (int b = 0; b < 8; ++b) {
      const CMat comm = X[a] * X[b] - X[b] * X[a];
      for (int c = 0; c < 8; ++c) {
        // tr(X_a X_b) = -delta_ab / 2
        const double coef = (-2.0 * (comm * X[c]).trace()).real();
        EXPECT_NEAR(g.c(a, b, c), coef, 1e-14) << a << b << c;
      }
    }
}

TEST(LieAlgebra, KillingFormsOfSuN) {
  EXPECT_LT((LieAlgebra::su2().killing_gram() + 2.0 * Mat::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((LieAlgebra::su3().killing_gram() + 3.0 * Mat::Identity(8, 8)).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(LieAlgebra, InvariantsHold) {
  for (const auto& g : {LieAlgebra::su2(), LieAlgebra::su3(), LieAlgebra::su2().direct_sum(3)})
    EXPECT_LT(g.check_invariants().max(), 1e-13) << g.name();
}

TEST(LieAlgebra, BracketIsBilinearAntisymmetric) {
  const LieAlgebra g = LieAlgebra::su3();
  const Vec x = Vec::LinSpaced(8, -1, 2), y = Vec::LinSpaced(8, 3, -0.5);
  EXPECT_LT((g.bracket(x, y) + g.bracket(y, x)).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((g.bracket(2 * x, y) - 2 * g.bracket(x, y)).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_LT((g.ad_matrix(x) * y - g.bracket(x, y)).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(LieAlgebra, AbelianIsZero) {
  const LieAlgebra g = LieAlgebra::abelian(4);
  EXPECT_TRUE(g.abelian());
  EXPECT_EQ(g.killing_gram().cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(g.inner_gram(), Mat::Identity(4, 4));
}

TEST(LieAlgebra, ParsesStructureFile) {
  std::istringstream in("# so(3)\ndim 3\n0 1 2 1\n1 2 0 1  # cyclic\n2 0 1 1\n");
  const LieAlgebra g = LieAlgebra::parse(in);
  EXPECT_EQ(g.dim(), 3);
  EXPECT_EQ(g.c(1, 0, 2), -1.0);
  EXPECT_LT((g.killing_gram() - LieAlgebra::su2().killing_gram()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(LieAlgebra, RejectsBadInput) {
  std::istringstream no_header("0 1 2 1\n");
  EXPECT_THROW(LieAlgebra::parse(no_header), InputError);
  std::istringstream bad_index("dim 2\n0 1 5 1\n");
  EXPECT_THROW(LieAlgebra::parse(bad_index), InputError);
  std::istringstream conflict("dim 3\n0 1 2 1\n1 0 2 1\n");
  EXPECT_THROW(LieAlgebra::parse(conflict), InputError);
  EXPECT_THROW(LieAlgebra::by_name("/nonexistent/file"), InputError);
}

TEST(LieAlgebra, DirectSumBlocks) {
  const LieAlgebra g = LieAlgebra::su2().direct_sum(2);
  EXPECT_EQ(g.dim(), 6);
  EXPECT_EQ(g.c(3, 4, 5), 1.0);
  EXPECT_EQ(g.c(0, 4, 5), 0.0);
  EXPECT_LT((g.inner_gram().block(3, 3, 3, 3) - LieAlgebra::su2().inner_gram()).cwiseAbs().maxCoeff(), 1e-15);
}
