#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "curvlab/config_model.hpp"

using namespace curvlab;
using std::numbers::pi;

namespace {

double circle_kernel(double theta, double m) {
  const double t = std::abs(std::remainder(theta, 2 * pi));
  return std::cosh(m * (pi - t)) / (2 * m * std::sinh(m * pi));
}

}  // namespace

TEST(Configuration, CircleGreensMatrixClosedForm) {
  for (double m : {0.5, 1.0, 3.0}) {
    const auto pts = lattice_points(Domain::Circle, 6, uniform_spacing(Domain::Circle, 6));
    const Configuration c(Domain::Circle, pts, 1.0, m, LieAlgebra::su2());
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j)
        EXPECT_NEAR(c.greens_matrix()(i, j), circle_kernel(pts[i][0] - pts[j][0], m), 1e-8);
    EXPECT_LT((c.greens_matrix() * c.greens_inverse() - Mat::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Configuration, MetricIsKroneckerProduct) {
  const LieAlgebra g = LieAlgebra::su2();
  const Configuration c(Domain::Circle, {Point{0, 0}, Point{1.0, 0}}, 1.0, 1.0, g);
  EXPECT_EQ(c.lie_dim(), 3);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          EXPECT_DOUBLE_EQ(c.metric_gram()(c.index(i, a), c.index(j, b)), c.greens_inverse()(i, j) * g.inner_gram()(a, b));
}

TEST(Configuration, SinglePointIsBiInvariant) {
  const LieAlgebra g = LieAlgebra::su2();
  for (double m : {0.3, 2.0}) {
    const Configuration c(Domain::Torus, {Point{0.5, 0.5}}, 1.5, m, g);
    const Mat ric = config_ricci_matrix(c);
    EXPECT_LT((ric + 0.25 * g.killing_gram()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(min_relative_ricci(c, ric), c.greens_matrix()(0, 0) / 4, 1e-12 * c.greens_matrix()(0, 0));
  }
}

TEST(Configuration, AbelianIsFlat) {
  const Configuration c(Domain::Circle, lattice_points(Domain::Circle, 4, 1.0), 1.0, 1.0, LieAlgebra::abelian(2));
  EXPECT_EQ(config_ricci_matrix(c).cwiseAbs().maxCoeff(), 0.0);
}

// Far apart with a large mass the Green's matrix is nearly diagonal, and each site decouples
// into a rescaled bi-invariant group.
TEST(Configuration, HeavyMassDecouples) {
  const LieAlgebra g = LieAlgebra::su2();
  const Configuration c(Domain::Circle, {Point{0, 0}, Point{pi, 0}}, 1.0, 12.0, g);
  const Mat ric = config_ricci_matrix(c);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      EXPECT_NEAR(ric(c.index(0, a), c.index(0, b)), -0.25 * g.killing_gram()(a, b), 1e-10);
      EXPECT_NEAR(ric(c.index(0, a), c.index(1, b)), 0.0, 1e-10);
    }
}

TEST(Configuration, RicciSymmetric) {
  const Configuration c(Domain::Torus, lattice_points(Domain::Torus, 4, 1.2), 1.5, 1.0, LieAlgebra::su2());
  const Mat ric = config_ricci_matrix(c);
  EXPECT_LT((ric - ric.transpose()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Configuration, RejectsBadInput) {
  const LieAlgebra g = LieAlgebra::su2();
  EXPECT_THROW(Configuration(Domain::Circle, {Point{0, 0}, Point{2 * pi, 0}}, 1.0, 1.0, g), InputError);
  EXPECT_THROW(Configuration(Domain::Circle, {Point{0, 0}}, 0.5, 1.0, g), DivergenceError);
  EXPECT_THROW(Configuration(Domain::Torus, {Point{0, 0}}, 1.0, 1.0, g), DivergenceError);
  EXPECT_THROW(Configuration(Domain::Circle, {}, 1.0, 1.0, g), InputError);
  EXPECT_THROW(Configuration(Domain::Circle, {Point{0, 0}}, 1.0, 0.0, g), InputError);
  EXPECT_THROW(Configuration(Domain::Circle, {Point{0, 0}, Point{1e-7, 0}}, 2.0, 1.0, g), IllConditionedError);
}

TEST(Points, ParseAndLattice) {
  std::istringstream circle("0.5\n# comment\n\n1.5  # trailing\n");
  const auto pc = parse_points(circle, Domain::Circle);
  ASSERT_EQ(pc.size(), 2u);
  EXPECT_EQ(pc[1][0], 1.5);
  std::istringstream torus("0 1\n2 3\n");
  EXPECT_EQ(parse_points(torus, Domain::Torus).size(), 2u);
  std::istringstream bad("1\n");
  EXPECT_THROW(parse_points(bad, Domain::Torus), InputError);
  std::istringstream extra("1 2 3\n");
  EXPECT_THROW(parse_points(extra, Domain::Torus), InputError);
  EXPECT_THROW(load_points("/nonexistent/points.txt", Domain::Circle), InputError);
  EXPECT_EQ(lattice_points(Domain::Torus, 9, 0.5).size(), 9u);
  EXPECT_THROW(lattice_points(Domain::Torus, 8, 0.5), InputError);
  EXPECT_NEAR(uniform_spacing(Domain::Torus, 4), pi, 1e-15);
}

TEST(Scan, CellsAndFlags) {
  ScanGrid grid;
  grid.point_counts = {2, 4};
  grid.spacing_factors = {1.0, 1e-7};
  grid.s_values = {0.5, 2.0};
  grid.m0_values = {1.0};
  const auto cells = ricci_lower_bound_scan(grid, LieAlgebra::su2());
  ASSERT_EQ(cells.size(), 8u);
  for (const auto& c : cells) {
    if (c.s == 0.5)
      EXPECT_EQ(c.flags, "divergent-diagonal");
    else if (c.spacing < 1e-5)
      EXPECT_EQ(c.flags, "ill-conditioned");
    else {
      EXPECT_EQ(c.flags, "ok");
      EXPECT_TRUE(std::isfinite(c.min_rel_ricci));
    }
  }
}
