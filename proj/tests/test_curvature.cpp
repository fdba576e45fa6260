#include <gtest/gtest.h>

#include <random>

#include "curvlab/curvature.hpp"

using namespace curvlab;

namespace {

Vec random_vec(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-1, 1);
  Vec v(n);
  for (auto& c : v) c = u(rng);
  return v;
}

Mat random_spd(std::mt19937_64& rng, int n) {
  Mat a(n, n);
  for (int i = 0; i < n; ++i) a.col(i) = random_vec(rng, n);
  return a * a.transpose() + Mat::Identity(n, n);
}

}  // namespace

// Koszul formula for left-invariant fields: <nabla_x y, z> = 1/2(<[x,y],z> - <[y,z],x> + <[z,x],y>).
TEST(Curvature, LeviCivitaMatchesKoszul) {
  std::mt19937_64 rng(7);
  const LieAlgebra g = LieAlgebra::su3();
  const MetrizedAlgebra space(g, random_spd(rng, 8));
  const Geometry geo(space);
  const Mat& M = space.metric_gram();
  for (int n = 0; n < 20; ++n) {
    const Vec x = random_vec(rng, 8), y = random_vec(rng, 8), z = random_vec(rng, 8);
    const double koszul =
        0.5 * (g.bracket(x, y).dot(M * z) - g.bracket(y, z).dot(M * x) + g.bracket(z, x).dot(M * y));
    EXPECT_NEAR(geo.levi_civita(x, y).dot(M * z), koszul, 1e-11);
  }
}

TEST(Curvature, BiInvariantClosedForms) {
  std::mt19937_64 rng(3);
  const LieAlgebra g = LieAlgebra::su2();
  const MetrizedAlgebra space(g);
  const Geometry geo(space);
  for (int n = 0; n < 10; ++n) {
    const Vec x = random_vec(rng, 3), y = random_vec(rng, 3), z = random_vec(rng, 3);
    EXPECT_LT(max_abs(geo.levi_civita(x, y) - 0.5 * g.bracket(x, y)), 1e-14);
    EXPECT_LT(max_abs(geo.curvature(x, y, z) + 0.25 * g.bracket(g.bracket(x, y), z)), 1e-14);
    const Vec xy = g.bracket(x, y);
    EXPECT_NEAR(geo.sectional(x, y), 0.25 * g.inner(xy, xy), 1e-14);
  }
}

// Brute-force trace with explicit matrices: x -> -1/4 [[x,y],z] = -1/4 ad_z ad_y x.
TEST(Curvature, BiInvariantRicciIsQuarterKilling) {
  for (const auto& g : {LieAlgebra::su2(), LieAlgebra::su3()}) {
    const MetrizedAlgebra space(g);
    const Mat ric = Geometry(space).ricci_matrix();
    const int n = g.dim();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const Mat op = -0.25 * g.ad_matrix(Vec::Unit(n, j)) * g.ad_matrix(Vec::Unit(n, i));
        EXPECT_NEAR(ric(i, j), op.trace(), 1e-13);
        EXPECT_NEAR(ric(i, j), -0.25 * g.killing_gram()(i, j), 1e-13);
      }
  }
}

TEST(Curvature, RicciMatrixMatchesRicciFull) {
  std::mt19937_64 rng(11);
  const MetrizedAlgebra space(LieAlgebra::su2(), random_spd(rng, 3));
  const Geometry geo(space);
  const Mat ric = geo.ricci_matrix();
  const Vec y = random_vec(rng, 3), z = random_vec(rng, 3);
  EXPECT_NEAR(y.dot(ric * z), geo.ricci_full(y, z), 1e-12);
  EXPECT_LT((ric - ric.transpose()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Curvature, SymmetrySuiteOnGeneralMetric) {
  std::mt19937_64 rng(5);
  for (const auto& g : {LieAlgebra::su2(), LieAlgebra::su3()}) {
    const MetrizedAlgebra space(g, random_spd(rng, g.dim()));
    const Geometry geo(space);
    const SymmetrySuite s = symmetry_suite(geo, [&] { return random_vec(rng, g.dim()); }, 50);
    EXPECT_LT(s.max(), 1e-10) << g.name();
    EXPECT_EQ(s.samples, 50);
  }
}

// Milnor: on su(2) with diagonal metric (l1,l2,l3) in the basis [e1,e2]=e3 (cyclic), the
// sectional curvature of the e1,e2 plane is a known rational function of the l_i.
TEST(Curvature, MilnorSu2Sectional) {
  const double l1 = 1, l2 = 2, l3 = 3;
  const MetrizedAlgebra space(LieAlgebra::su2(InnerProduct::Identity), Eigen::Vector3d(l1, l2, l3).asDiagonal().toDenseMatrix());
  const Geometry geo(space);
  // Orthonormal frame u_i = e_i / sqrt(l_i); structure [u1,u2] = c3 u3 with
  // c3 = sqrt(l3 / (l1 l2)), cyclic.
  const double c1 = std::sqrt(l1 / (l2 * l3)), c2 = std::sqrt(l2 / (l3 * l1)), c3 = std::sqrt(l3 / (l1 * l2));
  const double m1 = 0.5 * (c2 + c3 - c1), m2 = 0.5 * (c3 + c1 - c2), m3 = 0.5 * (c1 + c2 - c3);
  const double k12 = c3 * m3 - m1 * m2;
  const Vec u1 = Vec::Unit(3, 0) / std::sqrt(l1), u2 = Vec::Unit(3, 1) / std::sqrt(l2);
  EXPECT_NEAR(geo.sectional(u1, u2), k12, 1e-13);
}

TEST(Curvature, AbelianIsFlat) {
  const MetrizedAlgebra space(LieAlgebra::abelian(3));
  const Geometry geo(space);
  EXPECT_EQ(geo.ricci_matrix().cwiseAbs().maxCoeff(), 0.0);
}

TEST(Curvature, RejectsBadMetric) {
  EXPECT_THROW(MetrizedAlgebra(LieAlgebra::su2(), Mat::Identity(2, 2)), InputError);
  Mat m = Mat::Identity(3, 3);
  m(0, 1) = 0.5;
  EXPECT_THROW(MetrizedAlgebra(LieAlgebra::su2(), m), InputError);
  EXPECT_THROW(MetrizedAlgebra(LieAlgebra::su2(), -Mat::Identity(3, 3)), InputError);
}
