#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "curvlab/sobolev_model.hpp"

using namespace curvlab;

namespace {
constexpr double kTau = 2 * std::numbers::pi;

// Value and gradient of a real-basis expansion, written out independently of ModeBasis.
struct Sample {
  double value = 0, dx = 0, dy = 0;
};

Sample sample(const ModeBasis& b, const Vec& f, const Point& x) {
  Sample s;
  for (int i = 0; i < b.size(); ++i) {
    if (f[i] == 0.0) continue;
    const Mode& m = b.mode(i);
    if (m.parity == Parity::Const) {
      s.value += f[i];
      continue;
    }
    const double ph = m.k[0] * x[0] + m.k[1] * x[1], r2 = std::numbers::sqrt2 * f[i];
    const bool c = m.parity == Parity::Cos;
    s.value += r2 * (c ? std::cos(ph) : std::sin(ph));
    const double d = r2 * (c ? -std::sin(ph) : std::cos(ph));
    s.dx += d * m.k[0];
    s.dy += d * m.k[1];
  }
  return s;
}

}  // namespace

TEST(SobolevModel, BracketIsPointwise) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> ang(0, kTau);
  for (Domain d : {Domain::Circle, Domain::Torus})
    for (double m0 : {0.0, 1.0}) {
      const TruncatedGroupModel model({d, 4, 1.0, m0}, LieAlgebra::su2());
      const Vec x = model.random_element(rng, 4), y = model.random_element(rng, 4);
      const Vec xy = model.bracket(x, y);
      for (int n = 0; n < 10; ++n) {
        const Point p{ang(rng), d == Domain::Torus ? ang(rng) : 0.0};
        Vec xv(3), yv(3), bv(3);
        for (int a = 0; a < 3; ++a) {
          xv[a] = sample(model.basis(), model.component(x, a), p).value;
          yv[a] = sample(model.basis(), model.component(y, a), p).value;
          bv[a] = sample(model.basis(), model.component(xy, a), p).value;
        }
        EXPECT_LT(max_abs(bv - model.algebra().bracket(xv, yv)), 1e-12);
      }
    }
}

TEST(SobolevModel, QuotientVanishesAtBasepoint) {
  std::mt19937_64 rng(4);
  const TruncatedGroupModel model({Domain::Torus, 3, 1.0, 0.0}, LieAlgebra::su2());
  EXPECT_TRUE(model.quotient());
  const Vec x = model.random_element(rng, 3, 6);
  for (int a = 0; a < 3; ++a) EXPECT_NEAR(sample(model.basis(), model.component(x, a), {0, 0}).value, 0.0, 1e-13);
}

// At s = 1 the metric is the mean of <grad X, grad Y> + m0^2 <X, Y> (inner product -kappa).
TEST(SobolevModel, MetricIsH1Pairing) {
  std::mt19937_64 rng(6);
  const double m0 = 0.7;
  const TruncatedGroupModel model({Domain::Torus, 3, 1.0, m0}, LieAlgebra::su2());
  const Vec x = model.random_element(rng, 3, 5), y = model.random_element(rng, 3, 5);
  const Mat& k = model.algebra().inner_gram();
  double mean = 0;
  const int n = 16;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Point p{kTau * i / n, kTau * j / n};
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          if (k(a, b) == 0.0) continue;
          const Sample u = sample(model.basis(), model.component(x, a), p);
          const Sample v = sample(model.basis(), model.component(y, b), p);
          mean += k(a, b) * (u.dx * v.dx + u.dy * v.dy + m0 * m0 * u.value * v.value);
        }
    }
  mean /= n * n;
  EXPECT_NEAR(x.dot(model.metric_apply(y)), mean, 1e-11);
}

TEST(SobolevModel, OrthonormalBasis) {
  const TruncatedGroupModel model({Domain::Circle, 3, 1.5, 0.3}, LieAlgebra::su3());
  for (Eigen::Index i = 0; i < model.dim(); i += 5)
    for (Eigen::Index j = 0; j < model.dim(); j += 3)
      EXPECT_NEAR(model.onb_vector(i).dot(model.metric_apply(model.onb_vector(j))), i == j ? 1.0 : 0.0, 1e-13);
  EXPECT_LT(max_abs(model.metric_solve(model.metric_apply(model.onb_vector(4))) - model.onb_vector(4)), 1e-15);
}

TEST(SobolevModel, GFormIdentities) {
  std::mt19937_64 rng(8);
  for (double m0 : {0.5, 1.0}) {
    const TruncatedGroupModel model({Domain::Circle, 6, 1.0, m0}, LieAlgebra::su2());
    const Vec x = model.random_element(rng, 6), y = model.random_element(rng, 6);
    const FirstLineReport r = first_line_identity_check(model, x, y);
    EXPECT_LT(r.max_deviation(), 1e-10 * std::max(1.0, r.scale));
    EXPECT_LT(gform_adjoint_deviation(model, x), 1e-10);
  }
}

TEST(SobolevModel, CondensedCurvatureMatchesGeneral) {
  std::mt19937_64 rng(9);
  const TruncatedGroupModel model({Domain::Circle, 4, 1.0, 1.0}, LieAlgebra::su2());
  const Vec x = model.random_element(rng, 4), y = model.random_element(rng, 4);
  EXPECT_NO_THROW(curvature_condensed(model, x, y));
}

TEST(SobolevModel, GFormNeedsMass) {
  const TruncatedGroupModel model({Domain::Circle, 3, 1.0, 0.0}, LieAlgebra::su2());
  EXPECT_THROW(model.apply_G(model.zero()), InputError);
}

TEST(SobolevModel, DecayProbeOnAbelianIsDegenerate) {
  const TruncatedGroupModel model({Domain::Circle, 20, 1.0, 1.0}, LieAlgebra::abelian(2));
  const Vec x = model.element(1, Vec::Unit(2, 0)), y = model.element(3, Vec::Unit(2, 1));
  const DecayProbe p = order_decay_probe(model, x, y, Vec::Unit(2, 0), {{8, 0}, {10, 0}, {12, 0}});
  EXPECT_TRUE(p.degenerate);
}

TEST(SobolevModel, DecayProbeSlope) {
  const TruncatedGroupModel model({Domain::Circle, 32, 1.0, 1.0}, LieAlgebra::su2());
  const Vec x = model.element(1, Vec::Unit(3, 0)), y = model.element(4, Vec::Unit(3, 1));
  std::vector<std::array<int, 2>> f;
  for (int k = 8; k <= 20; ++k) f.push_back({k, 0});
  const DecayProbe p = order_decay_probe(model, x, y, Vec::Unit(3, 0), f);
  EXPECT_FALSE(p.unreliable);
  EXPECT_LT(p.slope, -1.75);
}

TEST(SobolevModel, RejectsBadParams) {
  EXPECT_THROW(TruncatedGroupModel({Domain::Circle, 0, 1.0, 1.0}, LieAlgebra::su2()), InputError);
  EXPECT_THROW(TruncatedGroupModel({Domain::Circle, 4, 1.0, 1.0, 3}, LieAlgebra::su2()), InputError);
  const TruncatedGroupModel model({Domain::Circle, 4, 1.0, 1.0}, LieAlgebra::su2());
  EXPECT_THROW(model.bracket(Vec::Zero(3), Vec::Zero(3)), InputError);
}

TEST(SobolevModel, CondensedBracketsAloneMissFirstLine) {
  std::mt19937_64 rng(10);
  const TruncatedGroupModel model({Domain::Circle, 4, 1.0, 1.0}, LieAlgebra::su2());
  const GFormCalculus calc(model);
  const Geometry geo(model);
  const Vec x = model.random_element(rng, 4), y = model.random_element(rng, 4);
  double miss = 0, fixed = 0;
  for (auto c : model.coordinates_within(4)) {
    const Vec z = Vec::Unit(model.dim(), c), r = geo.curvature(x, y, z);
    miss = std::max(miss, max_abs(calc.curvature_condensed_brackets(x, y, z) - r));
    fixed = std::max(fixed, max_abs(calc.curvature_condensed(x, y, z) - r));
  }
  EXPECT_GT(miss, 1e-3);
  EXPECT_LT(fixed, 1e-12);
}
