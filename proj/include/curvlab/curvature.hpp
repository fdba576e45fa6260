#pragma once

// Levi-Civita connection and Riemann curvature of a left-invariant metric on a
// Lie group, written against any metrized Lie algebra that can apply its bracket,
// the transpose of ad_x, and its metric to coefficient vectors.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>
#include <sstream>
#include <string>

#include "curvlab/errors.hpp"
#include "curvlab/lie_algebra.hpp"

namespace curvlab {

/// Coefficient-vector interface consumed by Geometry.
///
/// bracket_transpose(x, v) is ad_x^T v in coefficient coordinates (Euclidean transpose).
/// onb_vector(i) enumerates an orthonormal basis of the metric.
template <class A>
concept MetrizedSpace = requires(const A& a, const Vec& v, Eigen::Index i) {
  { a.dim() } -> std::convertible_to<Eigen::Index>;
  { a.bracket(v, v) } -> std::convertible_to<Vec>;
  { a.bracket_transpose(v, v) } -> std::convertible_to<Vec>;
  { a.metric_apply(v) } -> std::convertible_to<Vec>;
  { a.metric_solve(v) } -> std::convertible_to<Vec>;
  { a.onb_vector(i) } -> std::convertible_to<Vec>;
};

/// A finite-dimensional Lie algebra with an arbitrary inner product.
class MetrizedAlgebra {
 public:
  MetrizedAlgebra(LieAlgebra algebra, Mat metric_gram) : algebra_(std::move(algebra)), metric_(std::move(metric_gram)) {
    const auto n = algebra_.dim();
    detail::require(metric_.rows() == n && metric_.cols() == n, "metric_gram has wrong shape");
    const double asym = (metric_ - metric_.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * std::max(1.0, metric_.cwiseAbs().maxCoeff()))
      throw InputError("metric_gram is not symmetric");
    llt_.compute(metric_);
    if (llt_.info() != Eigen::Success) throw InputError("metric_gram is not positive definite");
    const Eigen::SelfAdjointEigenSolver<Mat> eig(metric_, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() <= 0) throw InputError("metric_gram is not positive definite");
    condition_ = eig.eigenvalues().maxCoeff() / eig.eigenvalues().minCoeff();
    onb_ = llt_.matrixU().solve(Mat::Identity(n, n));
  }

  /// The bi-invariant metric given by the algebra's own ad-invariant inner product.
  explicit MetrizedAlgebra(const LieAlgebra& algebra) : MetrizedAlgebra(algebra, algebra.inner_gram()) {}

  Eigen::Index dim() const { return algebra_.dim(); }
  const LieAlgebra& algebra() const { return algebra_; }
  const Mat& metric_gram() const { return metric_; }

  Vec bracket(const Vec& x, const Vec& y) const { return algebra_.bracket(x, y); }
  Vec bracket_transpose(const Vec& x, const Vec& v) const {
    Vec out = Vec::Zero(dim());
    for (const auto& e : algebra_.entries()) out[e.j] += e.value * x[e.i] * v[e.k];
    return out;
  }
  Vec metric_apply(const Vec& v) const { return metric_ * v; }
  Vec metric_solve(const Vec& v) const { return llt_.solve(v); }
  Vec onb_vector(Eigen::Index i) const { return onb_.col(i); }
  const Mat& orthonormal_basis() const { return onb_; }
  double condition_number() const { return condition_; }

  /// The matrix A with <A y, z> = <y, [x, z]>.
  Mat ad_star_matrix(const Vec& x) const { return llt_.solve(algebra_.ad_matrix(x).transpose() * metric_); }

 private:
  LieAlgebra algebra_;
  Mat metric_;
  Eigen::LLT<Mat> llt_;
  Mat onb_;
  double condition_ = 1;
};

/// Relative tolerance for the always-on cross-check between curvature formulas.
inline constexpr double kCurvatureCrossCheckTol = 1e-10;

/// Spaces that know their metric's condition number get a rounding allowance of
/// 16 n eps cond on top of kCurvatureCrossCheckTol, since every ad^* goes through a solve.
template <class Space>
double cross_check_tolerance(const Space& s) {
  if constexpr (requires { s.condition_number(); })
    return std::max(kCurvatureCrossCheckTol, 16.0 * static_cast<double>(s.dim()) *
                                                 std::numeric_limits<double>::epsilon() * s.condition_number());
  else
    return kCurvatureCrossCheckTol;
}

inline double max_abs(const Vec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

template <MetrizedSpace Space>
class Geometry {
 public:
  explicit Geometry(const Space& space) : s_(space) {}

  const Space& space() const { return s_; }

  double inner(const Vec& a, const Vec& b) const { return a.dot(s_.metric_apply(b)); }
  double norm(const Vec& a) const { return std::sqrt(std::max(0.0, inner(a, a))); }

  Vec bracket(const Vec& x, const Vec& y) const { return s_.bracket(x, y); }

  /// ad_x^*(y), the metric adjoint of ad_x.
  Vec ad_star(const Vec& x, const Vec& y) const { return s_.metric_solve(s_.bracket_transpose(x, s_.metric_apply(y))); }

  Vec levi_civita(const Vec& x, const Vec& y) const {
    return 0.5 * (s_.bracket(x, y) - ad_star(x, y) - ad_star(y, x));
  }

  /// [nabla_x, nabla_y] z - nabla_[x,y] z.
  Vec curvature_direct(const Vec& x, const Vec& y, const Vec& z) const {
    return levi_civita(x, levi_civita(y, z)) - levi_civita(y, levi_civita(x, z)) - levi_civita(s_.bracket(x, y), z);
  }

  /// Fully expanded term list in ad and ad^*.
  Vec curvature_expanded(const Vec& x, const Vec& y, const Vec& z) const {
    const Vec yz = s_.bracket(y, z), xz = s_.bracket(x, z), xy = s_.bracket(x, y);
    const Vec sy_z = ad_star(y, z), sz_y = ad_star(z, y), sx_z = ad_star(x, z), sz_x = ad_star(z, x);
    Vec first = s_.bracket(x, yz) - s_.bracket(x, sy_z) - s_.bracket(x, sz_y) - ad_star(x, yz) + ad_star(x, sy_z) +
                ad_star(x, sz_y) - ad_star(Vec(yz - sy_z - sz_y), x);
    Vec second = s_.bracket(y, xz) - s_.bracket(y, sx_z) - s_.bracket(y, sz_x) - ad_star(y, xz) + ad_star(y, sx_z) +
                 ad_star(y, sz_x) - ad_star(Vec(xz - sx_z - sz_x), y);
    Vec third = s_.bracket(xy, z) - ad_star(xy, z) - ad_star(z, xy);
    return 0.25 * first - 0.25 * second - 0.5 * third;
  }

  /// The same expansion regrouped into commutators of ad and ad^*.
  Vec curvature_commutator_form(const Vec& x, const Vec& y, const Vec& z) const {
    const Vec xy = s_.bracket(x, y), yz = s_.bracket(y, z), xz = s_.bracket(x, z);
    const Vec sy_z = ad_star(y, z), sz_y = ad_star(z, y), sx_z = ad_star(x, z), sz_x = ad_star(z, x);
    // [A,B]z = A(Bz) - B(Az)
    const Vec c1 = s_.bracket(x, sy_z) - ad_star(y, xz);    // [ad_x, ad_y^*] z
    const Vec c2 = s_.bracket(y, sx_z) - ad_star(x, yz);    // [ad_y, ad_x^*] z
    const Vec c3 = ad_star(x, sy_z) - ad_star(y, sx_z);     // [ad_x^*, ad_y^*] z
    Vec r = 0.25 * (-s_.bracket(xy, z) - ad_star(yz, x) + ad_star(xz, y));
    r += 0.25 * (-c1 + c2 + c3);
    r += 0.25 * (-s_.bracket(x, sz_y) + ad_star(x, sz_y)) - 0.25 * (-s_.bracket(y, sz_x) + ad_star(y, sz_x));
    r += 0.25 * (ad_star(sy_z, x) + ad_star(sz_y, x)) - 0.25 * (ad_star(sx_z, y) + ad_star(sz_x, y));
    r -= 0.5 * (-ad_star(xy, z) - ad_star(z, xy));
    return r;
  }

  /// R(x,y)z with the convention R(x,y) = [nabla_x, nabla_y] - nabla_[x,y].
  ///
  /// Evaluated directly and through the expanded term list; a disagreement throws
  /// ConsistencyError.
  ///
  /// The tolerance is relative to the largest of the three terms of the direct form: they
  /// can cancel to a much smaller result when the metric weights modes very unevenly.
  Vec curvature(const Vec& x, const Vec& y, const Vec& z) const {
    const Vec t1 = levi_civita(x, levi_civita(y, z)), t2 = levi_civita(y, levi_civita(x, z));
    const Vec t3 = levi_civita(s_.bracket(x, y), z);
    Vec a = t1 - t2 - t3;
    const Vec b = curvature_expanded(x, y, z);
    const double scale = std::max({1.0, max_abs(t1), max_abs(t2), max_abs(t3), max_abs(b)});
    if (max_abs(a - b) > cross_check_tolerance(s_) * scale) {
      std::ostringstream msg;
      msg << "curvature formulas disagree by " << max_abs(a - b) << " (term scale " << scale << ")";
      throw ConsistencyError(msg.str());
    }
    return a;
  }

  /// Unnormalized sectional curvature <R(x,y)y, x>.
  double sectional(const Vec& x, const Vec& y) const { return inner(curvature(x, y, y), x); }

  /// Ric(y,z) = sum_i <R(x_i, y) z, x_i> over the metric-orthonormal basis.
  double ricci_full(const Vec& y, const Vec& z) const {
    double sum = 0;
    for (Eigen::Index i = 0; i < s_.dim(); ++i) {
      const Vec xi = s_.onb_vector(i);
      sum += inner(curvature(xi, y, z), xi);
    }
    return sum;
  }

  /// Matrix of Ric in coordinates: Ric(e_i, e_j).
  Mat ricci_matrix() const {
    const auto n = s_.dim();
    Mat ric = Mat::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
      const Vec xk = s_.onb_vector(k);
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j) {
          const double v = inner(curvature(xk, Vec::Unit(n, i), Vec::Unit(n, j)), xk);
          ric(i, j) += v;
          if (i != j) ric(j, i) += v;
        }
    }
    return ric;
  }

 private:
  const Space& s_;
};

/// Largest deviations from the curvature identities over random samples, each relative to
/// max(1, size of the terms involved).
struct SymmetrySuite {
  int samples = 0;
  double antisymmetry = 0;   ///< R(x,y) + R(y,x)
  double skew = 0;           ///< <R(x,y)z,w> + <R(x,y)w,z>
  double pair = 0;           ///< <R(x,y)z,w> - <R(z,w)x,y>
  double bianchi = 0;        ///< R(x,y)z + R(y,z)x + R(z,x)y
  double compatibility = 0;  ///< <nabla_x y, z> + <y, nabla_x z>
  double torsion = 0;        ///< nabla_x y - nabla_y x - [x,y]
  double expanded = 0;       ///< direct vs expanded term list
  double commutator = 0;     ///< direct vs commutator form

  double max() const {
    return std::max({antisymmetry, skew, pair, bianchi, compatibility, torsion, expanded, commutator});
  }
};

template <MetrizedSpace Space, class Gen>
SymmetrySuite symmetry_suite(const Geometry<Space>& geo, Gen&& random_vector, int samples) {
  SymmetrySuite r;
  r.samples = samples;
  auto rel = [](double dev, double scale) { return dev / std::max(1.0, scale); };
  for (int n = 0; n < samples; ++n) {
    const Vec x = random_vector(), y = random_vector(), z = random_vector(), w = random_vector();
    const Vec rxy_z = geo.curvature_direct(x, y, z);
    const double sc = max_abs(rxy_z);
    r.antisymmetry = std::max(r.antisymmetry, rel(max_abs(rxy_z + geo.curvature_direct(y, x, z)), sc));
    const double a = geo.inner(rxy_z, w), b = geo.inner(geo.curvature_direct(x, y, w), z);
    const double c = geo.inner(geo.curvature_direct(z, w, x), y);
    r.skew = std::max(r.skew, rel(std::abs(a + b), std::abs(a)));
    r.pair = std::max(r.pair, rel(std::abs(a - c), std::abs(a)));
    const Vec bian = rxy_z + geo.curvature_direct(y, z, x) + geo.curvature_direct(z, x, y);
    r.bianchi = std::max(r.bianchi, rel(max_abs(bian), sc));
    const Vec nxy = geo.levi_civita(x, y);
    const double c1 = geo.inner(nxy, z), c2 = geo.inner(y, geo.levi_civita(x, z));
    r.compatibility = std::max(r.compatibility, rel(std::abs(c1 + c2), std::abs(c1)));
    const Vec br = geo.bracket(x, y);
    r.torsion = std::max(r.torsion, rel(max_abs(nxy - geo.levi_civita(y, x) - br), max_abs(br)));
    r.expanded = std::max(r.expanded, rel(max_abs(rxy_z - geo.curvature_expanded(x, y, z)), sc));
    r.commutator = std::max(r.commutator, rel(max_abs(rxy_z - geo.curvature_commutator_form(x, y, z)), sc));
  }
  return r;
}

}  // namespace curvlab
