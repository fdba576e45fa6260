#pragma once

// Spectral truncation of the Lie algebra of W^s(Sigma, K): span(modes) (x) k with the
// metric <x,y> = <<P^s x, y>> (normalized volume). All brackets are computed exactly on
// an ambient mode set of degree <= 3N and then projected, so any expression that nests
// at most three inputs of degree <= N is exact.
//
// With m0 = 0 the model is the based-loop algebra {x : x(0) = 0}, stored through its
// non-constant Fourier coefficients; this realizes W^s(Sigma,K)/K.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "curvlab/curvature.hpp"
#include "curvlab/errors.hpp"
#include "curvlab/lie_algebra.hpp"
#include "curvlab/spectral_domain.hpp"

namespace curvlab {

struct ModelParams {
  Domain domain = Domain::Circle;
  int cutoff = 8;
  double s = 1.0;
  double m0 = 1.0;
  /// 0 selects the default 3 * cutoff.
  int ambient_cutoff = 0;
};

class TruncatedGroupModel {
 public:
  TruncatedGroupModel(const ModelParams& p, LieAlgebra algebra)
      : params_(p),
        algebra_(std::move(algebra)),
        spectral_(ModeBasis(p.domain, p.ambient_cutoff > 0 ? p.ambient_cutoff : 3 * p.cutoff), p.s, p.m0) {
    detail::require(p.cutoff >= 1, "cutoff must be at least 1");
    detail::require(ambient() >= p.cutoff, "ambient cutoff must be at least the cutoff");
    params_.ambient_cutoff = ambient();
    d_ = algebra_.dim();
    offset_ = spectral_.excludes_constant() ? 1 : 0;
    inner_llt_.compute(algebra_.inner_gram());
    if (inner_llt_.info() != Eigen::Success) throw InputError("inner product on k is not positive definite");
    inner_onb_ = inner_llt_.matrixU().solve(Mat::Identity(d_, d_));
    basepoint_.resize(basis().size());
    for (int m = 0; m < basis().size(); ++m) basepoint_[m] = basis().evaluate_mode(m, {0.0, 0.0});
  }

  const ModelParams& params() const { return params_; }
  const LieAlgebra& algebra() const { return algebra_; }
  const SpectralOperator& spectral() const { return spectral_; }
  const ModeBasis& basis() const { return spectral_.basis(); }
  int cutoff() const { return params_.cutoff; }
  int ambient() const { return spectral_.basis().cutoff(); }
  bool quotient() const { return offset_ == 1; }
  int lie_dim() const { return d_; }
  /// First stored mode (1 for the based-loop model, whose constant part is implicit).
  int first_mode() const { return offset_; }

  Eigen::Index dim() const { return static_cast<Eigen::Index>(basis().size() - offset_) * d_; }
  Eigen::Index index(int mode, int a) const { return static_cast<Eigen::Index>(mode - offset_) * d_ + a; }

  /// Stored modes of degree <= c, in basis order.
  std::vector<int> modes_within(int c) const {
    std::vector<int> out;
    for (int m = offset_; m < basis().size(); ++m)
      if (basis().mode(m).degree() <= c) out.push_back(m);
    return out;
  }

  /// Coordinates (mode-major) of all stored modes of degree <= c.
  std::vector<Eigen::Index> coordinates_within(int c) const {
    std::vector<Eigen::Index> out;
    for (int m : modes_within(c))
      for (int a = 0; a < d_; ++a) out.push_back(index(m, a));
    return out;
  }

  Vec zero() const { return Vec::Zero(dim()); }

  /// f (x) a for a single basis mode.
  Vec element(int mode, const Vec& a) const {
    detail::require(mode >= offset_ && mode < basis().size(), "mode index out of range for this model");
    detail::require(a.size() == d_, "Lie vector has wrong length");
    Vec v = zero();
    v.segment(index(mode, 0), d_) = a;
    return v;
  }

  /// F (x) a for a scalar function given by ambient-basis coefficients. The constant
  /// component is ignored in the based-loop model.
  Vec tensor(const Vec& f, const Vec& a) const {
    detail::require(f.size() == basis().size(), "function coefficients do not match the ambient basis");
    detail::require(a.size() == d_, "Lie vector has wrong length");
    Vec v = zero();
    for (int m = offset_; m < basis().size(); ++m)
      if (f[m] != 0.0) v.segment(index(m, 0), d_) = f[m] * a;
    return v;
  }

  /// Ambient-basis coefficients of the Lie component `a` of x.
  Vec component(const Vec& x, int a) const {
    Vec f = Vec::Zero(basis().size());
    for (int m = offset_; m < basis().size(); ++m) f[m] = x[index(m, a)];
    if (quotient()) f[0] = -f.dot(basepoint_);
    return f;
  }

  int degree(const Vec& x) const {
    int deg = 0;
    for (int m = offset_; m < basis().size(); ++m)
      if (x.segment(index(m, 0), d_).cwiseAbs().maxCoeff() != 0.0) deg = std::max(deg, basis().mode(m).degree());
    return deg;
  }

  // --- MetrizedSpace interface ---

  Vec bracket(const Vec& x, const Vec& y) const {
    check(x);
    check(y);
    const Vec xf = to_full(x), yf = to_full(y);
    Vec out = Vec::Zero(full_size());
    std::array<ProductTerm, 2> terms;
    const auto rx = nonzero_rows(xf), ry = nonzero_rows(yf);
    Vec lie(d_);
    for (int p : rx)
      for (int q : ry) {
        lie.setZero();
        for (const auto& e : algebra_.entries()) lie[e.k] += e.value * xf[p * d_ + e.i] * yf[q * d_ + e.j];
        const int n = basis().product(p, q, terms);
        for (int t = 0; t < n; ++t) out.segment(terms[t].index * d_, d_) += terms[t].coeff * lie;
      }
    return from_full(out);
  }

  /// ad_x^T v in coefficient coordinates.
  Vec bracket_transpose(const Vec& x, const Vec& v) const {
    check(x);
    check(v);
    const Vec xf = to_full(x);
    Vec vf = Vec::Zero(full_size());
    vf.tail(dim()) = v;
    Vec out = Vec::Zero(full_size());
    std::array<ProductTerm, 2> terms;
    const auto rx = nonzero_rows(xf), rv = nonzero_rows(vf);
    Vec lie(d_);
    for (int p : rx)
      for (int m : rv) {
        lie.setZero();
        for (const auto& e : algebra_.entries()) lie[e.j] += e.value * xf[p * d_ + e.i] * vf[m * d_ + e.k];
        const int n = basis().product(p, m, terms);
        for (int t = 0; t < n; ++t) out.segment(terms[t].index * d_, d_) += terms[t].coeff * lie;
      }
    if (!quotient()) return out;
    // Transpose of the basepoint embedding y -> y - y(0).
    Vec res = out.tail(dim());
    const Vec c0 = out.head(d_);
    for (int m = 1; m < basis().size(); ++m)
      if (basepoint_[m] != 0.0) res.segment(index(m, 0), d_) -= basepoint_[m] * c0;
    return res;
  }

  Vec metric_apply(const Vec& v) const {
    check(v);
    Vec out(dim());
    for (int m = offset_; m < basis().size(); ++m)
      out.segment(index(m, 0), d_) = spectral_.p_s(m) * (algebra_.inner_gram() * v.segment(index(m, 0), d_));
    return out;
  }

  Vec metric_solve(const Vec& v) const {
    check(v);
    Vec out(dim());
    for (int m = offset_; m < basis().size(); ++m)
      out.segment(index(m, 0), d_) = spectral_.g(m) * inner_llt_.solve(Vec(v.segment(index(m, 0), d_)));
    return out;
  }

  Vec onb_vector(Eigen::Index i) const {
    const int m = static_cast<int>(i / d_) + offset_;
    const int a = static_cast<int>(i % d_);
    return element(m, inner_onb_.col(a) / std::sqrt(spectral_.p_s(m)));
  }

  /// Orthonormal basis vector for mode `mode` and k-direction a.
  Vec onb_vector(int mode, int a) const { return onb_vector(index(mode, a)); }

  // --- G-form operators (m0 > 0) ---

  /// G = P^{-s} applied mode-wise.
  Vec apply_G(const Vec& v) const { return scale_modes(v, spectral_.g_multipliers()); }
  /// G^{-1} = P^s applied mode-wise.
  Vec apply_Ginv(const Vec& v) const { return scale_modes(v, spectral_.p_s_multipliers()); }

  /// Euclidean projection to degree <= c.
  Vec project(const Vec& v, int c) const {
    Vec out = v;
    for (int m = offset_; m < basis().size(); ++m)
      if (basis().mode(m).degree() > c) out.segment(index(m, 0), d_).setZero();
    return out;
  }

  /// Random element supported on `support` random modes of degree <= c.
  template <class Rng>
  Vec random_element(Rng& rng, int c, int support = 3) const {
    const auto modes = modes_within(c);
    std::uniform_int_distribution<std::size_t> pick(0, modes.size() - 1);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    Vec v = zero();
    for (int t = 0; t < support; ++t) {
      const int m = modes[pick(rng)];
      for (int a = 0; a < d_; ++a) v[index(m, a)] += coef(rng);
    }
    return v;
  }

 private:
  Eigen::Index full_size() const { return static_cast<Eigen::Index>(basis().size()) * d_; }

  void check(const Vec& v) const {
    if (v.size() != dim())
      throw InputError("model vector has length " + std::to_string(v.size()) + ", expected " + std::to_string(dim()));
  }

  Vec to_full(const Vec& x) const {
    if (!quotient()) return x;
    Vec f = Vec::Zero(full_size());
    f.tail(dim()) = x;
    Vec c0 = Vec::Zero(d_);
    for (int m = 1; m < basis().size(); ++m)
      if (basepoint_[m] != 0.0) c0 -= basepoint_[m] * x.segment(index(m, 0), d_);
    f.head(d_) = c0;
    return f;
  }

  Vec from_full(const Vec& f) const { return quotient() ? Vec(f.tail(dim())) : f; }

  std::vector<int> nonzero_rows(const Vec& f) const {
    std::vector<int> rows;
    const int n = static_cast<int>(f.size() / d_);
    for (int m = 0; m < n; ++m) {
      for (int a = 0; a < d_; ++a)
        if (f[m * d_ + a] != 0.0) {
          rows.push_back(m);
          break;
        }
    }
    return rows;
  }

  Vec scale_modes(const Vec& v, const Vec& mult) const {
    check(v);
    if (quotient()) throw InputError("G-form operators are not defined on the based-loop model (m0 = 0)");
    Vec out = v;
    for (int m = 0; m < basis().size(); ++m) out.segment(index(m, 0), d_) *= mult[m];
    return out;
  }

  ModelParams params_;
  LieAlgebra algebra_;
  SpectralOperator spectral_;
  int d_ = 0;
  int offset_ = 0;
  Eigen::LLT<Mat> inner_llt_;
  Mat inner_onb_;
  Vec basepoint_;
};

static_assert(MetrizedSpace<TruncatedGroupModel>);
static_assert(MetrizedSpace<MetrizedAlgebra>);

/// Dense matrix of an operator restricted to a coordinate subspace (rows and columns).
struct OperatorMatrix {
  std::vector<Eigen::Index> coords;
  Mat entries;
};

/// Applies `op` to every coordinate vector in `coords` and keeps the components in `coords`.
inline OperatorMatrix assemble_operator(const TruncatedGroupModel& model, const std::vector<Eigen::Index>& coords,
                                        const std::function<Vec(const Vec&)>& op) {
  OperatorMatrix out{coords, Mat::Zero(static_cast<Eigen::Index>(coords.size()), static_cast<Eigen::Index>(coords.size()))};
  for (std::size_t c = 0; c < coords.size(); ++c) {
    Vec e = model.zero();
    e[coords[c]] = 1.0;
    const Vec r = op(e);
    for (std::size_t row = 0; row < coords.size(); ++row) out.entries(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(c)) = r[coords[row]];
  }
  return out;
}

/// G-form operator algebra on the model: ad, G, G^{-1} and the composite expressions of
/// the curvature operator built from them.
class GFormCalculus {
 public:
  explicit GFormCalculus(const TruncatedGroupModel& m) : m_(m) {
    if (m.quotient()) throw InputError("G-form calculus needs m0 > 0");
  }

  Vec ad(const Vec& x, const Vec& z) const { return m_.bracket(x, z); }
  Vec G(const Vec& v) const { return m_.apply_G(v); }
  Vec Ginv(const Vec& v) const { return m_.apply_Ginv(v); }

  /// -G ad_x G^{-1} y.
  Vec ad_star(const Vec& x, const Vec& y) const { return -G(ad(x, Ginv(y))); }

  /// [G^{-1}, ad_x] z.
  Vec comm_Ginv_ad(const Vec& x, const Vec& z) const { return Ginv(ad(x, z)) - ad(x, Ginv(z)); }
  /// [G, ad_x] z.
  Vec comm_G_ad(const Vec& x, const Vec& z) const { return G(ad(x, z)) - ad(x, G(z)); }

  /// R(x,y)z from the condensed commutator expression valid for G-form metrics. The four
  /// bracket terms alone miss half the first-line operator, which only vanishes for scalar G;
  /// it is added back here.
  Vec curvature_condensed(const Vec& x, const Vec& y, const Vec& z) const {
    return curvature_condensed_brackets(x, y, z) + 0.5 * first_line_direct(x, y, z);
  }

  /// The four bracket terms of the condensed expression without the first-line correction.
  Vec curvature_condensed_brackets(const Vec& x, const Vec& y, const Vec& z) const {
    const Vec gx = Ginv(x), gy = Ginv(y);
    auto A = [&](const Vec& u, const Vec& gu, const Vec& w) { return G(Vec(comm_Ginv_ad(u, w) - ad(gu, w))); };
    auto B = [&](const Vec& u, const Vec& w) { return G(ad(u, Ginv(w))); };  // G ad_u G^{-1}
    auto C = [&](const Vec& gu, const Vec& w) { return G(ad(gu, w)); };      // G ad_{G^{-1}u}
    const Vec t1 = A(x, gx, A(y, gy, z)) - A(y, gy, A(x, gx, z));
    const Vec t2 = B(x, C(gy, z)) - C(gy, B(x, z));
    const Vec t3 = B(y, C(gx, z)) - C(gx, B(y, z));
    const Vec t4 = G(ad(Ginv(ad(x, y)), z));
    return 0.25 * (t1 - 2.0 * t2 + 2.0 * t3 + 2.0 * t4);
  }

  /// First line of the G-form curvature operator, assembled term by term:
  /// -ad_[x,y] + [ad_x, G ad_y G^{-1}] + [G ad_x G^{-1}, ad_y] - G ad_[x,y] G^{-1}.
  Vec first_line_direct(const Vec& x, const Vec& y, const Vec& z) const {
    const Vec xy = ad(x, y);
    auto B = [&](const Vec& u, const Vec& w) { return G(ad(u, Ginv(w))); };
    return -ad(xy, z) + (ad(x, B(y, z)) - B(y, ad(x, z))) + (B(x, ad(y, z)) - ad(y, B(x, z))) - B(xy, z);
  }

  /// [G [G^{-1}, ad_y], G [G^{-1}, ad_x]] z.
  Vec first_line_commutator(const Vec& x, const Vec& y, const Vec& z) const {
    auto H = [&](const Vec& u, const Vec& w) { return G(comm_Ginv_ad(u, w)); };
    return H(y, H(x, z)) - H(x, H(y, z));
  }

  /// [G, ad_x][G^{-1}, ad_y] z - [G, ad_y][G^{-1}, ad_x] z.
  Vec first_line_product(const Vec& x, const Vec& y, const Vec& z) const {
    return comm_G_ad(x, comm_Ginv_ad(y, z)) - comm_G_ad(y, comm_Ginv_ad(x, z));
  }

  /// The operator of x whose k-trace equals that of x -> R(x,y)z:
  /// -1/4 ( -[ad_y, G ad_{G^{-1}z}] + G[ad_y,[ad_z,G^{-1}]] + [ad_y, G ad_z G^{-1}]
  ///        + G ad_{G^{-1}y} [ad_z G^{-1}, G] + G ad_{G^{-1}y} G ad_{G^{-1}z} ).
  Vec traced_operator(const Vec& y, const Vec& z, const Vec& x) const {
    const Vec gy = Ginv(y), gz = Ginv(z);
    auto Cz = [&](const Vec& w) { return G(ad(gz, w)); };  // G ad_{G^{-1}z}
    auto Bz = [&](const Vec& w) { return G(ad(z, Ginv(w))); };  // G ad_z G^{-1}
    const Vec t1 = ad(y, Cz(x)) - Cz(ad(y, x));
    // [ad_z, G^{-1}] w = [z, G^{-1} w] - G^{-1}[z, w]
    auto comm_adz_Ginv = [&](const Vec& w) { return Vec(ad(z, Ginv(w)) - Ginv(ad(z, w))); };
    const Vec t2 = G(Vec(ad(y, comm_adz_Ginv(x)) - comm_adz_Ginv(ad(y, x))));
    const Vec t3 = ad(y, Bz(x)) - Bz(ad(y, x));
    // [ad_z G^{-1}, G] x = ad_z x - G ad_z G^{-1} x
    const Vec inner4 = ad(z, x) - G(ad(z, Ginv(x)));
    const Vec t4 = G(ad(gy, inner4));
    const Vec t5 = G(ad(gy, Cz(x)));
    return -0.25 * (-t1 + t2 + t3 + t4 + t5);
  }

 private:
  const TruncatedGroupModel& m_;
};

/// Largest entrywise deviation among the three first-line assemblies, over z in the cutoff.
struct FirstLineReport {
  double direct_vs_commutator = 0, direct_vs_product = 0, commutator_vs_product = 0, scale = 0;
  double max_deviation() const { return std::max({direct_vs_commutator, direct_vs_product, commutator_vs_product}); }
};

inline FirstLineReport first_line_identity_check(const TruncatedGroupModel& model, const Vec& x, const Vec& y) {
  const GFormCalculus calc(model);
  for (int c : {0, 1})
    if (model.degree(c == 0 ? x : y) > model.cutoff()) throw TruncationError("input exceeds the model cutoff");
  FirstLineReport r;
  for (auto coord : model.coordinates_within(model.cutoff())) {
    Vec z = model.zero();
    z[coord] = 1.0;
    const Vec d = calc.first_line_direct(x, y, z);
    const Vec c = calc.first_line_commutator(x, y, z);
    const Vec p = calc.first_line_product(x, y, z);
    r.direct_vs_commutator = std::max(r.direct_vs_commutator, max_abs(d - c));
    r.direct_vs_product = std::max(r.direct_vs_product, max_abs(d - p));
    r.commutator_vs_product = std::max(r.commutator_vs_product, max_abs(c - p));
    r.scale = std::max({r.scale, max_abs(d), max_abs(c), max_abs(p)});
  }
  return r;
}

/// Max entrywise |ad_x^* y - (-G ad_x G^{-1} y)| over basis y in the cutoff, with the
/// generic adjoint taken from the metric.
inline double gform_adjoint_deviation(const TruncatedGroupModel& model, const Vec& x) {
  const GFormCalculus calc(model);
  const Geometry geo(model);
  double dev = 0;
  for (auto coord : model.coordinates_within(model.cutoff())) {
    Vec y = model.zero();
    y[coord] = 1.0;
    dev = std::max(dev, max_abs(geo.ad_star(x, y) - calc.ad_star(x, y)));
  }
  return dev;
}

/// Condensed curvature operator z -> R(x,y)z on the cutoff-N coordinates, cross-checked
/// against the general Levi-Civita route on every basis z.
inline OperatorMatrix curvature_condensed(const TruncatedGroupModel& model, const Vec& x, const Vec& y,
                                          double tol = 1e-9) {
  if (std::max(model.degree(x), model.degree(y)) > model.cutoff())
    throw TruncationError("curvature_condensed inputs exceed the model cutoff");
  const GFormCalculus calc(model);
  const Geometry geo(model);
  const auto coords = model.coordinates_within(model.cutoff());
  double worst = 0, scale = 1;
  auto op = [&](const Vec& z) {
    const Vec a = calc.curvature_condensed(x, y, z);
    const Vec b = geo.curvature(x, y, z);
    worst = std::max(worst, max_abs(a - b));
    scale = std::max({scale, max_abs(a), max_abs(b)});
    return model.project(a, model.cutoff());
  };
  OperatorMatrix out = assemble_operator(model, coords, op);
  if (worst > tol * scale)
    throw ConsistencyError("condensed curvature disagrees with the general formula by " + std::to_string(worst));
  return out;
}

struct DecayProbe {
  std::vector<double> frequencies;
  std::vector<double> ratios;
  double slope = 0;
  bool degenerate = false;   ///< all ratios zero (e.g. abelian k)
  bool unreliable = false;   ///< window reaches the ambient cutoff
};

/// Least-squares slope of log(r) against log(1 + |k|).
inline double loglog_slope(const std::vector<double>& k, const std::vector<double>& r) {
  const std::size_t n = k.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(1.0 + k[i]), ly = std::log(r[i]);
    sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// r_k = |R(x,y)(e_k (x) a)| / |e_k (x) a| in the model metric, for cosine modes with the
/// given frequencies, and the fitted decay slope.
inline DecayProbe order_decay_probe(const TruncatedGroupModel& model, const Vec& x, const Vec& y, const Vec& a,
                                    const std::vector<std::array<int, 2>>& freqs) {
  detail::require(freqs.size() >= 2, "decay probe needs at least two modes");
  const Geometry geo(model);
  DecayProbe out;
  const int reach = model.degree(x) + model.degree(y);
  for (const auto& k : freqs) {
    const int mode = model.basis().index_of(k, Parity::Cos);
    if (mode < 0) throw TruncationError("probe frequency outside the ambient basis");
    if (model.basis().mode(mode).degree() + 2 * reach > model.ambient()) out.unreliable = true;
    const Vec z = model.element(mode, a);
    out.frequencies.push_back(std::hypot(double(k[0]), double(k[1])));
    out.ratios.push_back(geo.norm(geo.curvature(x, y, z)) / geo.norm(z));
  }
  const double top = *std::max_element(out.ratios.begin(), out.ratios.end());
  if (top < 1e-300 || std::any_of(out.ratios.begin(), out.ratios.end(), [](double r) { return r <= 0; })) {
    out.degenerate = true;
    out.slope = 0;
    return out;
  }
  out.slope = loglog_slope(out.frequencies, out.ratios);
  return out;
}

}  // namespace curvlab
