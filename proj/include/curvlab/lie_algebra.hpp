#pragma once

// Compact Lie algebras given by structure constants in a fixed basis.

#include <Eigen/Dense>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "curvlab/errors.hpp"

namespace curvlab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class InnerProduct { NegativeKilling, Identity };

/// Nonzero structure constant [e_i, e_j] has component `value` along e_k.
struct StructureEntry {
  int i, j, k;
  double value;
};

/// A real Lie algebra with an ad-invariant inner product <<.,.>> and its Killing form.
///
/// c(i,j,k) is the e_k component of [e_i,e_j]. Values are immutable once built.
class LieAlgebra {
 public:
  LieAlgebra() = default;

  /// Builds from a dense table of size dim^3 (index (i*dim + j)*dim + k).
  LieAlgebra(int dim, std::vector<double> table, InnerProduct ip = InnerProduct::NegativeKilling, std::string name = {})
      : dim_(dim), c_(std::move(table)), name_(std::move(name)) {
    detail::require(dim_ > 0, "Lie algebra dimension must be positive");
    detail::require(c_.size() == static_cast<std::size_t>(dim_) * dim_ * dim_,
                    "structure constant table has wrong size");
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j)
        for (int k = 0; k < dim_; ++k)
          if (const double v = c(i, j, k); v != 0.0) entries_.push_back({i, j, k, v});
    killing_ = Mat::Zero(dim_, dim_);
    for (int i = 0; i < dim_; ++i) {
      const Mat ai = ad_matrix(Vec::Unit(dim_, i));
      for (int j = 0; j <= i; ++j) killing_(i, j) = killing_(j, i) = (ai * ad_matrix(Vec::Unit(dim_, j))).trace();
    }
    set_inner_product(ip);
  }

  /// Custom ad-invariant inner product; validated by check_invariants().
  LieAlgebra(int dim, std::vector<double> table, const Mat& inner_gram, std::string name = {})
      : LieAlgebra(dim, std::move(table), InnerProduct::Identity, std::move(name)) {
    detail::require(inner_gram.rows() == dim_ && inner_gram.cols() == dim_, "inner_gram has wrong shape");
    inner_ = inner_gram;
  }

  void set_inner_product(InnerProduct ip) {
    if (ip == InnerProduct::Identity) {
      inner_ = Mat::Identity(dim_, dim_);
      return;
    }
    inner_ = -killing_;
    Eigen::LLT<Mat> llt(inner_);
    if (llt.info() != Eigen::Success || llt.matrixL().toDenseMatrix().diagonal().minCoeff() < 1e-12)
      throw InputError("-Killing form is not positive definite (algebra not compact semisimple); "
                       "use the identity inner product");
  }

  int dim() const { return dim_; }
  const std::string& name() const { return name_; }
  double c(int i, int j, int k) const { return c_[(static_cast<std::size_t>(i) * dim_ + j) * dim_ + k]; }
  const std::vector<StructureEntry>& entries() const { return entries_; }
  const Mat& inner_gram() const { return inner_; }
  const Mat& killing_gram() const { return killing_; }
  bool abelian() const { return entries_.empty(); }

  Vec bracket(const Vec& x, const Vec& y) const {
    check(x);
    check(y);
    Vec out = Vec::Zero(dim_);
    for (const auto& e : entries_) out[e.k] += e.value * x[e.i] * y[e.j];
    return out;
  }

  /// Matrix of y -> [x,y].
  Mat ad_matrix(const Vec& x) const {
    check(x);
    Mat a = Mat::Zero(dim_, dim_);
    for (const auto& e : entries_) a(e.k, e.j) += e.value * x[e.i];
    return a;
  }

  double killing_form(const Vec& x, const Vec& y) const {
    check(x);
    check(y);
    return x.dot(killing_ * y);
  }

  double inner(const Vec& x, const Vec& y) const { return x.dot(inner_ * y); }

  /// Largest violation of antisymmetry, Jacobi, ad-invariance of inner_gram and
  /// killing_gram = trace(ad ad).
  struct InvariantReport {
    double antisymmetry = 0, jacobi = 0, ad_invariance = 0, killing = 0;
    double max() const { return std::max({antisymmetry, jacobi, ad_invariance, killing}); }
  };

  InvariantReport check_invariants() const {
    InvariantReport r;
    const int n = dim_;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) r.antisymmetry = std::max(r.antisymmetry, std::abs(c(i, j, k) + c(j, i, k)));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            double s = 0;
            for (int m = 0; m < n; ++m)
              s += c(i, j, m) * c(m, k, l) + c(j, k, m) * c(m, i, l) + c(k, i, m) * c(m, j, l);
            r.jacobi = std::max(r.jacobi, std::abs(s));
          }
    for (int a = 0; a < n; ++a) {
      const Mat ad = ad_matrix(Vec::Unit(n, a));
      r.ad_invariance = std::max(r.ad_invariance, (ad.transpose() * inner_ + inner_ * ad).cwiseAbs().maxCoeff());
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double t = 0;
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) t += c(i, k, l) * c(j, l, k);
        r.killing = std::max(r.killing, std::abs(t - killing_(i, j)));
      }
    return r;
  }

  /// Orthonormal basis of <<.,.>> as columns.
  Mat orthonormal_basis() const {
    Eigen::LLT<Mat> llt(inner_);
    return llt.matrixU().solve(Mat::Identity(dim_, dim_));
  }

  /// n copies acting on disjoint blocks; inner product is the block sum.
  LieAlgebra direct_sum(int copies) const {
    detail::require(copies > 0, "direct sum needs at least one copy");
    const int n = dim_ * copies;
    std::vector<double> table(static_cast<std::size_t>(n) * n * n, 0.0);
    for (int v = 0; v < copies; ++v)
      for (const auto& e : entries_)
        table[(static_cast<std::size_t>(v * dim_ + e.i) * n + v * dim_ + e.j) * n + v * dim_ + e.k] = e.value;
    Mat gram = Mat::Zero(n, n);
    for (int v = 0; v < copies; ++v) gram.block(v * dim_, v * dim_, dim_, dim_) = inner_;
    return LieAlgebra(n, std::move(table), gram, name_ + "^" + std::to_string(copies));
  }

  static LieAlgebra su2(InnerProduct ip = InnerProduct::NegativeKilling) {
    return from_entries(3, {{0, 1, 2, 1.0}, {1, 2, 0, 1.0}, {2, 0, 1, 1.0}}, ip, "su2");
  }

  /// Basis X_a = -i lambda_a / 2 (Gell-Mann), so [X_a, X_b] = f_abc X_c.
  static LieAlgebra su3(InnerProduct ip = InnerProduct::NegativeKilling) {
    const double h = 0.5, r = std::sqrt(3.0) / 2.0;
    const std::vector<StructureEntry> f = {{0, 1, 2, 1.0}, {0, 3, 6, h},  {0, 4, 5, -h}, {1, 3, 5, h},
                                           {1, 4, 6, h},   {2, 3, 4, h},  {2, 5, 6, -h}, {3, 4, 7, r},
                                           {5, 6, 7, r}};
    // f_abc is totally antisymmetric: expand each entry over all orderings.
    std::vector<StructureEntry> all;
    for (const auto& e : f) {
      all.push_back({e.i, e.j, e.k, e.value});
      all.push_back({e.j, e.k, e.i, e.value});
      all.push_back({e.k, e.i, e.j, e.value});
    }
    return from_entries(8, all, ip, "su3");
  }

  static LieAlgebra abelian(int dim) {
    return LieAlgebra(dim, std::vector<double>(static_cast<std::size_t>(dim) * dim * dim, 0.0), InnerProduct::Identity,
                      "u1^" + std::to_string(dim));
  }

  /// Entries (i,j,k,v) set c(i,j,k)=v and c(j,i,k)=-v; conflicting duplicates are rejected.
  static LieAlgebra from_entries(int dim, const std::vector<StructureEntry>& entries, InnerProduct ip,
                                 std::string name = {}) {
    detail::require(dim > 0, "dim must be positive");
    const std::size_t n = static_cast<std::size_t>(dim);
    std::vector<double> table(n * n * n, 0.0);
    std::vector<char> seen(n * n * n, 0);
    auto put = [&](int i, int j, int k, double v) {
      const std::size_t idx = (static_cast<std::size_t>(i) * n + j) * n + k;
      if (seen[idx] && std::abs(table[idx] - v) > 1e-15)
        throw InputError("conflicting structure constant for (" + std::to_string(i) + "," + std::to_string(j) + "," +
                         std::to_string(k) + ")");
      table[idx] = v;
      seen[idx] = 1;
    };
    for (const auto& e : entries) {
      detail::require(e.i >= 0 && e.i < dim && e.j >= 0 && e.j < dim && e.k >= 0 && e.k < dim,
                      "structure constant index out of range");
      detail::require(e.i != e.j || e.value == 0.0, "c[i][i][k] must vanish");
      put(e.i, e.j, e.k, e.value);
      put(e.j, e.i, e.k, -e.value);
    }
    return LieAlgebra(dim, std::move(table), ip, std::move(name));
  }

  /// Text format: a header line "dim N", then lines "i j k value" (0-based). '#' starts a comment.
  static LieAlgebra parse(std::istream& in, InnerProduct ip = InnerProduct::NegativeKilling, std::string name = {}) {
    int dim = -1;
    std::vector<StructureEntry> entries;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      std::istringstream ls(line);
      std::string first;
      if (!(ls >> first)) continue;
      if (first == "dim") {
        detail::require(dim < 0, "duplicate dim header at line " + std::to_string(lineno));
        detail::require(static_cast<bool>(ls >> dim) && dim > 0, "bad dim header at line " + std::to_string(lineno));
        continue;
      }
      detail::require(dim > 0, "structure constants before 'dim' header at line " + std::to_string(lineno));
      StructureEntry e{};
      std::istringstream full(line);
      if (!(full >> e.i >> e.j >> e.k >> e.value))
        throw InputError("malformed structure constant line " + std::to_string(lineno));
      std::string rest;
      detail::require(!(full >> rest), "trailing tokens at line " + std::to_string(lineno));
      entries.push_back(e);
    }
    detail::require(dim > 0, "missing 'dim N' header");
    return from_entries(dim, entries, ip, std::move(name));
  }

  static LieAlgebra load(const std::string& path, InnerProduct ip = InnerProduct::NegativeKilling) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open structure constant file: " + path);
    return parse(in, ip, path);
  }

  /// "su2", "su3", "u1" / "abelianN", or a file path.
  static LieAlgebra by_name(const std::string& name, InnerProduct ip = InnerProduct::NegativeKilling) {
    if (name == "su2") return su2(ip);
    if (name == "su3") return su3(ip);
    if (name == "u1") return abelian(1);
    if (name.rfind("abelian", 0) == 0 && name.size() > 7) return abelian(std::stoi(name.substr(7)));
    return load(name, ip);
  }

 private:
  void check(const Vec& x) const {
    if (x.size() != dim_)
      throw InputError("coefficient vector has length " + std::to_string(x.size()) + ", expected " +
                       std::to_string(dim_));
  }

  int dim_ = 0;
  std::vector<double> c_;
  std::vector<StructureEntry> entries_;
  Mat inner_;
  Mat killing_;
  std::string name_;
};

}  // namespace curvlab
