#pragma once

// Configuration groups prod_{v in V} K: the metric is the inverse Green's matrix of P^s on
// the points, tensored with the inner product of k.

#include <Eigen/Dense>

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "curvlab/curvature.hpp"
#include "curvlab/errors.hpp"
#include "curvlab/lie_algebra.hpp"
#include "curvlab/spectral_domain.hpp"

namespace curvlab {

inline constexpr double kMaxGreensCondition = 1e12;

class Configuration {
 public:
  Configuration(Domain domain, std::vector<Point> points, double s, double m0, const LieAlgebra& algebra)
      : domain_(domain), points_(std::move(points)), s_(s), m0_(m0) {
    detail::require(!points_.empty(), "configuration needs at least one point");
    detail::require(m0 > 0, "configuration metrics need m0 > 0");
    if (2 * s <= domain_dim(domain))
      throw DivergenceError("configuration metric needs 2s > dim so that G(v,v) is finite");
    const auto n = static_cast<Eigen::Index>(points_.size());
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < i; ++j)
        if (torus_distance(points_[i], points_[j]) < 1e-12)
          throw InputError("coincident points " + std::to_string(j) + " and " + std::to_string(i));
    green_ = Mat(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j <= i; ++j) green_(i, j) = green_(j, i) = greens_function(domain, points_[i], points_[j], s, m0);
    Eigen::LLT<Mat> llt(green_);
    if (llt.info() != Eigen::Success) throw IllConditionedError("Green's matrix is not positive definite");
    const Eigen::SelfAdjointEigenSolver<Mat> eig(green_, Eigen::EigenvaluesOnly);
    condition_ = eig.eigenvalues().maxCoeff() / eig.eigenvalues().minCoeff();
    if (!(eig.eigenvalues().minCoeff() > 0) || condition_ > kMaxGreensCondition)
      throw IllConditionedError("Green's matrix condition number " + std::to_string(condition_) + " exceeds 1e12");
    green_inv_ = llt.solve(Mat::Identity(n, n));
    green_inv_ = 0.5 * (green_inv_ + green_inv_.transpose());
    const int d = algebra.dim();
    Mat metric(n * d, n * d);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) metric.block(i * d, j * d, d, d) = green_inv_(i, j) * algebra.inner_gram();
    space_.emplace(algebra.direct_sum(static_cast<int>(n)), metric);
  }

  Domain domain() const { return domain_; }
  const std::vector<Point>& points() const { return points_; }
  double s() const { return s_; }
  double m0() const { return m0_; }
  const Mat& greens_matrix() const { return green_; }
  const Mat& greens_inverse() const { return green_inv_; }
  double condition_number() const { return condition_; }
  const MetrizedAlgebra& space() const { return *space_; }
  const Mat& metric_gram() const { return space_->metric_gram(); }

  /// Coordinates of x(v) along e_a.
  Eigen::Index index(int site, int a) const { return static_cast<Eigen::Index>(site) * lie_dim() + a; }
  int lie_dim() const { return space_->algebra().dim() / static_cast<int>(points_.size()); }

 private:
  static double torus_distance(const Point& a, const Point& b) {
    return std::hypot(detail::wrap_angle(a[0] - b[0]), detail::wrap_angle(a[1] - b[1]));
  }

  Domain domain_;
  std::vector<Point> points_;
  double s_, m0_;
  Mat green_, green_inv_;
  double condition_ = 1;
  std::optional<MetrizedAlgebra> space_;
};

inline double config_ricci(const Configuration& c, const Vec& y, const Vec& z) {
  return Geometry(c.space()).ricci_full(y, z);
}

/// Ric(e_i, e_j) on the configuration algebra.
inline Mat config_ricci_matrix(const Configuration& c) { return Geometry(c.space()).ricci_matrix(); }

/// Smallest eigenvalue of metric^-1 Ric.
inline double min_relative_ricci(const Configuration& c, const Mat& ricci) {
  const Eigen::GeneralizedSelfAdjointEigenSolver<Mat> eig(ricci, c.metric_gram(), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

/// n equally spaced points v_i = i * spacing on the circle, or on the square lattice of side
/// sqrt(n) on the torus.
inline std::vector<Point> lattice_points(Domain domain, int n, double spacing) {
  detail::require(n >= 1, "point count must be positive");
  detail::require(spacing > 0, "spacing must be positive");
  std::vector<Point> pts;
  if (domain == Domain::Circle) {
    for (int i = 0; i < n; ++i) pts.push_back({i * spacing, 0.0});
    return pts;
  }
  const int side = static_cast<int>(std::lround(std::sqrt(double(n))));
  detail::require(side * side == n, "torus lattices need a square point count");
  for (int i = 0; i < side; ++i)
    for (int j = 0; j < side; ++j) pts.push_back({i * spacing, j * spacing});
  return pts;
}

/// One coordinate tuple per line ("x" on the circle, "x y" on the torus); '#' comments.
inline std::vector<Point> parse_points(std::istream& in, Domain domain) {
  std::vector<Point> pts;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    Point p{0, 0};
    if (!(ls >> p[0])) continue;
    if (domain == Domain::Torus && !(ls >> p[1]))
      throw InputError("point line " + std::to_string(lineno) + " needs two coordinates");
    std::string rest;
    if (ls >> rest) throw InputError("trailing tokens on point line " + std::to_string(lineno));
    pts.push_back(p);
  }
  return pts;
}

inline std::vector<Point> load_points(const std::string& path, Domain domain) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open point file: " + path);
  return parse_points(in, domain);
}

// ---------------------------------------------------------------------------
// Lower-bound scan

struct ScanGrid {
  Domain domain = Domain::Circle;
  std::vector<int> point_counts{4, 8, 16};
  /// Spacing as a fraction of the uniform spacing 2pi / sqrt[dim](|V|).
  std::vector<double> spacing_factors{1.0, 0.5, 0.25};
  std::vector<double> s_values{1.0, 1.5};
  std::vector<double> m0_values{0.1, 1.0};
};

struct ScanCell {
  Domain domain;
  int count;
  double spacing, s, m0;
  double min_rel_ricci = std::numeric_limits<double>::quiet_NaN();
  double condition_number = std::numeric_limits<double>::quiet_NaN();
  std::string flags = "ok";
};

inline double uniform_spacing(Domain domain, int n) {
  const double tau = 2 * std::numbers::pi;
  return domain == Domain::Circle ? tau / n : tau / std::sqrt(double(n));
}

/// Every cell of the grid in (count, spacing, s, m0) order. Cells whose Green's matrix is
/// ill-conditioned or whose exponent is too small are flagged and skipped, as are cells where
/// the two curvature routes disagree by more than rounding allows.
inline std::vector<ScanCell> ricci_lower_bound_scan(const ScanGrid& grid, const LieAlgebra& algebra) {
  std::vector<ScanCell> out;
  for (int n : grid.point_counts)
    for (double f : grid.spacing_factors)
      for (double s : grid.s_values)
        for (double m0 : grid.m0_values) {
          ScanCell cell{grid.domain, n, f * uniform_spacing(grid.domain, n), s, m0};
          try {
            const Configuration c(grid.domain, lattice_points(grid.domain, n, cell.spacing), s, m0, algebra);
            cell.condition_number = c.condition_number();
            cell.min_rel_ricci = min_relative_ricci(c, config_ricci_matrix(c));
          } catch (const IllConditionedError&) {
            cell.flags = "ill-conditioned";
          } catch (const DivergenceError&) {
            cell.flags = "divergent-diagonal";
          } catch (const ConsistencyError&) {
            cell.flags = "precision-loss";
            cell.min_rel_ricci = std::numeric_limits<double>::quiet_NaN();
          }
          out.push_back(cell);
        }
  return out;
}

}  // namespace curvlab
