#pragma once

// Small least-squares fits used by the cutoff extrapolation and the slope probes.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <vector>

#include "curvlab/errors.hpp"
#include "curvlab/lie_algebra.hpp"

namespace curvlab {

struct LinearFit {
  Vec coef;
  double residual = 0;  ///< root mean square of the fit residuals
};

/// Least squares for columns of `design` against `rhs`.
inline LinearFit least_squares(const Mat& design, const Vec& rhs) {
  detail::require(design.rows() == rhs.size(), "fit: row count mismatch");
  detail::require(design.rows() >= design.cols(), "fit: not enough samples");
  LinearFit f;
  f.coef = design.colPivHouseholderQr().solve(rhs);
  f.residual = std::sqrt((design * f.coef - rhs).squaredNorm() / static_cast<double>(rhs.size()));
  return f;
}

/// Slope of log|v| against log(x). Returns -inf when every |v| is below `floor`
/// (the sequence is exactly flat to rounding).
inline double log_log_slope(const std::vector<double>& x, const std::vector<double>& v, double floor = 0) {
  detail::require(x.size() == v.size() && x.size() >= 2, "slope fit needs at least two samples");
  bool all_small = true;
  for (double a : v) all_small = all_small && std::abs(a) <= floor;
  if (all_small) return -std::numeric_limits<double>::infinity();
  Mat design(x.size(), 2);
  Vec rhs(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    design(i, 0) = 1;
    design(i, 1) = std::log(x[i]);
    rhs[i] = std::log(std::max(std::abs(v[i]), std::max(floor, 1e-300)));
  }
  return least_squares(design, rhs).coef[1];
}

}  // namespace curvlab
