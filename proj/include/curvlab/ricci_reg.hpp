#pragma once

// Two-step Ricci regularization: trace x -> R(x,y)z over k first, mode by mode, then
// sum the mode traces with increasing cutoff and extrapolate.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "curvlab/curvature.hpp"
#include "curvlab/errors.hpp"
#include "curvlab/fit.hpp"
#include "curvlab/sobolev_model.hpp"

namespace curvlab {

// ---------------------------------------------------------------------------
// Test vectors

/// A single basis mode tensored with a basis direction of k, e.g. "cos2@1".
struct TestVector {
  std::array<int, 2> k{1, 0};
  Parity parity = Parity::Cos;
  int direction = 0;

  std::string label() const {
    std::ostringstream os;
    os << (parity == Parity::Const ? "const" : parity == Parity::Cos ? "cos" : "sin");
    if (parity != Parity::Const) {
      os << k[0];
      if (k[1] != 0) os << "_" << k[1];
    }
    os << "@" << direction;
    return os.str();
  }

  int mode(const TruncatedGroupModel& model) const {
    const int m = model.basis().index_of(k, parity);
    if (m < 0) throw InputError("test vector " + label() + " is outside the model basis");
    if (m < model.first_mode()) throw InputError("test vector " + label() + " is not in the quotient model");
    if (model.basis().mode(m).degree() > model.cutoff()) throw InputError("test vector " + label() + " exceeds the cutoff");
    return m;
  }

  /// Unit vector in the k-inner product times the (L2-normalized) basis function.
  Vec build(const TruncatedGroupModel& model) const {
    detail::require(direction >= 0 && direction < model.lie_dim(), "test vector direction out of range");
    return model.element(mode(model), Vec::Unit(model.lie_dim(), direction));
  }
};

/// Parses "cos1@0", "sin2@1", "const@0", "cos1_2@0" (torus frequency (1,2)).
inline TestVector parse_test_vector(const std::string& text) {
  const auto at = text.find('@');
  detail::require(at != std::string::npos, "test vector '" + text + "' lacks '@direction'");
  TestVector v;
  std::string head = text.substr(0, at);
  try {
    v.direction = std::stoi(text.substr(at + 1));
  } catch (const std::exception&) {
    throw InputError("bad direction in test vector '" + text + "'");
  }
  if (head == "const") {
    v.parity = Parity::Const;
    v.k = {0, 0};
    return v;
  }
  if (head.rfind("cos", 0) == 0)
    v.parity = Parity::Cos;
  else if (head.rfind("sin", 0) == 0)
    v.parity = Parity::Sin;
  else
    throw InputError("test vector '" + text + "' must start with cos, sin or const");
  head = head.substr(3);
  const auto us = head.find('_');
  try {
    v.k[0] = std::stoi(head.substr(0, us));
    v.k[1] = us == std::string::npos ? 0 : std::stoi(head.substr(us + 1));
  } catch (const std::exception&) {
    throw InputError("bad frequency in test vector '" + text + "'");
  }
  detail::require(v.k[0] != 0 || v.k[1] != 0, "test vector '" + text + "' has zero frequency; use const");
  return v;
}

/// A sum of test vectors, written with '+' ("cos1@0+cos2@1").
struct VectorSpec {
  std::vector<TestVector> terms;

  std::string label() const {
    std::string out;
    for (const auto& t : terms) out += (out.empty() ? "" : "+") + t.label();
    return out;
  }
  int degree(const TruncatedGroupModel& model) const {
    int d = 0;
    for (const auto& t : terms) d = std::max(d, model.basis().mode(t.mode(model)).degree());
    return d;
  }
  Vec build(const TruncatedGroupModel& model) const {
    Vec v = model.zero();
    for (const auto& t : terms) v += t.build(model);
    return v;
  }
};

inline VectorSpec parse_vector_spec(const std::string& text) {
  VectorSpec v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, '+')) v.terms.push_back(parse_test_vector(item));
  detail::require(!v.terms.empty(), "empty test vector");
  return v;
}

/// The `count` lowest stored modes of the model, all along `direction`.
inline std::vector<TestVector> lowest_mode_vectors(const TruncatedGroupModel& model, int count, int direction = 0) {
  std::vector<TestVector> out;
  for (int m = model.first_mode(); m < model.basis().size() && static_cast<int>(out.size()) < count; ++m) {
    const Mode& md = model.basis().mode(m);
    out.push_back({md.k, md.parity, direction});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Mode bookkeeping

inline double mode_radius(const TruncatedGroupModel& model, int m) { return std::sqrt(double(model.basis().mode(m).norm2())); }

/// Stored modes with |k| <= M, in basis order (ascending |k|).
inline std::vector<int> modes_in_ball(const TruncatedGroupModel& model, double M) {
  detail::require(M <= model.cutoff() + 1e-12, "trace cutoff exceeds the model cutoff");
  std::vector<int> out;
  for (int m = model.first_mode(); m < model.basis().size(); ++m)
    if (model.basis().mode(m).norm2() <= M * M + 1e-9) out.push_back(m);
  return out;
}

namespace detail {

/// R(x,y)z is exact for x of degree <= M when the ambient cutoff covers M + 2 deg(y,z).
inline void require_exact_trace(const TruncatedGroupModel& model, const Vec& y, const Vec& z, double M) {
  const int reach = static_cast<int>(std::ceil(M - 1e-9)) + 2 * std::max(model.degree(y), model.degree(z));
  if (reach > model.ambient())
    throw TruncationError("trace cutoff " + std::to_string(M) + " with these test vectors needs ambient cutoff " +
                          std::to_string(reach) + ", model has " + std::to_string(model.ambient()));
}

/// sum_a <v, onb(m,a)> weighted by a k-vector per direction: returns the vector
/// (<w, onb(m,a)>)_a given w = metric_apply(v).
inline Vec contract_mode(const TruncatedGroupModel& model, const Mat& inner_onb, const Vec& w, int m) {
  const int d = model.lie_dim();
  const double scale = 1.0 / std::sqrt(model.spectral().p_s(m));
  return inner_onb.transpose() * w.segment(model.index(m, 0), d) * scale;
}

inline Mat inner_onb(const TruncatedGroupModel& model) {
  return model.algebra().orthonormal_basis();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Grouped partial traces

/// sum_a <R(e_m (x) f_a, y) z, e_m (x) f_a> for one mode m.
template <class Op>
double mode_block_trace(const TruncatedGroupModel& model, const Mat& onb, int m, Op&& op) {
  double sum = 0;
  for (int a = 0; a < model.lie_dim(); ++a) {
    const Vec x = model.onb_vector(m, a);
    const Vec w = model.metric_apply(op(x));
    sum += detail::contract_mode(model, onb, w, m)[a];
  }
  return sum;
}

/// k-grouped partial traces of x -> R(x,y)z for each cutoff (modes ascending by |k|,
/// k-directions innermost).
inline std::vector<double> grouped_partial_traces(const TruncatedGroupModel& model, const Vec& y, const Vec& z,
                                                  const std::vector<double>& cutoffs) {
  detail::require(!cutoffs.empty(), "no cutoffs given");
  detail::require(std::is_sorted(cutoffs.begin(), cutoffs.end()), "cutoffs must be increasing");
  detail::require_exact_trace(model, y, z, cutoffs.back());
  const Geometry geo(model);
  const Mat onb = detail::inner_onb(model);
  auto op = [&](const Vec& x) { return geo.curvature(x, y, z); };
  std::vector<double> out;
  double running = 0;
  std::size_t next = 0;
  for (int m : modes_in_ball(model, cutoffs.back())) {
    while (next < cutoffs.size() && mode_radius(model, m) > cutoffs[next] + 1e-9) out.push_back(running), ++next;
    running += mode_block_trace(model, onb, m, op);
  }
  while (next < cutoffs.size()) out.push_back(running), ++next;
  return out;
}

// ---------------------------------------------------------------------------
// Scalarized operator

/// S(k, k') = sum_a <R(e_k' (x) f_a, y) z, e_k (x) f_a> over stored modes with |k| <= M.
struct ScalarizedOperator {
  std::vector<int> modes;
  Mat entries;
  /// Largest entrywise deviation between the two assemblies (0 when only one ran).
  double route_deviation = 0;
  bool cross_checked = false;

  /// Mode trace over |k| <= M.
  double trace(const TruncatedGroupModel& model, double M) const {
    double t = 0;
    for (std::size_t i = 0; i < modes.size(); ++i)
      if (mode_radius(model, modes[i]) <= M + 1e-9) t += entries(i, i);
    return t;
  }
};

namespace detail {

template <class Op>
Mat assemble_scalarized(const TruncatedGroupModel& model, const std::vector<int>& modes, Op&& op) {
  const Mat onb = inner_onb(model);
  const auto n = static_cast<Eigen::Index>(modes.size());
  Mat S = Mat::Zero(n, n);
  for (Eigen::Index col = 0; col < n; ++col)
    for (int a = 0; a < model.lie_dim(); ++a) {
      const Vec w = model.metric_apply(op(model.onb_vector(modes[col], a)));
      for (Eigen::Index row = 0; row < n; ++row) S(row, col) += contract_mode(model, onb, w, modes[row])[a];
    }
  return S;
}

}  // namespace detail

/// Builds S from the general curvature and, when the model has the G-form (m0 > 0),
/// also from the k-traced five-term operator; the two must agree to `tol`.
inline ScalarizedOperator scalarize(const TruncatedGroupModel& model, const Vec& y, const Vec& z, double M = -1,
                                    double tol = 1e-9) {
  if (M < 0) M = model.cutoff();
  detail::require_exact_trace(model, y, z, M);
  ScalarizedOperator out;
  out.modes = modes_in_ball(model, M);
  const Geometry geo(model);
  out.entries = detail::assemble_scalarized(model, out.modes, [&](const Vec& x) { return geo.curvature(x, y, z); });
  if (!model.quotient()) {
    const GFormCalculus calc(model);
    const Mat traced =
        detail::assemble_scalarized(model, out.modes, [&](const Vec& x) { return calc.traced_operator(y, z, x); });
    out.route_deviation = (traced - out.entries).cwiseAbs().maxCoeff();
    out.cross_checked = true;
    const double scale = std::max(1.0, out.entries.cwiseAbs().maxCoeff());
    if (out.route_deviation > tol * scale)
      throw ConsistencyError("scalarized operator: grouped and traced assemblies differ by " +
                             std::to_string(out.route_deviation));
  }
  return out;
}

/// Matrix T(k,k') = <T e_k', e_k> in L2(dV/vol) of the scalar operator obtained from the
/// traced five-term expression by replacing ad_y, ad_z with multiplication by Y, Z.
/// On factored inputs Y (x) b, Z (x) c the k-trace of that expression is -1/4 kappa(b,c) T.
inline Mat scalar_operator_matrix(const TruncatedGroupModel& model, const Vec& Y, const Vec& Z,
                                  const std::vector<int>& modes) {
  detail::require(!model.quotient(), "scalar operator needs m0 > 0");
  const ModeBasis& B = model.basis();
  const int amb = model.ambient();
  detail::require(Y.size() == B.size() && Z.size() == B.size(), "Y, Z must be ambient-basis coefficient vectors");
  const Vec& pg = model.spectral().g_multipliers();
  const Vec& ps = model.spectral().p_s_multipliers();
  auto mul = [&](const Vec& F, const Vec& f) { return B.multiply_project(F, f, amb); };
  auto G = [&](const Vec& f) { return Vec(f.cwiseProduct(pg)); };
  auto Gi = [&](const Vec& f) { return Vec(f.cwiseProduct(ps)); };
  const Vec gy = Gi(Y), gz = Gi(Z);
  auto T = [&](const Vec& x) {
    const Vec t1 = mul(Y, G(mul(gz, x))) - G(mul(gz, mul(Y, x)));
    auto comm = [&](const Vec& w) { return Vec(mul(Z, Gi(w)) - Gi(mul(Z, w))); };
    const Vec t2 = G(Vec(mul(Y, comm(x)) - comm(mul(Y, x))));
    auto Bz = [&](const Vec& w) { return G(mul(Z, Gi(w))); };
    const Vec t3 = mul(Y, Bz(x)) - Bz(mul(Y, x));
    const Vec t4 = G(mul(gy, Vec(mul(Z, x) - G(mul(Z, Gi(x))))));
    const Vec t5 = G(mul(gy, G(mul(gz, x))));
    return Vec(-t1 + t2 + t3 + t4 + t5);
  };
  const auto n = static_cast<Eigen::Index>(modes.size());
  Mat out(n, n);
  for (Eigen::Index col = 0; col < n; ++col) {
    const Vec t = T(Vec::Unit(B.size(), modes[col]));
    for (Eigen::Index row = 0; row < n; ++row) out(row, col) = t[modes[row]];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Extrapolation

enum class Verdict { Convergent, LogDivergent, Undetermined };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Convergent: return "convergent";
    case Verdict::LogDivergent: return "log-divergent";
    default: return "undetermined";
  }
}

struct Extrapolation {
  double value = 0;       ///< T_inf of the selected power fit
  double residual = 0;    ///< rms residual of that fit
  double q = 1;           ///< selected tail power
  double tail_coef = 0;   ///< b in T = T_inf + b M^-q
  double log_const = 0;   ///< a in T = a + c log M
  double log_coef = 0;    ///< c
  double log_residual = 0;
  double tail_exponent = 0;  ///< slope of log|T_{j+1} - T_j| against log M_j; -inf if flat
  Verdict verdict = Verdict::Undetermined;
};

inline constexpr double kConvergentRelResidual = 0.05;
inline constexpr double kLogSignificance = 10.0;

/// Fits T_j = T_inf + b M_j^-q for q in {1/2, 1, 2} (least residual wins) and
/// T_j = a + c log M_j. Log-divergent when |c| exceeds 10x the log-fit residual and the
/// log fit is the better one; convergent when the power-fit residual is within 5% of
/// |T_inf|; undetermined otherwise.
inline Extrapolation extrapolate(const std::vector<double>& cutoffs, const std::vector<double>& traces) {
  detail::require(cutoffs.size() == traces.size(), "extrapolate: size mismatch");
  detail::require(cutoffs.size() >= 3, "extrapolate: need at least three cutoffs");
  const auto n = static_cast<Eigen::Index>(cutoffs.size());
  Vec rhs(n);
  for (Eigen::Index j = 0; j < n; ++j) rhs[j] = traces[j];
  const double scale = std::max(1e-300, rhs.cwiseAbs().maxCoeff());
  const double noise = 1e-12 * scale;

  Extrapolation e;
  e.residual = std::numeric_limits<double>::infinity();
  for (double q : {1.0, 2.0, 0.5}) {
    Mat design(n, 2);
    for (Eigen::Index j = 0; j < n; ++j) design(j, 0) = 1, design(j, 1) = std::pow(cutoffs[j], -q);
    const LinearFit f = least_squares(design, rhs);
    if (f.residual < e.residual - noise) e.value = f.coef[0], e.tail_coef = f.coef[1], e.q = q, e.residual = f.residual;
  }
  Mat design(n, 2);
  for (Eigen::Index j = 0; j < n; ++j) design(j, 0) = 1, design(j, 1) = std::log(cutoffs[j]);
  const LinearFit lf = least_squares(design, rhs);
  e.log_const = lf.coef[0];
  e.log_coef = lf.coef[1];
  e.log_residual = lf.residual;

  std::vector<double> mids, incs;
  for (Eigen::Index j = 0; j + 1 < n; ++j) {
    mids.push_back(cutoffs[j]);
    incs.push_back(traces[j + 1] - traces[j]);
  }
  e.tail_exponent = log_log_slope(mids, incs, noise);

  const bool log_significant = std::abs(e.log_coef) > kLogSignificance * e.log_residual + noise;
  if (log_significant && e.log_residual < e.residual)
    e.verdict = Verdict::LogDivergent;
  else if (e.residual <= kConvergentRelResidual * std::abs(e.value) + noise)
    e.verdict = Verdict::Convergent;
  else
    e.verdict = Verdict::Undetermined;
  return e;
}

struct RicciEstimate {
  std::vector<double> cutoffs;
  std::vector<double> partial;
  Extrapolation fit;
  double value() const { return fit.value; }
};

/// Grouped partial traces at `cutoffs` and their extrapolation.
inline RicciEstimate ricci_cutoff(const TruncatedGroupModel& model, const Vec& y, const Vec& z,
                                  const std::vector<double>& cutoffs) {
  RicciEstimate r;
  r.cutoffs = cutoffs;
  r.partial = grouped_partial_traces(model, y, z, cutoffs);
  r.fit = extrapolate(cutoffs, r.partial);
  return r;
}

// ---------------------------------------------------------------------------
// Ungrouped traces

/// Partial traces of x -> R(x,y)z over an orthonormal basis adapted to the operator.
///
/// Modes are grouped in windows of two consecutive unit radius shells. In each window the
/// symmetric part of the operator is diagonalized; eigenvectors with positive eigenvalue
/// enter the sum with their window, those with negative eigenvalue only once the cutoff
/// reaches the square of the window radius. Every window is eventually complete, so the
/// sequence runs over a full orthonormal basis; it converges iff the negative parts are
/// summable, which fails for an operator of order -1.
inline std::vector<double> ungrouped_partial_traces(const TruncatedGroupModel& model, const Vec& y, const Vec& z,
                                                    const std::vector<double>& cutoffs) {
  detail::require(!cutoffs.empty() && std::is_sorted(cutoffs.begin(), cutoffs.end()), "cutoffs must be increasing");
  const double top = cutoffs.back();
  detail::require_exact_trace(model, y, z, top);
  const Geometry geo(model);
  const std::vector<int> modes = modes_in_ball(model, top);
  const int d = model.lie_dim();

  struct Window {
    double radius;
    double positive = 0, negative = 0;
  };
  std::vector<Window> windows;
  std::size_t i = 0;
  for (int w = 1; i < modes.size(); ++w) {
    const double hi = 2.0 * w;
    std::vector<Vec> basis;
    for (; i < modes.size() && mode_radius(model, modes[i]) <= hi + 1e-9; ++i)
      for (int a = 0; a < d; ++a) basis.push_back(model.onb_vector(modes[i], a));
    if (basis.empty()) continue;
    const auto n = static_cast<Eigen::Index>(basis.size());
    Mat Q(n, n);
    for (Eigen::Index c = 0; c < n; ++c) {
      const Vec w_c = model.metric_apply(geo.curvature(basis[c], y, z));
      for (Eigen::Index r = 0; r < n; ++r) Q(r, c) = basis[r].dot(w_c);
    }
    const Eigen::SelfAdjointEigenSolver<Mat> eig(0.5 * (Q + Q.transpose()), Eigen::EigenvaluesOnly);
    Window win{hi};
    for (Eigen::Index k = 0; k < n; ++k) (eig.eigenvalues()[k] >= 0 ? win.positive : win.negative) += eig.eigenvalues()[k];
    windows.push_back(win);
  }
  std::vector<double> out;
  for (double M : cutoffs) {
    double t = 0;
    for (const auto& w : windows) {
      if (w.radius <= M + 1e-9) t += w.positive;
      if (w.radius * w.radius <= M + 1e-9) t += w.negative;
    }
    out.push_back(t);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Einstein ratios

struct EinsteinStats {
  std::vector<double> ratios;
  double mean = 0;
  double spread = 0;  ///< (max - min) / |mean|
  bool einstein = false;
  int excluded = 0;          ///< pairs with vanishing reference pairing
  double excluded_max_ric = 0;  ///< largest |Ric| among excluded pairs
};

/// Ratios Ric(y,z)/<y,z>_ref over pairs given as (Ric, ref). Pairs whose reference value
/// is below `zero_tol` times the largest reference value are excluded from the ratios.
inline EinsteinStats einstein_ratio(const std::vector<std::pair<double, double>>& ric_ref, double tol,
                                    double zero_tol = 1e-12) {
  detail::require(!ric_ref.empty(), "einstein_ratio: no test pairs");
  double ref_scale = 0;
  for (const auto& [ric, ref] : ric_ref) ref_scale = std::max(ref_scale, std::abs(ref));
  EinsteinStats st;
  for (const auto& [ric, ref] : ric_ref) {
    if (std::abs(ref) <= zero_tol * ref_scale) {
      ++st.excluded;
      st.excluded_max_ric = std::max(st.excluded_max_ric, std::abs(ric));
      continue;
    }
    st.ratios.push_back(ric / ref);
  }
  if (st.ratios.empty()) throw InputError("reference pairing vanishes on every test pair");
  st.mean = std::accumulate(st.ratios.begin(), st.ratios.end(), 0.0) / static_cast<double>(st.ratios.size());
  const auto [lo, hi] = std::minmax_element(st.ratios.begin(), st.ratios.end());
  st.spread = std::abs(st.mean) > 0 ? (*hi - *lo) / std::abs(st.mean) : std::numeric_limits<double>::infinity();
  st.einstein = st.spread <= tol;
  return st;
}

}  // namespace curvlab
