#pragma once

// Real Fourier eigenbases of the Laplacian on the circle and the flat torus,
// exact product expansion, Fourier multipliers of P = Delta + m0^2 and the
// Green's kernel of P^s.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "curvlab/errors.hpp"
#include "curvlab/lie_algebra.hpp"

namespace curvlab {

enum class Domain { Circle, Torus };

inline int domain_dim(Domain d) { return d == Domain::Circle ? 1 : 2; }
inline double domain_volume(Domain d) {
  constexpr double tau = 2.0 * std::numbers::pi;
  return d == Domain::Circle ? tau : tau * tau;
}
inline std::string to_string(Domain d) { return d == Domain::Circle ? "circle" : "torus"; }
inline Domain parse_domain(const std::string& s) {
  if (s == "circle") return Domain::Circle;
  if (s == "torus") return Domain::Torus;
  throw InputError("unknown domain '" + s + "' (expected circle or torus)");
}

using Point = std::array<double, 2>;

enum class Parity : int { Const = 0, Cos = 1, Sin = 2 };

/// One real basis function: 1, sqrt2 cos(k.x) or sqrt2 sin(k.x), k in the upper half plane.
struct Mode {
  std::array<int, 2> k{0, 0};
  Parity parity = Parity::Const;
  int norm2() const { return k[0] * k[0] + k[1] * k[1]; }
  int degree() const { return std::max(std::abs(k[0]), std::abs(k[1])); }
};

/// A term of a mode product: coefficient on basis mode `index`.
struct ProductTerm {
  int index;
  double coeff;
};

/// L2(dV/vol)-orthonormal real Fourier basis truncated at |k_i| <= cutoff.
///
/// Circle modes are ordered 1, cos t, sin t, cos 2t, ...; torus modes by |k|^2,
/// then lexicographically, cos before sin.
class ModeBasis {
 public:
  ModeBasis(Domain domain, int cutoff) : domain_(domain), cutoff_(cutoff) {
    detail::require(cutoff >= 0, "cutoff must be nonnegative");
    const int side = 2 * cutoff + 1;
    lookup_.assign(static_cast<std::size_t>(side) * (domain == Domain::Torus ? side : 1), -1);
    std::vector<std::array<int, 2>> freqs;
    if (domain == Domain::Circle) {
      for (int n = 1; n <= cutoff; ++n) freqs.push_back({n, 0});
    } else {
      for (int a = 0; a <= cutoff; ++a)
        for (int b = -cutoff; b <= cutoff; ++b)
          if (a > 0 || b > 0) freqs.push_back({a, b});
      std::stable_sort(freqs.begin(), freqs.end(), [](const auto& p, const auto& q) {
        const int np = p[0] * p[0] + p[1] * p[1], nq = q[0] * q[0] + q[1] * q[1];
        return np != nq ? np < nq : p < q;
      });
    }
    modes_.push_back(Mode{{0, 0}, Parity::Const});
    for (const auto& k : freqs) {
      lookup_[slot(k[0], k[1])] = static_cast<int>(modes_.size());
      modes_.push_back(Mode{k, Parity::Cos});
      modes_.push_back(Mode{k, Parity::Sin});
    }
  }

  Domain domain() const { return domain_; }
  int cutoff() const { return cutoff_; }
  int size() const { return static_cast<int>(modes_.size()); }
  const Mode& mode(int i) const { return modes_[i]; }
  const std::vector<Mode>& modes() const { return modes_; }
  double volume() const { return domain_volume(domain_); }
  double eigenvalue(int i) const { return modes_[i].norm2(); }

  /// Number of leading modes with degree <= c (modes are sorted so this is a prefix on
  /// the circle; on the torus use contains()).
  int count_within(int c) const {
    int n = 0;
    for (const auto& m : modes_) n += m.degree() <= c;
    return n;
  }

  /// Index of (k, parity) after canonicalizing k to the half plane; -1 if outside the cutoff.
  /// `sign` receives -1 when canonicalization flips a sine.
  int index_of(std::array<int, 2> k, Parity p, double* sign = nullptr) const {
    if (sign) *sign = 1.0;
    if (k[0] == 0 && k[1] == 0) return p == Parity::Sin ? -1 : 0;
    if (k[0] < 0 || (k[0] == 0 && k[1] < 0)) {
      k = {-k[0], -k[1]};
      if (p == Parity::Sin && sign) *sign = -1.0;
    }
    if (std::max(std::abs(k[0]), std::abs(k[1])) > cutoff_) return -1;
    if (domain_ == Domain::Circle && k[1] != 0) return -1;
    const int base = lookup_[slot(k[0], k[1])];
    return p == Parity::Sin ? base + 1 : base;
  }

  /// Exact expansion of phi_a * phi_b. At most two terms; terms beyond the cutoff are
  /// dropped and counted in `dropped` when given.
  int product(int a, int b, std::array<ProductTerm, 2>& out, int* dropped = nullptr) const {
    const Mode& ma = modes_[a];
    const Mode& mb = modes_[b];
    if (ma.parity == Parity::Const) {
      out[0] = {b, 1.0};
      return 1;
    }
    if (mb.parity == Parity::Const) {
      out[0] = {a, 1.0};
      return 1;
    }
    const std::array<int, 2> sum{ma.k[0] + mb.k[0], ma.k[1] + mb.k[1]};
    const std::array<int, 2> diff{ma.k[0] - mb.k[0], ma.k[1] - mb.k[1]};
    // 2 trig(a) trig(b) = s1 * f(a+b) + s2 * f(a-b), f = cos or sin.
    Parity f;
    double s_sum, s_diff;
    if (ma.parity == Parity::Cos && mb.parity == Parity::Cos) {
      f = Parity::Cos, s_sum = 1, s_diff = 1;
    } else if (ma.parity == Parity::Sin && mb.parity == Parity::Sin) {
      f = Parity::Cos, s_sum = -1, s_diff = 1;
    } else if (ma.parity == Parity::Sin) {
      f = Parity::Sin, s_sum = 1, s_diff = 1;
    } else {
      f = Parity::Sin, s_sum = 1, s_diff = -1;
    }
    int n = 0;
    auto emit = [&](const std::array<int, 2>& q, double s) {
      if (q[0] == 0 && q[1] == 0) {
        if (f == Parity::Cos) out[n++] = {0, s};
        return;
      }
      double flip = 1.0;
      const int idx = index_of(q, f, &flip);
      if (idx < 0) {
        if (dropped) ++*dropped;
        return;
      }
      out[n++] = {idx, s * flip / std::numbers::sqrt2};
    };
    emit(sum, s_sum);
    emit(diff, s_diff);
    return n;
  }

  double evaluate_mode(int i, const Point& x) const {
    const Mode& m = modes_[i];
    if (m.parity == Parity::Const) return 1.0;
    const double phase = m.k[0] * x[0] + m.k[1] * x[1];
    return std::numbers::sqrt2 * (m.parity == Parity::Cos ? std::cos(phase) : std::sin(phase));
  }

  double evaluate(const Vec& f, const Point& x) const {
    double v = 0;
    for (int i = 0; i < static_cast<int>(f.size()); ++i)
      if (f[i] != 0.0) v += f[i] * evaluate_mode(i, x);
    return v;
  }

  /// Pointwise product f*g projected to modes of degree <= target_cutoff.
  Vec multiply_project(const Vec& f, const Vec& g, int target_cutoff) const {
    detail::require(f.size() == size() && g.size() == size(), "coefficient vector length does not match basis");
    if (target_cutoff > cutoff_)
      throw TruncationError("target cutoff " + std::to_string(target_cutoff) + " exceeds basis cutoff " +
                            std::to_string(cutoff_));
    Vec out = Vec::Zero(size());
    std::array<ProductTerm, 2> terms;
    for (int a = 0; a < size(); ++a) {
      if (f[a] == 0.0) continue;
      for (int b = 0; b < size(); ++b) {
        if (g[b] == 0.0) continue;
        const int n = product(a, b, terms);
        for (int t = 0; t < n; ++t)
          if (modes_[terms[t].index].degree() <= target_cutoff) out[terms[t].index] += f[a] * g[b] * terms[t].coeff;
      }
    }
    return out;
  }

  /// Orthogonal projection onto degree <= c.
  Vec project(const Vec& f, int c) const {
    Vec out = f;
    for (int i = 0; i < size(); ++i)
      if (modes_[i].degree() > c) out[i] = 0.0;
    return out;
  }

 private:
  std::size_t slot(int k1, int k2) const {
    const int side = 2 * cutoff_ + 1;
    return domain_ == Domain::Circle ? static_cast<std::size_t>(k1 + cutoff_)
                                     : static_cast<std::size_t>(k1 + cutoff_) * side + (k2 + cutoff_);
  }

  Domain domain_;
  int cutoff_;
  std::vector<Mode> modes_;
  std::vector<int> lookup_;
};

/// Fourier multipliers (|k|^2 + m0^2)^{+-s}: G^{-1} = P^s and G = P^{-s}.
///
/// With m0 = 0 the constant mode carries no multiplier and is flagged excluded.
class SpectralOperator {
 public:
  SpectralOperator(ModeBasis basis, double s, double m0) : basis_(std::move(basis)), s_(s), m0_(m0) {
    detail::require(s > 0, "exponent s must be positive");
    detail::require(m0 >= 0, "mass m0 must be nonnegative");
    forward_.resize(basis_.size());
    inverse_.resize(basis_.size());
    for (int i = 0; i < basis_.size(); ++i) {
      const double lambda = basis_.eigenvalue(i) + m0 * m0;
      if (lambda == 0.0) {
        forward_[i] = inverse_[i] = 0.0;
      } else {
        forward_[i] = std::pow(lambda, s);
        inverse_[i] = 1.0 / forward_[i];
      }
    }
  }

  const ModeBasis& basis() const { return basis_; }
  double s() const { return s_; }
  double m0() const { return m0_; }
  bool excludes_constant() const { return m0_ == 0.0; }
  /// Multiplier of G^{-1} = P^s on mode i.
  double p_s(int i) const { return forward_[i]; }
  /// Multiplier of G = P^{-s} on mode i.
  double g(int i) const { return inverse_[i]; }
  const Vec& p_s_multipliers() const { return forward_; }
  const Vec& g_multipliers() const { return inverse_; }

 private:
  ModeBasis basis_;
  double s_, m0_;
  Vec forward_, inverse_;
};

namespace detail {

/// Fourier transform of (|xi|^2 + m^2)^{-s} on R^d at radius r (a Matern kernel).
inline double matern_transform(int d, double s, double m, double r) {
  const double nu = s - 0.5 * d;
  if (r == 0.0) {
    if (nu <= 0) throw DivergenceError("Green's kernel diverges on the diagonal for 2s <= dim");
    return std::pow(std::numbers::pi, 0.5 * d) * std::tgamma(nu) / (std::tgamma(s) * std::pow(m, 2 * nu));
  }
  const double z = m * r;
  if (z > 700) return 0.0;
  return std::pow(2 * std::numbers::pi, 0.5 * d) * std::pow(2.0, 1 - s) / std::tgamma(s) * std::pow(r / m, nu) *
         std::cyl_bessel_k(std::abs(nu), z);
}

inline double wrap_angle(double t) {
  constexpr double tau = 2 * std::numbers::pi;
  t = std::fmod(t, tau);
  if (t < -std::numbers::pi) t += tau;
  if (t >= std::numbers::pi) t -= tau;
  return t;
}

}  // namespace detail

/// Green's kernel of P^s by periodized (image) summation of the free-space kernel.
/// Requires m0 > 0; the image series converges geometrically with ratio e^{-2 pi m0}.
inline double greens_images(Domain domain, const Point& v, const Point& w, double s, double m0, double tol = 1e-13) {
  detail::require(m0 > 0, "image summation needs m0 > 0");
  const int d = domain_dim(domain);
  const double tau = 2 * std::numbers::pi;
  const double dx = detail::wrap_angle(v[0] - w[0]);
  const double dy = d == 2 ? detail::wrap_angle(v[1] - w[1]) : 0.0;
  const double ratio = std::exp(-tau * m0);
  double sum = detail::matern_transform(d, s, m0, std::hypot(dx, dy));
  for (int shell = 1; shell < 100000; ++shell) {
    double shell_sum = 0;
    if (d == 1) {
      shell_sum = detail::matern_transform(1, s, m0, std::abs(dx + tau * shell)) +
                  detail::matern_transform(1, s, m0, std::abs(dx - tau * shell));
    } else {
      for (int i = -shell; i <= shell; ++i)
        for (int j = -shell; j <= shell; ++j)
          if (std::max(std::abs(i), std::abs(j)) == shell)
            shell_sum += detail::matern_transform(2, s, m0, std::hypot(dx + tau * i, dy + tau * j));
    }
    sum += shell_sum;
    // Shells decay at least geometrically with `ratio` once past the first few.
    const double tail = shell_sum * (d == 2 ? 2.0 : 1.0) / (1.0 - ratio);
    if (shell >= 2 && tail < tol * std::max(1.0, std::abs(sum))) break;
  }
  return sum / domain_volume(domain);
}

/// Green's kernel by its eigenfunction expansion, summed in shells of |k| until a rigorous
/// tail bound drops below `tol`. The zero mode is skipped when m0 = 0.
///
/// The circle off-diagonal bound uses Abel summation against the Dirichlet kernel.
inline double greens_spectral(Domain domain, const Point& v, const Point& w, double s, double m0, double tol = 1e-10,
                              long max_radius = 20000000) {
  const int d = domain_dim(domain);
  const double vol = domain_volume(domain);
  const bool diag = v == w;
  if (diag && 2 * s <= d) throw DivergenceError("Green's kernel diverges on the diagonal for 2s <= dim");
  const double dx = v[0] - w[0], dy = d == 2 ? v[1] - w[1] : 0.0;
  double sum = m0 > 0 ? std::pow(m0 * m0, -s) / vol : 0.0;
  const double sin_half = std::abs(std::sin(0.5 * detail::wrap_angle(dx)));
  if (d == 1) {
    for (long n = 1; n <= max_radius; ++n) {
      const double a = std::pow(double(n) * n + m0 * m0, -s);
      sum += 2.0 * a * std::cos(n * dx) / vol;
      const double next = std::pow(double(n + 1) * (n + 1) + m0 * m0, -s);
      double bound = 2 * s > 1 ? 2.0 / vol * std::pow(double(n), 1 - 2 * s) / (2 * s - 1) : INFINITY;
      if (sin_half > 1e-12) bound = std::min(bound, 2.0 / vol * next / sin_half);
      if (bound < tol) return sum;
    }
    throw DivergenceError("spectral Green's sum did not reach tolerance within the term budget");
  }
  // Torus: square shells |k|_inf = n; tail bounded by the radial integral from n.
  if (2 * s <= 2) throw DivergenceError("spectral torus Green's sum needs s > 1");
  for (long n = 1; n <= std::min<long>(max_radius, 20000); ++n) {
    auto term = [&](long i, long j) {
      sum += std::pow(double(i * i + j * j) + m0 * m0, -s) * std::cos(i * dx + j * dy) / vol;
    };
    for (long i = -n; i <= n; ++i) term(i, -n), term(i, n);
    for (long j = -n + 1; j < n; ++j) term(-n, j), term(n, j);
    // sum_{|k|_inf > n} |k|^{-2s} <= 2 pi int_n^inf r^{1-2s} dr * (1 + 2/n)^2 (cell covering).
    const double bound = 2 * std::numbers::pi * std::pow(double(n), 2 - 2 * s) / (2 * s - 2) *
                         std::pow(1.0 + 2.0 / n, 2) / vol;
    if (bound < tol) return sum;
  }
  throw DivergenceError("spectral Green's sum did not reach tolerance within the term budget");
}

/// G(v, w) for P^s = (Delta + m0^2)^s, kernel with respect to dV.
inline double greens_function(Domain domain, const Point& v, const Point& w, double s, double m0) {
  if (v == w && 2 * s <= domain_dim(domain))
    throw DivergenceError("Green's kernel diverges on the diagonal for 2s <= dim");
  if (m0 > 0) return greens_images(domain, v, w, s, m0);
  return greens_spectral(domain, v, w, s, m0);
}

}  // namespace curvlab
