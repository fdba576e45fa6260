#pragma once

// Homogeneous symbols on the cotangent bundle of the flat torus [0, 2pi)^2:
// trigonometric coefficients times monomials in (p1, p2) times powers of |p|^2.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <compare>
#include <complex>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "curvlab/errors.hpp"
#include "curvlab/fit.hpp"
#include "curvlab/lie_algebra.hpp"
#include "curvlab/spectral_domain.hpp"

namespace curvlab {

// ---------------------------------------------------------------------------
// Trigonometric polynomials on T^2 (unnormalized cos(k.x), sin(k.x), 1)

class TrigPoly2 {
 public:
  struct Key {
    int k1 = 0, k2 = 0;
    Parity parity = Parity::Const;
    auto operator<=>(const Key&) const = default;
  };

  TrigPoly2() = default;

  static TrigPoly2 constant(double c) {
    TrigPoly2 t;
    t.add({0, 0, Parity::Const}, c);
    return t;
  }
  static TrigPoly2 cos(int k1, int k2, double c = 1.0) { return wave(k1, k2, Parity::Cos, c); }
  static TrigPoly2 sin(int k1, int k2, double c = 1.0) { return wave(k1, k2, Parity::Sin, c); }

  const std::map<Key, double>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  TrigPoly2& operator+=(const TrigPoly2& o) {
    for (const auto& [k, v] : o.terms_) add(k, v);
    return *this;
  }
  TrigPoly2& operator*=(double c) {
    if (c == 0.0) terms_.clear();
    for (auto& [k, v] : terms_) v *= c;
    return *this;
  }
  friend TrigPoly2 operator+(TrigPoly2 a, const TrigPoly2& b) { return a += b; }
  friend TrigPoly2 operator-(TrigPoly2 a, const TrigPoly2& b) { return a += b * -1.0; }
  friend TrigPoly2 operator*(TrigPoly2 a, double c) { return a *= c; }
  friend TrigPoly2 operator*(double c, TrigPoly2 a) { return a *= c; }

  friend TrigPoly2 operator*(const TrigPoly2& a, const TrigPoly2& b) {
    TrigPoly2 out;
    for (const auto& [ka, va] : a.terms_)
      for (const auto& [kb, vb] : b.terms_) out.add_product(ka, kb, va * vb);
    return out;
  }

  /// d/dx_i.
  TrigPoly2 derivative(int i) const {
    detail::require(i == 0 || i == 1, "derivative index must be 0 or 1");
    TrigPoly2 out;
    for (const auto& [k, v] : terms_) {
      const int ki = i == 0 ? k.k1 : k.k2;
      if (k.parity == Parity::Const || ki == 0) continue;
      if (k.parity == Parity::Cos)
        out.add({k.k1, k.k2, Parity::Sin}, -ki * v);
      else
        out.add({k.k1, k.k2, Parity::Cos}, ki * v);
    }
    return out;
  }

  double evaluate(const Point& x) const {
    double s = 0;
    for (const auto& [k, v] : terms_) {
      const double phase = k.k1 * x[0] + k.k2 * x[1];
      s += v * (k.parity == Parity::Const ? 1.0 : k.parity == Parity::Cos ? std::cos(phase) : std::sin(phase));
    }
    return s;
  }

  /// Integral over [0,2pi)^2 with dx1 dx2.
  double integral() const {
    const auto it = terms_.find({0, 0, Parity::Const});
    return it == terms_.end() ? 0.0 : it->second * 4.0 * std::numbers::pi * std::numbers::pi;
  }

  int degree() const {
    int d = 0;
    for (const auto& [k, v] : terms_) d = std::max({d, std::abs(k.k1), std::abs(k.k2)});
    return d;
  }

  /// Coefficients in the L2(dV/vol)-orthonormal real basis.
  Vec to_mode_coefficients(const ModeBasis& basis) const {
    Vec out = Vec::Zero(basis.size());
    for (const auto& [k, v] : terms_) {
      double sign = 1.0;
      const int m = basis.index_of({k.k1, k.k2}, k.parity, &sign);
      if (m < 0) throw TruncationError("trigonometric polynomial exceeds the basis cutoff");
      out[m] += k.parity == Parity::Const ? v : sign * v / std::numbers::sqrt2;
    }
    return out;
  }

  /// Canonical text form, terms sorted by (k1, k2, parity).
  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    os.precision(17);
    bool first = true;
    for (const auto& [k, v] : terms_) {
      if (!first) os << " + ";
      first = false;
      os << v;
      if (k.parity != Parity::Const) os << (k.parity == Parity::Cos ? "*cos(" : "*sin(") << k.k1 << "," << k.k2 << ")";
    }
    return os.str();
  }

 private:
  static TrigPoly2 wave(int k1, int k2, Parity p, double c) {
    TrigPoly2 t;
    t.add({k1, k2, p}, c);
    return t;
  }

  /// Adds v * basis(k) after folding k into the half plane k2 > 0 or (k2 = 0, k1 > 0).
  void add(Key k, double v) {
    if (k.parity != Parity::Const) {
      if (k.k1 == 0 && k.k2 == 0) {
        if (k.parity == Parity::Sin) return;
        k.parity = Parity::Const;
      } else if (k.k2 < 0 || (k.k2 == 0 && k.k1 < 0)) {
        k.k1 = -k.k1, k.k2 = -k.k2;
        if (k.parity == Parity::Sin) v = -v;
      }
    } else {
      k.k1 = k.k2 = 0;
    }
    if (v == 0.0) return;
    auto [it, inserted] = terms_.try_emplace(k, v);
    if (!inserted) {
      it->second += v;
      if (std::abs(it->second) < 1e-15 * std::abs(v)) terms_.erase(it);
    }
  }

  void add_product(const Key& a, const Key& b, double c) {
    if (a.parity == Parity::Const) return add(b, c);
    if (b.parity == Parity::Const) return add(a, c);
    const int s1 = a.k1 + b.k1, s2 = a.k2 + b.k2, d1 = a.k1 - b.k1, d2 = a.k2 - b.k2;
    const double h = 0.5 * c;
    if (a.parity == Parity::Cos && b.parity == Parity::Cos) {
      add({d1, d2, Parity::Cos}, h), add({s1, s2, Parity::Cos}, h);
    } else if (a.parity == Parity::Sin && b.parity == Parity::Sin) {
      add({d1, d2, Parity::Cos}, h), add({s1, s2, Parity::Cos}, -h);
    } else if (a.parity == Parity::Sin) {  // sin a cos b
      add({s1, s2, Parity::Sin}, h), add({d1, d2, Parity::Sin}, h);
    } else {  // cos a sin b
      add({s1, s2, Parity::Sin}, h), add({d1, d2, Parity::Sin}, -h);
    }
  }

  std::map<Key, double> terms_;
};

/// Random combination of `terms` waves with |k_i| <= max_freq and coefficients in [-1, 1].
template <class Rng>
TrigPoly2 random_trig_poly(Rng& rng, int max_freq, int terms) {
  std::uniform_int_distribution<int> freq(-max_freq, max_freq), parity(0, 1);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  TrigPoly2 out;
  for (int t = 0; t < terms; ++t) {
    const int k1 = freq(rng), k2 = freq(rng);
    const double c = coef(rng);
    out += parity(rng) ? TrigPoly2::cos(k1, k2, c) : TrigPoly2::sin(k1, k2, c);
  }
  return out;
}

/// int_{T^2} grad Y . grad Z dx.
inline double dirichlet_pairing(const TrigPoly2& Y, const TrigPoly2& Z) {
  return (Y.derivative(0) * Z.derivative(0) + Y.derivative(1) * Z.derivative(1)).integral();
}

// ---------------------------------------------------------------------------
// Homogeneous symbols

/// coeff(x) * p1^i * p2^j * |p|^(2a).
struct SymbolTerm {
  TrigPoly2 coeff;
  int i = 0, j = 0;
  double a = 0;
  double degree() const { return i + j + 2.0 * a; }
};

class HomogeneousSymbol {
 public:
  HomogeneousSymbol() = default;

  static HomogeneousSymbol scalar(const TrigPoly2& f) { return monomial(f, 0, 0, 0.0); }
  /// |p|^(2a).
  static HomogeneousSymbol norm_power(double a) { return monomial(TrigPoly2::constant(1.0), 0, 0, a); }
  static HomogeneousSymbol momentum(int index) {
    detail::require(index == 0 || index == 1, "momentum index must be 0 or 1");
    return monomial(TrigPoly2::constant(1.0), index == 0, index == 1, 0.0);
  }
  static HomogeneousSymbol monomial(const TrigPoly2& f, int i, int j, double a) {
    HomogeneousSymbol s;
    s.add({f, i, j, a});
    return s;
  }
  /// p . grad Y.
  static HomogeneousSymbol covector_pairing(const TrigPoly2& Y) {
    return monomial(Y.derivative(0), 1, 0, 0.0) + monomial(Y.derivative(1), 0, 1, 0.0);
  }

  const std::map<std::tuple<int, int, long long>, SymbolTerm>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  bool is_homogeneous(double tol = 1e-12) const {
    if (terms_.empty()) return true;
    const double d0 = terms_.begin()->second.degree();
    for (const auto& [k, t] : terms_)
      if (std::abs(t.degree() - d0) > tol) return false;
    return true;
  }

  /// Common degree; the zero symbol has no degree and is reported as NaN.
  double degree() const {
    if (!is_homogeneous()) throw InputError("symbol is not homogeneous: " + to_string());
    return terms_.empty() ? std::numeric_limits<double>::quiet_NaN() : terms_.begin()->second.degree();
  }

  HomogeneousSymbol& operator+=(const HomogeneousSymbol& o) {
    for (const auto& [k, t] : o.terms_) add(t);
    return *this;
  }
  friend HomogeneousSymbol operator+(HomogeneousSymbol a, const HomogeneousSymbol& b) { return a += b; }
  friend HomogeneousSymbol operator*(double c, HomogeneousSymbol a) {
    HomogeneousSymbol out;
    for (auto& [k, t] : a.terms_) out.add({t.coeff * c, t.i, t.j, t.a});
    return out;
  }
  friend HomogeneousSymbol operator-(const HomogeneousSymbol& a, const HomogeneousSymbol& b) { return a + (-1.0) * b; }

  friend HomogeneousSymbol operator*(const HomogeneousSymbol& f, const HomogeneousSymbol& g) {
    HomogeneousSymbol out;
    for (const auto& [kf, tf] : f.terms_)
      for (const auto& [kg, tg] : g.terms_) out.add({tf.coeff * tg.coeff, tf.i + tg.i, tf.j + tg.j, tf.a + tg.a});
    return out;
  }

  /// d/dp_index.
  HomogeneousSymbol dp(int index) const {
    HomogeneousSymbol out;
    for (const auto& [k, t] : terms_) {
      const int e = index == 0 ? t.i : t.j;
      if (e > 0) out.add({t.coeff * double(e), t.i - (index == 0), t.j - (index == 1), t.a});
      if (t.a != 0.0) out.add({t.coeff * (2.0 * t.a), t.i + (index == 0), t.j + (index == 1), t.a - 1.0});
    }
    return out;
  }

  /// d/dx_index.
  HomogeneousSymbol dx(int index) const {
    HomogeneousSymbol out;
    for (const auto& [k, t] : terms_) out.add({t.coeff.derivative(index), t.i, t.j, t.a});
    return out;
  }

  double evaluate(const Point& x, const Point& p) const {
    const double r2 = p[0] * p[0] + p[1] * p[1];
    double s = 0;
    for (const auto& [k, t] : terms_) {
      if (t.a != 0.0 && r2 == 0.0) throw InputError("symbol with |p| powers evaluated at p = 0");
      s += t.coeff.evaluate(x) * std::pow(p[0], t.i) * std::pow(p[1], t.j) * (t.a == 0.0 ? 1.0 : std::pow(r2, t.a));
    }
    return s;
  }

  /// Canonical text form: terms sorted by (p1 power, p2 power, |p|^2 power).
  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    os.precision(17);
    bool first = true;
    for (const auto& [k, t] : terms_) {
      if (!first) os << " + ";
      first = false;
      os << "[" << t.coeff.to_string() << "]";
      if (t.i) os << "*p1^" << t.i;
      if (t.j) os << "*p2^" << t.j;
      if (t.a != 0.0) os << "*|p|^(" << 2.0 * t.a << ")";
    }
    return os.str();
  }

 private:
  static long long exponent_key(double a) { return std::llround(a * 1e9); }

  void add(const SymbolTerm& t) {
    if (t.coeff.is_zero()) return;
    const auto key = std::make_tuple(t.i, t.j, exponent_key(t.a));
    auto [it, inserted] = terms_.try_emplace(key, t);
    if (!inserted) {
      it->second.coeff += t.coeff;
      if (it->second.coeff.is_zero()) terms_.erase(it);
    }
  }

  std::map<std::tuple<int, int, long long>, SymbolTerm> terms_;
};

/// {f,g} = sum_i (df/dx_i dg/dp_i - df/dp_i dg/dx_i). With this sign,
/// {|p|^(2s), Y} = -2s |p|^(2s-2) p . grad Y.
inline HomogeneousSymbol poisson_bracket(const HomogeneousSymbol& f, const HomogeneousSymbol& g) {
  if (!f.is_homogeneous() || !g.is_homogeneous()) throw InputError("poisson_bracket needs homogeneous symbols");
  HomogeneousSymbol out;
  for (int i = 0; i < 2; ++i) out += f.dx(i) * g.dp(i) - f.dp(i) * g.dx(i);
  return out;
}

/// Principal symbol of (Delta + m0^2)^s on the flat torus; the mass only enters lower order.
inline HomogeneousSymbol principal_symbol_of_power(double s, double m0) {
  detail::require(m0 >= 0, "mass m0 must be nonnegative");
  return HomogeneousSymbol::norm_power(s);
}

/// Degree -2 symbol of G [G^-1, Y] G [Z, G^-1] + 2 G [[G^-1, Y], Z] with G^-1 = P^s on the
/// flat torus, taking the principal symbol of each commutator to be the Poisson bracket.
inline HomogeneousSymbol assemble_leading_symbol(const TrigPoly2& Y, const TrigPoly2& Z, double s, double m0 = 0) {
  detail::require(s > 0, "exponent s must be positive");
  const auto ginv = principal_symbol_of_power(s, m0);
  const auto g = principal_symbol_of_power(-s, m0);
  const auto y = HomogeneousSymbol::scalar(Y), z = HomogeneousSymbol::scalar(Z);
  const auto comm_ginv_y = poisson_bracket(ginv, y);
  const auto comm_z_ginv = poisson_bracket(z, ginv);
  const auto out = g * comm_ginv_y * g * comm_z_ginv + 2.0 * (g * poisson_bracket(comm_ginv_y, z));
  if (!out.is_zero() && std::abs(out.degree() + 2.0) > 1e-12)
    throw ConsistencyError("leading symbol has degree " + std::to_string(out.degree()));
  return out;
}

// ---------------------------------------------------------------------------
// Fiber and base integration

/// int_0^{2pi} cos^i t sin^j t dt.
inline double circle_moment(int i, int j) {
  if (i % 2 || j % 2) return 0.0;
  auto dfact = [](int n) {
    double r = 1;
    for (; n > 1; n -= 2) r *= n;
    return r;
  };
  return 2.0 * std::numbers::pi * dfact(i - 1) * dfact(j - 1) / dfact(i + j);
}

namespace detail {
inline void require_degree_minus_two(const HomogeneousSymbol& sym) {
  if (sym.is_zero()) return;
  if (std::abs(sym.degree() + 2.0) > 1e-12)
    throw InputError("fiber integration needs a symbol of degree -2, got " + std::to_string(sym.degree()));
}
}  // namespace detail

/// Integral of the symbol over the unit circle in the fiber, as a function on the base.
inline TrigPoly2 residue_density(const HomogeneousSymbol& sym) {
  detail::require_degree_minus_two(sym);
  TrigPoly2 out;
  for (const auto& [k, t] : sym.terms()) {
    const double m = circle_moment(t.i, t.j);
    if (m != 0.0) out += t.coeff * m;
  }
  return out;
}

inline double fiber_circle_integral(const HomogeneousSymbol& sym, const Point& x) {
  return residue_density(sym).evaluate(x);
}

/// Fiber integral followed by the base integral over [0,2pi)^2.
inline double residue(const HomogeneousSymbol& sym) { return residue_density(sym).integral(); }

// ---------------------------------------------------------------------------
// Surface Ricci

/// A k-valued trigonometric field y = sum_a Y_a e_a.
using LieField = std::vector<TrigPoly2>;

inline LieField factored_field(const TrigPoly2& Y, const Vec& b) {
  LieField f(b.size());
  for (Eigen::Index a = 0; a < b.size(); ++a)
    if (b[a] != 0.0) f[a] = Y * b[a];
  return f;
}

/// -1/4 kappa(b,c) Res(sigma(Y,Z)) for factored arguments Y (x) b, Z (x) c.
inline double wodzicki_ricci(const TrigPoly2& Y, const TrigPoly2& Z, const Vec& b, const Vec& c,
                             const LieAlgebra& algebra, double s, double m0 = 0) {
  return -0.25 * algebra.killing_form(b, c) * residue(assemble_leading_symbol(Y, Z, s, m0));
}

/// Bilinear extension over components.
inline double wodzicki_ricci(const LieField& y, const LieField& z, const LieAlgebra& algebra, double s,
                             double m0 = 0) {
  const int d = algebra.dim();
  detail::require(static_cast<int>(y.size()) == d && static_cast<int>(z.size()) == d, "field has wrong length");
  double total = 0;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      const double k = algebra.killing_gram()(a, b);
      if (k == 0.0 || y[a].is_zero() || z[b].is_zero()) continue;
      total += -0.25 * k * residue(assemble_leading_symbol(y[a], z[b], s, m0));
    }
  return total;
}

/// -pi s^2 kappa(b,c) int grad Y . grad Z.
inline double surface_ricci_closed_form(const TrigPoly2& Y, const TrigPoly2& Z, const Vec& b, const Vec& c,
                                        const LieAlgebra& algebra, double s) {
  return -std::numbers::pi * s * s * algebra.killing_form(b, c) * dirichlet_pairing(Y, Z);
}

/// -int kappa(dy, *dz) = -sum_ab kappa_ab int grad y_a . grad z_b.
inline double reference_pairing(const LieField& y, const LieField& z, const LieAlgebra& algebra) {
  double total = 0;
  for (int a = 0; a < algebra.dim(); ++a)
    for (int b = 0; b < algebra.dim(); ++b)
      if (const double k = algebra.killing_gram()(a, b); k != 0.0) total += -k * dirichlet_pairing(y[a], z[b]);
  return total;
}

// ---------------------------------------------------------------------------
// Matrix-side plane-wave check

/// Conjugated plane-wave values e^{-ip.x} (A e^{ip.x})(x) of
/// A = G [G^-1, Y] G [Z, G^-1] + 2 G [[G^-1, Y], Z], built on the truncated real basis.
inline std::vector<std::complex<double>> plane_wave_values(const SpectralOperator& P, const TrigPoly2& Y,
                                                           const TrigPoly2& Z, std::array<int, 2> p,
                                                           const std::vector<Point>& points) {
  const ModeBasis& B = P.basis();
  detail::require(B.domain() == Domain::Torus, "plane-wave check runs on the torus");
  const int reach = std::max(std::abs(p[0]), std::abs(p[1])) + 2 * (Y.degree() + Z.degree());
  if (reach > B.cutoff())
    throw TruncationError("plane wave needs basis cutoff " + std::to_string(reach) + ", have " +
                          std::to_string(B.cutoff()));
  const int amb = B.cutoff();
  const Vec y = Y.to_mode_coefficients(B), z = Z.to_mode_coefficients(B);
  auto mul = [&](const Vec& F, const Vec& f) { return B.multiply_project(F, f, amb); };
  auto G = [&](const Vec& f) { return Vec(f.cwiseProduct(P.g_multipliers())); };
  auto Gi = [&](const Vec& f) { return Vec(f.cwiseProduct(P.p_s_multipliers())); };
  auto comm_Gi_y = [&](const Vec& f) { return Vec(Gi(mul(y, f)) - mul(y, Gi(f))); };  // [G^-1, Y]
  auto A = [&](const Vec& f) {
    const Vec zg = mul(z, Gi(f)) - Gi(mul(z, f));  // [Z, G^-1]
    const Vec first = G(comm_Gi_y(G(zg)));
    const Vec second = 2.0 * G(Vec(comm_Gi_y(mul(z, f)) - mul(z, comm_Gi_y(f))));  // [[G^-1,Y],Z]
    return Vec(first + second);
  };
  TrigPoly2 c = TrigPoly2::cos(p[0], p[1]), s = TrigPoly2::sin(p[0], p[1]);
  const Vec Ac = A(c.to_mode_coefficients(B)), As = A(s.to_mode_coefficients(B));
  std::vector<std::complex<double>> out;
  for (const auto& x : points) {
    const double ph = p[0] * x[0] + p[1] * x[1];
    const std::complex<double> wave(B.evaluate(Ac, x), B.evaluate(As, x));
    out.push_back(std::polar(1.0, -ph) * wave);
  }
  return out;
}

struct PlaneWaveReport {
  std::vector<double> momenta;
  std::vector<double> errors;          ///< against the assembled symbol
  std::vector<double> errors_negated;  ///< against minus the assembled symbol
  double slope = 0, slope_negated = 0;
};

/// max_x | |p|^2 e^{-ip.x}(A e^{ip.x}) - sigma(x, p/|p|) | over `points`, for p = n e_1 and
/// p = n e_2 (the larger of the two), with slope fits against n.
inline PlaneWaveReport plane_wave_check(double s, double m0, const TrigPoly2& Y, const TrigPoly2& Z,
                                        const std::vector<int>& ns, const std::vector<Point>& points) {
  detail::require(ns.size() >= 2, "plane-wave check needs at least two momenta");
  const int top = *std::max_element(ns.begin(), ns.end());
  const SpectralOperator P(ModeBasis(Domain::Torus, top + 2 * (Y.degree() + Z.degree())), s, m0);
  const HomogeneousSymbol sigma = assemble_leading_symbol(Y, Z, s);
  PlaneWaveReport r;
  for (int n : ns) {
    double err = 0, err_neg = 0;
    for (std::array<int, 2> p : {std::array<int, 2>{n, 0}, std::array<int, 2>{0, n}}) {
      const Point dir{double(p[0]) / n, double(p[1]) / n};
      const auto vals = plane_wave_values(P, Y, Z, p, points);
      for (std::size_t i = 0; i < points.size(); ++i) {
        const std::complex<double> v = double(n) * double(n) * vals[i];
        const double sv = sigma.evaluate(points[i], dir);
        err = std::max(err, std::abs(v - sv));
        err_neg = std::max(err_neg, std::abs(v + sv));
      }
    }
    r.momenta.push_back(n);
    r.errors.push_back(err);
    r.errors_negated.push_back(err_neg);
  }
  r.slope = log_log_slope(r.momenta, r.errors);
  r.slope_negated = log_log_slope(r.momenta, r.errors_negated);
  return r;
}

}  // namespace curvlab
