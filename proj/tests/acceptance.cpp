// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "curvlab/config_model.hpp"
#include "curvlab/io.hpp"
#include "curvlab/ricci_reg.hpp"
#include "curvlab/sobolev_model.hpp"
#include "curvlab/symbol_calc.hpp"

using namespace curvlab;
using std::numbers::pi;
using Rng = std::mt19937_64;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  void need(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [x]");
  }
};

std::string num(double v) { return format_number(v); }

Vec uniform(Rng& rng, Eigen::Index n) {
  std::uniform_real_distribution<double> u(-1, 1);
  Vec v(n);
  for (auto& c : v) c = u(rng);
  return v;
}

double rel(double dev, double scale) { return dev / std::max(1.0, scale); }

// Gradient of a trigonometric polynomial evaluated term by term.
std::array<double, 2> gradient(const TrigPoly2& f, const Point& x) {
  std::array<double, 2> g{0, 0};
  for (const auto& [k, c] : f.terms()) {
    if (k.parity == Parity::Const) continue;
    const double ph = k.k1 * x[0] + k.k2 * x[1];
    const double d = k.parity == Parity::Cos ? -c * std::sin(ph) : c * std::cos(ph);
    g[0] += k.k1 * d;
    g[1] += k.k2 * d;
  }
  return g;
}

// Midpoint quadrature of grad Y . grad Z over [0,2pi)^2; exact for the degrees used here.
double dirichlet_quadrature(const TrigPoly2& Y, const TrigPoly2& Z, int n = 32) {
  const double h = 2 * pi / n;
  double s = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Point x{(i + 0.5) * h, (j + 0.5) * h};
      const auto gy = gradient(Y, x), gz = gradient(Z, x);
      s += gy[0] * gz[0] + gy[1] * gz[1];
    }
  return s * h * h;
}

Outcome ac1() {
  Outcome o;
  Rng rng(101);
  for (const char* name : {"su2", "su3"}) {
    const LieAlgebra g = LieAlgebra::by_name(name, InnerProduct::NegativeKilling);
    const MetrizedAlgebra space(g);
    const Geometry geo(space);
    const int d = g.dim();
    double lc = 0, curv = 0, sect = 0;
    for (int n = 0; n < 100; ++n) {
      const Vec x = uniform(rng, d), y = uniform(rng, d), z = uniform(rng, d);
      const Vec half = 0.5 * g.bracket(x, y);
      lc = std::max(lc, rel(max_abs(geo.levi_civita(x, y) - half), max_abs(half)));
      const Vec quarter = -0.25 * g.bracket(g.bracket(x, y), z);
      curv = std::max(curv, rel(max_abs(geo.curvature(x, y, z) - quarter), max_abs(quarter)));
      const Vec xy = g.bracket(x, y);
      const double k = 0.25 * g.inner(xy, xy);
      sect = std::max(sect, rel(std::abs(geo.sectional(x, y) - k), k));
    }
    // Brute-force trace: sum_i <-1/4 [[e_i, y], z], e_i> over a -kappa orthonormal basis.
    const Eigen::SelfAdjointEigenSolver<Mat> eig(g.inner_gram());
    const Mat onb = eig.eigenvectors() * eig.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal();
    Mat oracle(d, d);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        double t = 0;
        for (int i = 0; i < d; ++i) {
          const Vec e = onb.col(i);
          t += g.inner(-0.25 * g.bracket(g.bracket(e, Vec::Unit(d, a)), Vec::Unit(d, b)), e);
        }
        oracle(a, b) = t;
      }
    const Mat ric = geo.ricci_matrix();
    const double rdev = rel((ric - oracle).cwiseAbs().maxCoeff(), oracle.cwiseAbs().maxCoeff());
    const double ratio = ric(0, 0) / -g.killing_gram()(0, 0);
    const std::string n = name;
    o.need(lc <= 1e-12, n + " nabla=ad/2 " + num(lc));
    o.need(curv <= 1e-12, n + " R=-ad[x,y]/4 " + num(curv));
    o.need(sect <= 1e-12, n + " K=|[x,y]|^2/4 " + num(sect));
    o.need(rdev <= 1e-12, n + " Ric vs trace oracle " + num(rdev));
    o.detail += "; " + n + " Ric/(-kappa)=" + num(ratio);
  }
  return o;
}

Outcome ac2() {
  Outcome o;
  Rng rng(202);
  auto judge = [&](const std::string& tag, const SymmetrySuite& s) {
    const double dev = std::max(s.expanded, s.commutator);
    o.need(dev <= 1e-10, tag + " " + num(dev));
  };
  for (const Vec& diag : {Vec(Eigen::Vector3d(1, 2, 3)), Vec(Eigen::Vector3d(0.5, 1, 4))}) {
    const MetrizedAlgebra space(LieAlgebra::su2(), Mat(diag.asDiagonal()));
    judge("su2 diag(" + num(diag[0]) + "," + num(diag[1]) + "," + num(diag[2]) + ")",
          symmetry_suite(Geometry(space), [&] { return uniform(rng, 3); }, 100));
  }
  for (const auto& [domain, n] : {std::pair{Domain::Circle, 16}, std::pair{Domain::Torus, 8}}) {
    const TruncatedGroupModel model({domain, n, 1.0, 1.0}, LieAlgebra::su2());
    judge(to_string(domain) + " N=" + std::to_string(n),
          symmetry_suite(Geometry(model), [&] { return model.random_element(rng, n); }, 100));
  }
  return o;
}

Outcome ac3() {
  Outcome o;
  Rng rng(303);
  for (double m0 : {0.5, 1.0}) {
    const TruncatedGroupModel model({Domain::Circle, 8, 1.0, m0}, LieAlgebra::su2());
    const Geometry geo(model);
    double line = 0, adj = 0, adj_oracle = 0;
    for (int n = 0; n < 3; ++n) {
      const Vec x = model.random_element(rng, 8), y = model.random_element(rng, 8);
      const FirstLineReport fl = first_line_identity_check(model, x, y);
      line = std::max(line, rel(fl.max_deviation(), fl.scale));
      adj = std::max(adj, gform_adjoint_deviation(model, x));
      // <-G ad_x G^-1 y, z> against <y, [x, z]> on low-degree inputs.
      const Vec xs = model.random_element(rng, 2), ys = model.random_element(rng, 2), zs = model.random_element(rng, 2);
      const double lhs = geo.inner(-model.apply_G(model.bracket(xs, model.apply_Ginv(ys))), zs);
      const double rhs = geo.inner(ys, model.bracket(xs, zs));
      adj_oracle = std::max(adj_oracle, rel(std::abs(lhs - rhs), std::abs(rhs)));
    }
    const std::string tag = "m0=" + num(m0);
    o.need(line <= 1e-10, tag + " first line " + num(line));
    o.need(adj <= 1e-10, tag + " adjoint " + num(adj));
    o.need(adj_oracle <= 1e-10, tag + " adjoint pairing " + num(adj_oracle));
  }
  return o;
}

Outcome ac4() {
  Outcome o;
  const LieAlgebra g = LieAlgebra::su2();
  auto run = [&](Domain domain, double s, int n, int lo, int hi) {
    const TruncatedGroupModel model({domain, n, s, 1.0, std::max(n, hi + 6)}, g);
    const Vec x = model.element(model.basis().index_of({1, 0}, Parity::Cos), Vec::Unit(3, 0));
    const Vec y = model.element(model.basis().index_of({2, 0}, Parity::Sin), Vec::Unit(3, 1));
    std::vector<std::array<int, 2>> freqs;
    for (int k = lo; k <= hi; ++k) freqs.push_back({k, 0});
    const DecayProbe p = order_decay_probe(model, x, y, Vec::Unit(3, 0), freqs);
    o.need(!p.degenerate && !p.unreliable && p.slope <= -1.75,
           to_string(domain) + " s=" + num(s) + " slope " + num(p.slope));
  };
  run(Domain::Circle, 1.0, 64, 8, 20);
  run(Domain::Torus, 2.0, 16, 4, 12);
  return o;
}

Outcome ac5() {
  Outcome o;
  const LieAlgebra g = LieAlgebra::su2();
  const std::vector<double> cutoffs{16, 32, 64};
  for (const auto& [s, m0, want_negative] : {std::tuple{1.0, 0.0, true}, std::tuple{1.5, 0.1, false}}) {
    const TruncatedGroupModel model({Domain::Circle, 64, s, m0, 64 + 6}, g);
    for (const auto& v : lowest_mode_vectors(model, 5)) {
      const Vec y = v.build(model);
      const RicciEstimate e = ricci_cutoff(model, y, y, cutoffs);
      const std::string tag = "s=" + num(s) + " " + v.label() + " Ric=" + num(e.value());
      if (want_negative) {
        o.need(e.value() < 0 && e.fit.residual < 0.05 * std::abs(e.value()), tag + " resid=" + num(e.fit.residual));
      } else {
        o.need(e.value() > 0, tag);
      }
    }
  }
  return o;
}

Outcome ac6() {
  Outcome o;
  const std::vector<double> cutoffs{16, 36, 64, 100, 144};
  const TruncatedGroupModel model({Domain::Circle, 144, 1.0, 1.0, 148}, LieAlgebra::su2());
  const Vec y = parse_vector_spec("cos1@0+cos2@1").build(model);
  const Extrapolation gf = extrapolate(cutoffs, grouped_partial_traces(model, y, y, cutoffs));
  const Extrapolation uf = extrapolate(cutoffs, ungrouped_partial_traces(model, y, y, cutoffs));
  o.need(gf.tail_exponent <= -0.75, "grouped tail exponent " + num(gf.tail_exponent));
  o.need(uf.verdict != Verdict::Convergent, "ungrouped " + to_string(uf.verdict) + " c=" + num(uf.log_coef));
  return o;
}

Outcome ac7() {
  Outcome o;
  const LieAlgebra g = LieAlgebra::su2();
  Rng rng(707);
  std::vector<std::tuple<TrigPoly2, TrigPoly2, Vec, Vec>> family;
  for (int i = 0; i < 20; ++i)
    family.emplace_back(random_trig_poly(rng, 3, 3), random_trig_poly(rng, 3, 3), uniform(rng, 3), uniform(rng, 3));
  for (double s : {0.5, 1.0, 2.0}) {
    double worst = 0;
    bool identical = true;
    for (const auto& [Y, Z, b, c] : family) {
      const double oracle = -pi * s * s * g.killing_form(b, c) * dirichlet_quadrature(Y, Z);
      const double w = wodzicki_ricci(Y, Z, b, c, g, s, 0.1);
      for (double m0 : {1.0, 10.0}) identical = identical && wodzicki_ricci(Y, Z, b, c, g, s, m0) == w;
      worst = std::max(worst, rel(std::abs(w - oracle), std::abs(oracle)));
    }
    o.need(worst <= 1e-10, "s=" + num(s) + " " + num(worst));
    o.need(identical, "s=" + num(s) + " m0-identical");
  }
  const Point x{0.3, 1.1};
  auto moment = [&](int i, int j) {
    return fiber_circle_integral(HomogeneousSymbol::monomial(TrigPoly2::constant(1), i, j, -2.0), x);
  };
  o.need(moment(2, 0) == pi && moment(0, 2) == pi && moment(1, 1) == 0.0, "fiber cos^2, sin^2, cos sin");
  return o;
}

Outcome ac8() {
  Outcome o;
  const LieAlgebra g = LieAlgebra::su2();
  Rng rng(808);
  double worst = 0;
  for (int i = 0; i < 20; ++i) {
    LieField y(3), z(3);
    for (int a = 0; a < 3; ++a) y[a] = random_trig_poly(rng, 3, 3), z[a] = random_trig_poly(rng, 3, 3);
    double ref = 0;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) ref += -g.killing_gram()(a, b) * dirichlet_quadrature(y[a], z[b]);
    if (std::abs(ref) < 1e-8) continue;
    worst = std::max(worst, std::abs(wodzicki_ricci(y, z, g, 1.0) / ref - pi) / pi);
  }
  o.need(worst <= 1e-10, "ratio deviation from pi " + num(worst));
  return o;
}

Outcome ac9() {
  Outcome o;
  const TrigPoly2 Y = TrigPoly2::cos(1, 0) + TrigPoly2::sin(1, 1, 0.5);
  const TrigPoly2 Z = TrigPoly2::cos(0, 1) + TrigPoly2::cos(1, 0, 0.3);
  const std::vector<Point> pts{{0.0, 0.0}, {0.7, 2.1}, {2.5, 4.0}, {4.4, 1.3}, {5.6, 5.2}};
  const PlaneWaveReport r = plane_wave_check(1.0, 1.0, Y, Z, {8, 12, 16, 24}, pts);
  o.need(r.slope <= -0.8, "error slope " + num(r.slope));
  o.detail += "; against the negated symbol " + num(r.slope_negated);
  return o;
}

Outcome ac10() {
  Outcome o;
  const LieAlgebra g = LieAlgebra::su2();
  Rng rng(1010);
  double green = 0;
  for (double m : {0.5, 1.0, 2.0}) {
    const auto pts = lattice_points(Domain::Circle, 8, uniform_spacing(Domain::Circle, 8));
    const Configuration c(Domain::Circle, pts, 1.0, m, g);
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) {
        const double t = std::abs(std::remainder(pts[i][0] - pts[j][0], 2 * pi));
        const double k = std::cosh(m * (pi - t)) / (2 * m * std::sinh(m * pi));
        green = std::max(green, std::abs(c.greens_matrix()(i, j) - k));
      }
  }
  o.need(green <= 1e-8, "Green kernel " + num(green));
  double suite = 0;
  for (const auto& [domain, s] : {std::pair{Domain::Circle, 1.0}, std::pair{Domain::Torus, 1.5}}) {
    const Configuration c(domain, lattice_points(domain, 4, uniform_spacing(domain, 4)), s, 1.0, g);
    suite = std::max(suite, symmetry_suite(Geometry(c.space()), [&] { return uniform(rng, c.space().dim()); }, 20).max());
  }
  o.need(suite <= 1e-10, "configuration symmetry suites " + num(suite));
  const Configuration one(Domain::Circle, {Point{0, 0}}, 1.0, 1.0, g);
  const double single = (config_ricci_matrix(one) + 0.25 * g.killing_gram()).cwiseAbs().maxCoeff();
  o.need(single <= 1e-12, "single point vs -kappa/4 " + num(single));
  const auto cells = ricci_lower_bound_scan(ScanGrid{}, g);
  int ok = 0;
  bool well_formed = cells.size() == 36;
  for (const auto& c : cells) {
    if (c.flags == "ok") ++ok, well_formed = well_formed && std::isfinite(c.min_rel_ricci);
  }
  o.need(well_formed, "scan " + std::to_string(cells.size()) + " cells, " + std::to_string(ok) + " ok");
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* id;
    double budget_seconds;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {{"AC1", 1, ac1},    {"AC2", 60, ac2},  {"AC3", 10, ac3}, {"AC4", 120, ac4},
                                {"AC5", 600, ac5},  {"AC6", 300, ac6}, {"AC7", 30, ac7}, {"AC8", 10, ac8},
                                {"AC9", 300, ac9},  {"AC10", 300, ac10}};
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.need(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.need(secs < c.budget_seconds, "runtime " + num(std::round(secs * 100) / 100) + "s");
    std::printf("%s %s  %s\n", o.pass ? "PASS" : "FAIL", c.id, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d of 10 criteria passed\n", 10 - failed);
  return failed ? 1 : 0;
}
