#include <algorithm>
#include <cmath>
#include <iostream>

#include "common.hpp"
#include "curvlab/curvature.hpp"
#include "curvlab/sobolev_model.hpp"

namespace curvlab::cli {

namespace {

double rel(double dev, double scale) { return dev / std::max(1.0, scale); }

void add_row(Report& r, const std::string& what, const std::string& check, double dev, double bound) {
  r.table().add_row({what, check, format_number(dev), format_number(bound), dev <= bound ? "true" : "false"});
}

void suite_rows(Report& r, const std::string& what, const SymmetrySuite& s, double bound) {
  const std::pair<const char*, double> items[] = {
      {"antisymmetry", s.antisymmetry}, {"skew", s.skew},       {"pair", s.pair},
      {"bianchi", s.bianchi},           {"compatibility", s.compatibility}, {"torsion", s.torsion},
      {"expanded", s.expanded},         {"commutator", s.commutator}};
  for (const auto& [name, dev] : items) add_row(r, what, name, dev, bound);
}

}  // namespace

int biinvariant_check(ExperimentConfig& cfg) {
  const auto names = cfg.get_list("biinvariant.algebras", "su2,su3");
  const int samples = cfg.get_int("biinvariant.samples", 100);
  const double tol = positive(cfg, "run.tolerance", 1e-12);
  Rng rng(seed(cfg));
  const std::string dir = output_dir(cfg);
  if (names.empty()) throw InputError("biinvariant.algebras is empty");
  if (samples < 1) throw InputError("biinvariant.samples must be positive");
  std::vector<LieAlgebra> algebras;
  for (const auto& n : names) algebras.push_back(LieAlgebra::by_name(n, InnerProduct::NegativeKilling));
  cfg.reject_unused();

  Report rep("biinvariant-check", {"algebra", "check", "max_deviation", "bound", "pass"});
  for (std::size_t ai = 0; ai < algebras.size(); ++ai) {
    const LieAlgebra& alg = algebras[ai];
    const std::string& name = names[ai];
    const MetrizedAlgebra space(alg);
    const Geometry geo(space);
    const int d = alg.dim();
    double lc = 0, curv = 0, sect = 0;
    for (int n = 0; n < samples; ++n) {
      const Vec x = uniform_vector(rng, d), y = uniform_vector(rng, d), z = uniform_vector(rng, d);
      const Vec half = 0.5 * alg.bracket(x, y);
      lc = std::max(lc, rel(max_abs(geo.levi_civita(x, y) - half), max_abs(half)));
      const Vec expect = -0.25 * alg.bracket(alg.bracket(x, y), z);
      curv = std::max(curv, rel(max_abs(geo.curvature(x, y, z) - expect), max_abs(expect)));
      const Vec xy = alg.bracket(x, y);
      const double quarter = 0.25 * alg.inner(xy, xy);
      sect = std::max(sect, rel(std::abs(geo.sectional(x, y) - quarter), quarter));
    }
    add_row(rep, name, "levi_civita_half_bracket", lc, tol);
    add_row(rep, name, "curvature_quarter_double_bracket", curv, tol);
    add_row(rep, name, "sectional_quarter_norm", sect, tol);
    rep.check(name + ".levi_civita", lc <= tol, lc, "<=", tol);
    rep.check(name + ".curvature", curv <= tol, curv, "<=", tol);
    rep.check(name + ".sectional", sect <= tol, sect, "<=", tol);

    // Ricci from the engine trace against the closed form -kappa/4.
    const Mat ric = geo.ricci_matrix();
    const Mat closed = -0.25 * alg.killing_gram();
    const double ric_dev = rel((ric - closed).cwiseAbs().maxCoeff(), closed.cwiseAbs().maxCoeff());
    add_row(rep, name, "ricci_minus_quarter_killing", ric_dev, tol);
    rep.check(name + ".ricci", ric_dev <= tol, ric_dev, "<=", tol);
    double ratio = 0;
    for (int a = 0; a < d; ++a) ratio = std::max(ratio, ric(a, a) / -alg.killing_gram()(a, a));
    rep.diagnostics()[name]["ricci_over_minus_killing"] = format_number(ratio);
    rep.note(name + ": Ric / (-kappa) = " + format_number(ratio));

    const SymmetrySuite suite = symmetry_suite(geo, [&] { return uniform_vector(rng, d); }, samples);
    suite_rows(rep, name, suite, tol);
    rep.check(name + ".symmetry_suite", suite.max() <= tol, suite.max(), "<=", tol);
  }
  return finish(rep, cfg, dir);
}

int identity_check(ExperimentConfig& cfg) {
  const double s = positive(cfg, "model.s", 1.0);
  const auto m0_values = cfg.get_doubles("identity.m0_values", "0.5,1");
  const int cutoff = cfg.get_int("model.cutoff", 8);
  const int pairs = cfg.get_int("identity.samples", 3);
  const double tol = positive(cfg, "run.tolerance", 1e-10);
  const int quads = cfg.get_int("equivalence.samples", 100);
  const auto diag = cfg.get_doubles("equivalence.metric_diag", "1,2,3");
  const int circle_cutoff = cfg.get_int("equivalence.circle_cutoff", 16);
  const int torus_cutoff = cfg.get_int("equivalence.torus_cutoff", 8);
  const double eq_m0 = positive(cfg, "equivalence.m0", 1.0);
  const LieAlgebra alg = LieAlgebra::by_name(cfg.get_string("model.algebra", "su2"));
  Rng rng(seed(cfg));
  const std::string dir = output_dir(cfg);
  if (m0_values.empty()) throw InputError("identity.m0_values is empty");
  for (double m : m0_values)
    if (!(m > 0)) throw InputError("identity.m0_values must be positive (G-form identities need m0 > 0)");
  if (cutoff < 1 || circle_cutoff < 1 || torus_cutoff < 1) throw InputError("cutoffs must be at least 1");
  if (pairs < 1 || quads < 1) throw InputError("sample counts must be positive");
  if (static_cast<int>(diag.size()) != 3) throw InputError("equivalence.metric_diag needs three entries for su2");
  for (double g : diag)
    if (!(g > 0)) throw InputError("equivalence.metric_diag entries must be positive");
  cfg.reject_unused();

  Report rep("identity-check", {"case", "check", "max_deviation", "bound", "pass"});
  for (double m0 : m0_values) {
    const TruncatedGroupModel model({Domain::Circle, cutoff, s, m0}, alg);
    const std::string tag = "circle_s" + format_number(s) + "_m0_" + format_number(m0);
    double line = 0, adj = 0;
    for (int n = 0; n < pairs; ++n) {
      const Vec x = model.random_element(rng, cutoff), y = model.random_element(rng, cutoff);
      const FirstLineReport fl = first_line_identity_check(model, x, y);
      line = std::max(line, rel(fl.max_deviation(), fl.scale));
      adj = std::max(adj, gform_adjoint_deviation(model, x));
    }
    add_row(rep, tag, "first_line_assemblies", line, tol);
    add_row(rep, tag, "adjoint_gform", adj, tol);
    rep.check(tag + ".first_line", line <= tol, line, "<=", tol);
    rep.check(tag + ".adjoint", adj <= tol, adj, "<=", tol);
  }

  auto equivalence = [&](const std::string& tag, const SymmetrySuite& suite) {
    suite_rows(rep, tag, suite, tol);
    const double dev = std::max(suite.expanded, suite.commutator);
    rep.check(tag + ".formula_equivalence", dev <= tol, dev, "<=", tol);
  };
  {
    const Vec g = Eigen::Map<const Vec>(diag.data(), 3);
    const MetrizedAlgebra space(LieAlgebra::su2(), Mat(g.asDiagonal()));
    equivalence("su2_diag", symmetry_suite(Geometry(space), [&] { return uniform_vector(rng, 3); }, quads));
  }
  for (const auto& [domain, n] : {std::pair{Domain::Circle, circle_cutoff}, std::pair{Domain::Torus, torus_cutoff}}) {
    const TruncatedGroupModel model({domain, n, s, eq_m0}, alg);
    const std::string tag = to_string(domain) + "_N" + std::to_string(n);
    equivalence(tag, symmetry_suite(Geometry(model), [&] { return model.random_element(rng, n); }, quads));
  }
  return finish(rep, cfg, dir);
}

int order_probe(ExperimentConfig& cfg) {
  const double m0 = positive(cfg, "model.m0", 1.0);
  const LieAlgebra alg = LieAlgebra::by_name(cfg.get_string("model.algebra", "su2"));
  const double circle_s = positive(cfg, "order.circle_s", 1.0);
  const int circle_n = cfg.get_int("order.circle_cutoff", 64);
  const auto circle_window = cfg.get_doubles("order.circle_window", "8,20");
  const double torus_s = positive(cfg, "order.torus_s", 2.0);
  const int torus_n = cfg.get_int("order.torus_cutoff", 16);
  const auto torus_window = cfg.get_doubles("order.torus_window", "4,12");
  const auto x_spec = parse_vector_spec(cfg.get_string("order.x", "cos1@0"));
  const auto y_spec = parse_vector_spec(cfg.get_string("order.y", "sin2@1"));
  const int direction = cfg.get_int("order.direction", 0);
  const double threshold = cfg.get_double("order.threshold", -1.75);
  const std::string dir = output_dir(cfg);
  for (const auto* w : {&circle_window, &torus_window})
    if (w->size() != 2 || (*w)[0] < 1 || (*w)[1] <= (*w)[0]) throw InputError("order windows are 'lo,hi' with 1 <= lo < hi");
  if (direction < 0 || direction >= alg.dim()) throw InputError("order.direction out of range");
  cfg.reject_unused();

  Report rep("order-probe", {"domain", "s", "m0", "frequency", "ratio"});
  auto run = [&](Domain domain, double s, int n, const std::vector<double>& window) {
    const int lo = static_cast<int>(window[0]), hi = static_cast<int>(window[1]);
    if (hi > n) throw InputError("order window exceeds the cutoff for " + to_string(domain));
    // Exact probe needs the ambient basis to reach hi + 2 (deg x + deg y).
    int reach = 0;
    for (const auto* v : {&x_spec, &y_spec})
      for (const auto& t : v->terms) reach += std::max(std::abs(t.k[0]), std::abs(t.k[1]));
    const TruncatedGroupModel model({domain, n, s, m0, std::max(n, hi + 2 * reach)}, alg);
    const Vec x = x_spec.build(model), y = y_spec.build(model);
    std::vector<std::array<int, 2>> freqs;
    for (int k = lo; k <= hi; ++k) freqs.push_back({k, 0});
    const DecayProbe p = order_decay_probe(model, x, y, Vec::Unit(alg.dim(), direction), freqs);
    for (std::size_t i = 0; i < p.frequencies.size(); ++i)
      rep.table().add_row({to_string(domain), format_number(s), format_number(m0), format_number(p.frequencies[i]),
                           format_number(p.ratios[i])});
    const std::string tag = to_string(domain) + "_s" + format_number(s);
    rep.check(tag + ".nondegenerate", !p.degenerate && !p.unreliable, p.degenerate || p.unreliable, "==", 0);
    rep.check(tag + ".decay_slope", p.slope <= threshold, p.slope, "<=", threshold);
  };
  run(Domain::Circle, circle_s, circle_n, circle_window);
  run(Domain::Torus, torus_s, torus_n, torus_window);
  return finish(rep, cfg, dir);
}

}  // namespace curvlab::cli
