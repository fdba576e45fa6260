#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "common.hpp"
#include "curvlab/symbol_calc.hpp"

namespace curvlab::cli {

namespace {

struct RicciCase {
  double s, m0;
  std::string expect;  // negative, positive or none
};

RicciCase parse_case(const std::string& text) {
  std::stringstream ss(text);
  std::string a, b, c;
  if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':')) throw InputError("ricci case '" + text + "' is not s:m0[:sign]");
  std::getline(ss, c);
  RicciCase rc;
  try {
    rc.s = std::stod(a);
    rc.m0 = std::stod(b);
  } catch (const std::exception&) {
    throw InputError("ricci case '" + text + "' has a non-numeric field");
  }
  rc.expect = c.empty() ? "none" : c;
  if (!(rc.s > 0) || rc.m0 < 0) throw InputError("ricci case '" + text + "' needs s > 0 and m0 >= 0");
  if (rc.expect != "negative" && rc.expect != "positive" && rc.expect != "none")
    throw InputError("ricci case '" + text + "': sign must be negative, positive or none");
  return rc;
}

/// Upper bound on the degree of the vectors a spec list can produce.
int spec_degree(const std::vector<std::string>& specs) {
  int d = 0;
  for (const auto& s : specs) {
    if (s.rfind("lowest:", 0) == 0) {
      d = std::max(d, std::stoi(s.substr(7)));
      continue;
    }
    for (const auto& t : parse_vector_spec(s).terms) d = std::max({d, std::abs(t.k[0]), std::abs(t.k[1])});
  }
  return d;
}

void add_trace_rows(Report& rep, const std::string& tag, double s, double m0, const std::string& label,
                    const std::vector<double>& cutoffs, const std::vector<double>& traces, const Extrapolation& fit) {
  for (std::size_t i = 0; i < cutoffs.size(); ++i)
    rep.table().add_row({tag, format_number(s), format_number(m0), label, format_number(cutoffs[i]),
                         format_number(traces[i]), format_number(fit.value), format_number(fit.q),
                         format_number(fit.residual), format_number(fit.log_coef), format_number(fit.tail_exponent),
                         to_string(fit.verdict)});
}

}  // namespace

int circle_ricci(ExperimentConfig& cfg) {
  const LieAlgebra alg = LieAlgebra::by_name(cfg.get_string("model.algebra", "su2"));
  std::vector<RicciCase> cases;
  if (cfg.has("model.s") || cfg.has("model.m0")) {
    const double s = positive(cfg, "model.s", 1.0), m0 = cfg.get_double("model.m0", 0.0);
    cases.push_back(parse_case(format_number(s) + ":" + format_number(m0) + ":" + cfg.get_string("ricci.expect", "none")));
  } else {
    for (const auto& c : cfg.get_list("ricci.cases", "1:0:negative,1.5:0.1:positive,0.5:0:none,2:0.1:none"))
      cases.push_back(parse_case(c));
  }
  const auto cutoffs = increasing(cfg, "ricci.cutoffs", "16,32,64");
  const auto specs = cfg.get_list("ricci.vectors", "lowest:5");
  const int direction = cfg.get_int("ricci.direction", 0);
  const double frac = positive(cfg, "ricci.residual_fraction", 0.05);
  const double einstein_tol = positive(cfg, "ricci.einstein_tol", 1e-6);
  const bool naive = cfg.get_bool("naive.enabled", true);
  const auto naive_vec = parse_vector_spec(cfg.get_string("naive.vector", "cos1@0+cos2@1"));
  const double naive_s = positive(cfg, "naive.s", 1.0);
  const double naive_m0 = positive(cfg, "naive.m0", 1.0);
  const auto naive_cutoffs = increasing(cfg, "naive.cutoffs", "16,36,64,100,144");
  const double tail_bound = cfg.get_double("naive.tail_exponent", -0.75);
  const std::string dir = output_dir(cfg);
  if (cases.empty()) throw InputError("ricci.cases is empty");
  if (specs.empty()) throw InputError("ricci.vectors is empty");
  if (direction < 0 || direction >= alg.dim()) throw InputError("ricci.direction out of range");
  const int degree = spec_degree(specs);
  cfg.reject_unused();

  Report rep("circle-ricci", {"case", "s", "m0", "y", "M", "T_M", "T_inf", "q", "residual", "log_coef",
                              "tail_exponent", "verdict"});
  const double top = cutoffs.back();
  for (const auto& rc : cases) {
    const int n = static_cast<int>(std::ceil(top));
    const TruncatedGroupModel model({Domain::Circle, n, rc.s, rc.m0, n + 2 * degree}, alg);
    const Geometry geo(model);
    const std::string tag = "s" + format_number(rc.s) + "_m0_" + format_number(rc.m0);
    std::vector<std::pair<double, double>> ratios;
    auto& diag = rep.diagnostics()[tag];
    for (const auto& v : resolve_vectors(specs, model, direction)) {
      const Vec y = v.build(model);
      const RicciEstimate est = ricci_cutoff(model, y, y, cutoffs);
      const std::string label = v.label();
      add_trace_rows(rep, tag, rc.s, rc.m0, label, cutoffs, est.partial, est.fit);
      ratios.push_back({est.value(), geo.inner(y, y)});
      diag["values"][label] = format_number(est.value());
      rep.note(tag + " " + label + ": Ric = " + format_number(est.value()) + " (" + to_string(est.fit.verdict) + ")");
      if (rc.expect == "negative") {
        rep.check(tag + "." + label + ".negative", est.value() < 0, est.value(), "<", 0);
        const double bound = frac * std::abs(est.value());
        rep.check(tag + "." + label + ".residual", est.fit.residual < bound, est.fit.residual, "<", bound);
      } else if (rc.expect == "positive") {
        rep.check(tag + "." + label + ".positive", est.value() > 0, est.value(), ">", 0);
      }
    }
    // Ratios against the model metric <y,y>; constant ratios would mean Einstein on this family.
    try {
      const EinsteinStats st = einstein_ratio(ratios, einstein_tol);
      diag["einstein_mean"] = format_number(st.mean);
      diag["einstein_spread"] = format_number(st.spread);
      diag["einstein"] = st.einstein;
    } catch (const InputError& e) {
      diag["einstein"] = e.what();
    }
  }

  if (naive) {
    const int n = static_cast<int>(std::ceil(naive_cutoffs.back()));
    int deg = 0;
    for (const auto& t : naive_vec.terms) deg = std::max(deg, std::abs(t.k[0]));
    const TruncatedGroupModel model({Domain::Circle, n, naive_s, naive_m0, n + 2 * deg}, alg);
    const Vec y = naive_vec.build(model);
    const auto grouped = grouped_partial_traces(model, y, y, naive_cutoffs);
    const auto ungrouped = ungrouped_partial_traces(model, y, y, naive_cutoffs);
    const Extrapolation gf = extrapolate(naive_cutoffs, grouped), uf = extrapolate(naive_cutoffs, ungrouped);
    const std::string tag = "s" + format_number(naive_s) + "_m0_" + format_number(naive_m0);
    add_trace_rows(rep, "grouped_" + tag, naive_s, naive_m0, naive_vec.label(), naive_cutoffs, grouped, gf);
    add_trace_rows(rep, "ungrouped_" + tag, naive_s, naive_m0, naive_vec.label(), naive_cutoffs, ungrouped, uf);
    rep.note("grouped: " + to_string(gf.verdict) + ", ungrouped: " + to_string(uf.verdict) +
             " (log coefficient " + format_number(uf.log_coef) + ")");
    rep.check("naive.grouped_tail_exponent", gf.tail_exponent <= tail_bound, gf.tail_exponent, "<=", tail_bound);
    rep.check("naive.ungrouped_not_convergent", uf.verdict != Verdict::Convergent, uf.verdict == Verdict::Convergent,
              "==", 0);
  }
  return finish(rep, cfg, dir);
}

int torus_ricci(ExperimentConfig& cfg) {
  const LieAlgebra alg = LieAlgebra::by_name(cfg.get_string("model.algebra", "su2"));
  const double s = positive(cfg, "model.s", 1.0);
  const auto s_values = cfg.get_doubles("torus.s_values", "0.5,1,2");
  const auto m0_values = cfg.get_doubles("torus.m0_values", "0.1,1,10");
  const int ncases = cfg.get_int("torus.cases", 20);
  const int max_freq = cfg.get_int("torus.max_freq", 3);
  const int terms = cfg.get_int("torus.terms", 3);
  const double tol = positive(cfg, "run.tolerance", 1e-10);
  const bool plane = cfg.get_bool("torus.plane_wave", true);
  const auto momenta = increasing(cfg, "torus.momenta", "8,12,16,24");
  const double plane_m0 = positive(cfg, "torus.plane_m0", 1.0);
  const double plane_slope = cfg.get_double("torus.plane_wave_slope", -0.8);
  const bool matrix = cfg.get_bool("torus.matrix_log", true);
  const int matrix_n = cfg.get_int("torus.matrix_cutoff", 12);
  Rng rng(seed(cfg));
  const std::string dir = output_dir(cfg);
  if (s_values.empty() || m0_values.empty()) throw InputError("torus.s_values and torus.m0_values must be nonempty");
  for (double v : s_values)
    if (!(v > 0)) throw InputError("torus.s_values must be positive");
  for (double v : m0_values)
    if (v < 0) throw InputError("torus.m0_values must be nonnegative");
  if (ncases < 1 || max_freq < 1 || terms < 1) throw InputError("torus.cases, max_freq and terms must be positive");
  if (matrix_n < 4) throw InputError("torus.matrix_cutoff must be at least 4");
  cfg.reject_unused();

  Report rep("torus-ricci", {"section", "label", "s", "m0", "value", "reference", "deviation"});
  auto row = [&](const std::string& sec, const std::string& label, double sv, double m0, double v, double ref) {
    rep.table().add_row({sec, label, format_number(sv), format_number(m0), format_number(v), format_number(ref),
                         format_number(std::abs(v - ref))});
  };
  const double pi = std::numbers::pi;

  // Fiber moments through the symbol pipeline: p_i p_j |p|^-4 on the unit circle.
  const std::pair<const char*, std::array<int, 2>> moments[] = {{"cos2", {2, 0}}, {"sin2", {0, 2}}, {"cossin", {1, 1}}};
  for (const auto& [name, ij] : moments) {
    const auto sym = HomogeneousSymbol::monomial(TrigPoly2::constant(1.0), ij[0], ij[1], -2.0);
    const double v = fiber_circle_integral(sym, {0.3, 1.1});
    const double ref = ij[0] == ij[1] ? 0.0 : pi;
    row("fiber", name, 0, 0, v, ref);
    rep.check(std::string("fiber.") + name, v == ref, v, "==", ref);
  }

  // Residue Ricci against the closed form, and independence of m0.
  std::vector<std::tuple<TrigPoly2, TrigPoly2, Vec, Vec>> family;
  for (int i = 0; i < ncases; ++i)
    family.emplace_back(random_trig_poly(rng, max_freq, terms), random_trig_poly(rng, max_freq, terms),
                        uniform_vector(rng, alg.dim()), uniform_vector(rng, alg.dim()));
  for (double sv : s_values) {
    double worst = 0;
    bool identical = true;
    for (int i = 0; i < ncases; ++i) {
      const auto& [Y, Z, b, c] = family[i];
      const double closed = surface_ricci_closed_form(Y, Z, b, c, alg, sv);
      const double first = wodzicki_ricci(Y, Z, b, c, alg, sv, m0_values.front());
      for (double m0 : m0_values) identical = identical && wodzicki_ricci(Y, Z, b, c, alg, sv, m0) == first;
      worst = std::max(worst, std::abs(first - closed) / std::max(1.0, std::abs(closed)));
      row("residue", "case" + std::to_string(i), sv, m0_values.front(), first, closed);
    }
    const std::string tag = "residue_s" + format_number(sv);
    rep.check(tag + ".closed_form", worst <= tol, worst, "<=", tol);
    rep.check(tag + ".m0_identical", identical, !identical, "==", 0);
  }

  // Einstein ratio on general k-valued fields.
  {
    std::vector<std::pair<double, double>> pairs;
    for (int i = 0; i < ncases; ++i) {
      LieField y(alg.dim()), z(alg.dim());
      for (int a = 0; a < alg.dim(); ++a) {
        y[a] = random_trig_poly(rng, max_freq, terms);
        z[a] = random_trig_poly(rng, max_freq, terms);
      }
      const double ric = wodzicki_ricci(y, z, alg, s), ref = reference_pairing(y, z, alg);
      pairs.push_back({ric, ref});
      row("einstein", "pair" + std::to_string(i), s, 0, ric, pi * s * s * ref);
    }
    const EinsteinStats st = einstein_ratio(pairs, tol);
    const double expect = pi * s * s;
    const double dev = std::abs(st.mean - expect) / expect;
    rep.diagnostics()["einstein"] = {{"mean", format_number(st.mean)},
                                     {"spread", format_number(st.spread)},
                                     {"excluded", st.excluded}};
    rep.note("Einstein ratio " + format_number(st.mean) + " (pi s^2 = " + format_number(expect) + ")");
    rep.check("einstein.ratio", dev <= tol, dev, "<=", tol);
    rep.check("einstein.spread", st.spread <= tol, st.spread, "<=", tol);
  }

  if (plane) {
    const TrigPoly2 Y = TrigPoly2::cos(1, 0) + TrigPoly2::sin(1, 1, 0.5);
    const TrigPoly2 Z = TrigPoly2::cos(0, 1) + TrigPoly2::cos(1, 0, 0.3);
    std::vector<int> ns;
    for (double m : momenta) ns.push_back(static_cast<int>(m));
    const std::vector<Point> points{{0.0, 0.0}, {0.7, 2.1}, {2.5, 4.0}, {4.4, 1.3}, {5.6, 5.2}};
    const PlaneWaveReport pw = plane_wave_check(s, plane_m0, Y, Z, ns, points);
    for (std::size_t i = 0; i < pw.momenta.size(); ++i) {
      row("plane_wave", "p" + format_number(pw.momenta[i]), s, plane_m0, pw.errors[i], 0);
      row("plane_wave_negated", "p" + format_number(pw.momenta[i]), s, plane_m0, pw.errors_negated[i], 0);
    }
    rep.diagnostics()["plane_wave"] = {{"slope", format_number(pw.slope)},
                                       {"slope_against_negated_symbol", format_number(pw.slope_negated)}};
    rep.note("plane-wave error slope " + format_number(pw.slope) + ", against the negated symbol " +
             format_number(pw.slope_negated));
    rep.check("plane_wave.slope", pw.slope <= plane_slope, pw.slope, "<=", plane_slope);
  }

  if (matrix) {
    // Grouped matrix traces on the torus grow like c log M, with c = Res / (4 pi^2).
    const TruncatedGroupModel model({Domain::Torus, matrix_n, s, plane_m0, matrix_n + 2}, alg);
    const TestVector tv = parse_test_vector("cos1@0");
    const Vec y = tv.build(model);
    std::vector<double> cutoffs;
    for (int m = 2; m <= matrix_n; m += 2) cutoffs.push_back(m);
    const auto traces = grouped_partial_traces(model, y, y, cutoffs);
    const std::size_t first = cutoffs.size() / 2;
    Mat design(cutoffs.size() - first, 2);
    Vec rhs(design.rows());
    for (std::size_t i = first; i < cutoffs.size(); ++i) {
      design(i - first, 0) = 1;
      design(i - first, 1) = std::log(cutoffs[i]);
      rhs[i - first] = traces[i];
    }
    const double c = least_squares(design, rhs).coef[1];
    const Vec b = Vec::Unit(alg.dim(), 0) / std::sqrt(alg.inner(Vec::Unit(alg.dim(), 0), Vec::Unit(alg.dim(), 0)));
    const TrigPoly2 Y = TrigPoly2::cos(1, 0, std::sqrt(2.0));
    const double predicted = wodzicki_ricci(Y, Y, b, b, alg, s) / (4 * pi * pi);
    for (std::size_t i = 0; i < cutoffs.size(); ++i) row("matrix_trace", "M" + format_number(cutoffs[i]), s, plane_m0, traces[i], 0);
    row("matrix_log_coefficient", tv.label(), s, plane_m0, c, predicted);
    rep.diagnostics()["matrix_log_coefficient"] = {{"observed", format_number(c)},
                                                   {"from_residue", format_number(predicted)},
                                                   {"ratio", format_number(c / predicted)}};
    rep.note("matrix trace log coefficient " + format_number(c) + ", residue predicts " + format_number(predicted));
  }
  return finish(rep, cfg, dir);
}

}  // namespace curvlab::cli
