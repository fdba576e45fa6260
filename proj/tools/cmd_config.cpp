#include <algorithm>
#include <cmath>
#include <numbers>

#include "common.hpp"
#include "curvlab/config_model.hpp"

namespace curvlab::cli {

namespace {

/// Circle kernel of (Delta + m^2)^{-1} with respect to dV.
double circle_kernel(double theta, double m) {
  const double t = std::abs(detail::wrap_angle(theta));
  return std::cosh(m * (std::numbers::pi - t)) / (2 * m * std::sinh(m * std::numbers::pi));
}

std::vector<int> to_ints(const std::vector<double>& v, const std::string& key) {
  std::vector<int> out;
  for (double x : v) {
    if (x != std::floor(x) || x < 1) throw InputError(key + " must hold positive integers");
    out.push_back(static_cast<int>(x));
  }
  return out;
}

}  // namespace

int config_scan(ExperimentConfig& cfg) {
  const LieAlgebra alg = LieAlgebra::by_name(cfg.get_string("model.algebra", "su2"));
  ScanGrid grid;
  grid.domain = parse_domain(cfg.get_string("scan.domain", "circle"));
  grid.point_counts = to_ints(cfg.get_doubles("scan.point_counts", "4,8,16"), "scan.point_counts");
  grid.spacing_factors = cfg.get_doubles("scan.spacing_factors", "1,0.5,0.25");
  grid.s_values = cfg.get_doubles("scan.s_values", "1,1.5");
  grid.m0_values = cfg.get_doubles("scan.m0_values", "0.1,1");
  auto green_m0 = cfg.get_doubles("green.m0_values", "0.5,1,2");
  const int green_points = cfg.get_int("green.points", 8);
  const double green_tol = positive(cfg, "green.tolerance", 1e-8);
  const double tol = positive(cfg, "run.tolerance", 1e-10);
  const int samples = cfg.get_int("config.samples", 20);
  const std::string points_file = cfg.get_string("config.points", "");
  const double s = positive(cfg, "model.s", 1.0);
  const double m0 = positive(cfg, "model.m0", 1.0);
  const Domain domain = parse_domain(cfg.get_string("model.domain", "circle"));
  Rng rng(seed(cfg));
  const std::string dir = output_dir(cfg);
  for (const std::vector<double>* v : {&grid.spacing_factors, &grid.s_values, &grid.m0_values, &green_m0}) {
    if (v->empty()) throw InputError("scan and green grids must be nonempty");
    for (double x : *v)
      if (!(x > 0)) throw InputError("scan and green grid values must be positive");
  }
  if (grid.point_counts.empty()) throw InputError("scan.point_counts is empty");
  if (green_points < 2 || samples < 1) throw InputError("green.points must be >= 2 and config.samples >= 1");
  std::vector<Point> custom;
  if (!points_file.empty()) custom = load_points(points_file, domain);
  cfg.reject_unused();

  Report rep("config-scan", {"domain", "|V|", "spacing", "s", "m0", "min_rel_ricci", "condition_number", "flags"});

  // Green's matrix against the closed-form circle kernel at s = 1.
  double green_dev = 0;
  for (double m : green_m0) {
    const auto pts = lattice_points(Domain::Circle, green_points, uniform_spacing(Domain::Circle, green_points));
    const Configuration c(Domain::Circle, pts, 1.0, m, alg);
    for (int i = 0; i < green_points; ++i)
      for (int j = 0; j < green_points; ++j)
        green_dev = std::max(green_dev, std::abs(c.greens_matrix()(i, j) - circle_kernel(pts[i][0] - pts[j][0], m)));
  }
  rep.check("green.closed_form", green_dev <= green_tol, green_dev, "<=", green_tol);

  auto curvature_checks = [&](const std::string& tag, const Configuration& c) {
    const Geometry geo(c.space());
    const auto n = c.space().dim();
    const SymmetrySuite suite = symmetry_suite(geo, [&] { return uniform_vector(rng, n); }, samples);
    rep.check(tag + ".symmetry_suite", suite.max() <= tol, suite.max(), "<=", tol);
    const Mat id = c.greens_matrix() * c.greens_inverse();
    const double round = (id - Mat::Identity(id.rows(), id.cols())).cwiseAbs().maxCoeff();
    rep.check(tag + ".green_round_trip", round <= tol, round, "<=", tol);
  };

  // Four evenly spaced points, and the user's point file if given.
  curvature_checks("lattice4", Configuration(domain, lattice_points(domain, 4, uniform_spacing(domain, 4)), s, m0, alg));
  if (!custom.empty()) {
    const Configuration c(domain, custom, s, m0, alg);
    curvature_checks("points_file", c);
    rep.diagnostics()["points_file"] = {{"points", custom.size()},
                                        {"condition_number", format_number(c.condition_number())},
                                        {"min_rel_ricci", format_number(min_relative_ricci(c, config_ricci_matrix(c)))}};
  }

  // One point: Ric is the bi-invariant -kappa/4 whatever the metric scale, so the relative
  // Ricci bound is G(v,v) / 4.
  {
    const Configuration c(domain, {Point{0.0, 0.0}}, s, m0, alg);
    const Mat ric = config_ricci_matrix(c);
    const Mat closed = -0.25 * alg.killing_gram();
    const double dev = (ric - closed).cwiseAbs().maxCoeff() / std::max(1.0, closed.cwiseAbs().maxCoeff());
    rep.check("single_point.ricci", dev <= tol, dev, "<=", tol);
    if (!alg.abelian() && (alg.inner_gram() + alg.killing_gram()).cwiseAbs().maxCoeff() < 1e-12) {
      const double rel_min = min_relative_ricci(c, ric), expect = c.greens_matrix()(0, 0) / 4;
      const double rdev = std::abs(rel_min - expect) / expect;
      rep.check("single_point.relative_ricci", rdev <= tol, rdev, "<=", tol);
    }
  }

  const auto cells = ricci_lower_bound_scan(grid, alg);
  for (const auto& cell : cells)
    rep.table().add_row({to_string(cell.domain), std::to_string(cell.count), format_number(cell.spacing),
                         format_number(cell.s), format_number(cell.m0), format_number(cell.min_rel_ricci),
                         format_number(cell.condition_number), cell.flags});
  const std::size_t expected =
      grid.point_counts.size() * grid.spacing_factors.size() * grid.s_values.size() * grid.m0_values.size();
  rep.check("scan.cells", cells.size() == expected, static_cast<double>(cells.size()), "==", static_cast<double>(expected));
  return finish(rep, cfg, dir);
}

}  // namespace curvlab::cli
