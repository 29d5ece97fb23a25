// Command-line front end: catalog problems, solver runs, convergence
// studies, spectra, stability regions and benchmarks, driven by a flat
// key = value config file with --set overrides.
//
// Exit codes: 0 success, 1 configuration error, 2 runtime failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pibgk/config.hpp"
#include "pibgk/csv.hpp"
#include "pibgk/harness.hpp"
#include "pibgk/integrate.hpp"
#include "pibgk/problems.hpp"
#include "pibgk/spectral.hpp"

namespace {

using namespace pibgk;

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<double> double_list(const Config& cfg, const std::string& key,
                                const std::string& dflt) {
  std::vector<double> v;
  for (const auto& tok : split_csv(cfg.get_string(key, dflt))) {
    try {
      v.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "': bad number '" + tok + "'");
    }
  }
  return v;
}

std::vector<int> int_list(const Config& cfg, const std::string& key,
                          const std::string& dflt) {
  std::vector<int> v;
  for (double d : double_list(cfg, key, dflt)) v.push_back(static_cast<int>(d));
  return v;
}

// Keys understood by every subcommand.
const std::vector<std::string> common_keys = {
    "problem.name",     "problem.epsilon", "problem.t_end",
    "problem.cfl_C",    "problem.dx",      "model.lambda",
    "model.lambda_m",   "model.lambda_p",  "model.lambda1",
    "model.lambda2",    "model.theta",     "model.mu",
    "grid.nx",          "grid.ny",         "scheme.hyperbolic",
    "scheme.parabolic_order", "integrator.order", "integrator.n_inner",
    "integrator.dt_outer"};

void require_known(const Config& cfg, std::vector<std::string> extra) {
  extra.insert(extra.end(), common_keys.begin(), common_keys.end());
  cfg.require_known(extra);
}

// Applies a model override that is either a number or "auto" (keep the
// catalog's choice).
void override_constant(const Config& cfg, const std::string& key, double& dst) {
  if (!cfg.has(key) || cfg.get_string(key) == "auto") return;
  dst = cfg.get_double(key);
}

Problem load_problem(const Config& cfg, const std::string& default_name = "") {
  const std::string name = cfg.get_string("problem.name", default_name);
  if (name.empty()) throw ConfigError("missing config key 'problem.name'");
  Problem p = catalog(name);
  if (cfg.has("problem.epsilon")) {
    const double eps = cfg.get_double("problem.epsilon");
    if (eps == 0.0)
      throw ConfigError(
          "problem.epsilon = 0: the explicit inner scheme requires a positive "
          "relaxation time");
    if (!(eps > 0.0 && eps <= 1.0))
      throw ConfigError("problem.epsilon must lie in (0, 1]");
    p.epsilon = eps;
  }
  if (cfg.has("problem.t_end")) p.t_end = cfg.get_double("problem.t_end");
  if (cfg.has("problem.cfl_C")) p.cfl_C = cfg.get_double("problem.cfl_C");
  if (cfg.has("problem.dx")) p.dx = p.dy = cfg.get_double("problem.dx");
  override_constant(cfg, "model.lambda", p.lambda);
  override_constant(cfg, "model.lambda_m", p.lambda_m);
  override_constant(cfg, "model.lambda_p", p.lambda_p);
  override_constant(cfg, "model.lambda1", p.lambda1);
  override_constant(cfg, "model.lambda2", p.lambda2);
  override_constant(cfg, "model.theta", p.theta);
  override_constant(cfg, "model.mu", p.mu);

  // Validate admissibility over the catalog's state box.
  const KineticModel m = p.build_model();
  const int samples = (p.n_components > 1) ? 21 : 101;
  const AdmissibilityReport rep = check_mmf(m, p.state_box, samples);
  if (!rep.is_mmf)
    throw ConfigError("model constants violate the monotonicity condition "
                      "(max condition value " +
                      g17(rep.max_condition_value) +
                      "); raise model.lambda/model.theta");
  return p;
}

Grid load_grid(const Config& cfg, const Problem& p) {
  const int nx = cfg.get_int("grid.nx", p.recommended_nx());
  const int ny = cfg.get_int("grid.ny", p.recommended_ny());
  return (p.dim == 2) ? make_grid_2d(nx, ny, p.x_lo, p.x_hi, p.y_lo, p.y_hi)
                      : make_grid_1d(nx, p.x_lo, p.x_hi);
}

SchemeSpec load_scheme(const Config& cfg) {
  SchemeSpec s;
  const std::string h = cfg.get_string("scheme.hyperbolic", "upwind3");
  if (h == "upwind1")
    s.hyperbolic = HyperbolicScheme::Upwind1;
  else if (h == "upwind3")
    s.hyperbolic = HyperbolicScheme::Upwind3;
  else if (h == "upwind4")
    s.hyperbolic = HyperbolicScheme::Upwind4;
  else if (h == "cweno3")
    s.hyperbolic = HyperbolicScheme::Cweno3;
  else
    throw ConfigError("scheme.hyperbolic: unknown scheme '" + h +
                      "' (upwind1|upwind3|upwind4|cweno3)");
  s.parabolic_order = cfg.get_int("scheme.parabolic_order", 4);
  if (s.parabolic_order != 2 && s.parabolic_order != 4)
    throw ConfigError("scheme.parabolic_order must be 2 or 4");
  return s;
}

ProjectiveParams load_params(const Config& cfg, const Problem& p, const Grid& g) {
  ProjectiveParams par;
  par.epsilon = p.epsilon;
  par.dt_inner = p.epsilon;
  par.n_inner = std::max(cfg.get_int("integrator.n_inner", 2), 2);
  par.cfl_C = p.cfl_C;
  const double h = (g.dim == 2) ? std::min(g.dx(), g.dy()) : g.dx();
  par.dt_outer = cfg.get_double("integrator.dt_outer", p.cfl_C * h * h);
  par.order = cfg.get_int("integrator.order", 1);
  if (par.order < 1 || par.order > 4)
    throw ConfigError("integrator.order must be 1 (PFE) or 2..4 (PRK)");
  if (par.order > 1) par.tableau = prk_tableau(par.order);
  try {
    par.validate();
  } catch (const IntegrationError& e) {
    throw ConfigError(std::string("integrator.dt_outer: ") + e.what());
  }
  return par;
}

void write_manifest(const Config& cfg, const std::string& out_dir) {
  cfg.write_file(out_dir + "/manifest.txt");
}

void print_table(const ConvergenceTable& t, const char* h_name) {
  std::printf("%12s %14s %14s %14s %8s %8s %8s %s\n", h_name, "err_l1",
              "err_l2", "err_linf", "p_l1", "p_l2", "p_linf", "plateau");
  for (const auto& r : t.rows)
    std::printf("%12.6g %14.6e %14.6e %14.6e %8.3f %8.3f %8.3f %d\n", r.h,
                r.error.l1, r.error.l2, r.error.linf, r.order.l1, r.order.l2,
                r.order.linf, r.plateau ? 1 : 0);
}

int cmd_solve(const Config& cfg, const std::string& out_dir) {
  require_known(cfg, {});
  const Problem p = load_problem(cfg);
  const Grid g = load_grid(cfg, p);
  const SchemeSpec scheme = load_scheme(cfg);
  const ProjectiveParams par = load_params(cfg, p, g);
  const SnapshotResult res = snapshot_run(p, g, scheme, par, out_dir);
  write_manifest(cfg, out_dir);
  std::printf("solve: %s, %ld cells, %ld outer steps, t = %.17g\n",
              p.name.c_str(), g.n_cells(), res.stats.outer_steps, res.stats.t);
  for (const auto& f : res.files) std::printf("  wrote %s\n", f.c_str());
  return 0;
}

int cmd_converge_space(const Config& cfg, const std::string& out_dir,
                       int threads) {
  require_known(cfg, {"converge.sizes", "converge.dt_outer", "converge.t_end"});
  const Problem p = load_problem(cfg);
  if (!p.exact)
    throw ConfigError("problem.name: '" + p.name +
                      "' has no exact solution for a spatial study");
  const SchemeSpec scheme = load_scheme(cfg);
  const std::vector<int> sizes = int_list(cfg, "converge.sizes", "32,64,128,256");
  const double dt = cfg.get_double("converge.dt_outer", 1e-7);
  const double t_end = cfg.get_double("converge.t_end", p.t_end);
  const ConvergenceTable t =
      spatial_convergence(p, scheme, sizes, dt, p.epsilon, t_end,
                          cfg.get_int("integrator.n_inner", 2), threads);
  t.write_csv(out_dir + "/convergence_space.csv");
  write_manifest(cfg, out_dir);
  print_table(t, "dx");
  return 0;
}

int cmd_converge_time(const Config& cfg, const std::string& out_dir,
                      int threads) {
  require_known(cfg, {"converge.nx", "converge.base_dt", "converge.levels",
                      "converge.ladder", "converge.t_end"});
  const Problem p = load_problem(cfg);
  const SchemeSpec scheme = load_scheme(cfg);
  double base_dt = cfg.get_double("converge.base_dt", 0.0);
  int levels = cfg.get_int("converge.levels", 4);
  if (cfg.has("converge.ladder")) {
    const std::vector<double> ladder = double_list(cfg, "converge.ladder", "");
    if (ladder.size() < 2)
      throw ConfigError("converge.ladder needs at least two entries");
    for (std::size_t j = 1; j < ladder.size(); ++j)
      if (std::abs(ladder[j] / ladder[j - 1] - 0.5) > 1e-12)
        throw ConfigError("converge.ladder: entries must halve successively");
    base_dt = ladder.front();
    levels = static_cast<int>(ladder.size()) - 1;
  }
  if (!(base_dt > 0.0))
    throw ConfigError("missing config key 'converge.base_dt' (or a ladder)");
  const int nx = cfg.get_int("converge.nx", p.recommended_nx());
  const double t_end = cfg.get_double("converge.t_end", p.t_end);
  ConvergenceTable t;
  try {
    t = temporal_convergence(p, scheme, nx, base_dt, levels, p.epsilon,
                             cfg.get_int("integrator.order", 3), t_end,
                             cfg.get_int("integrator.n_inner", 2), threads);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("converge.base_dt: ") + e.what());
  }
  t.write_csv(out_dir + "/convergence_time.csv");
  write_manifest(cfg, out_dir);
  print_table(t, "dt");
  return 0;
}

int cmd_spectrum(const Config& cfg, const std::string& out_dir) {
  require_known(cfg, {"spectrum.mode", "spectrum.a", "spectrum.b",
                      "spectrum.linearization_u"});
  const Problem p = load_problem(cfg, "linear_diffusion");
  const SchemeSpec scheme = load_scheme(cfg);
  const int nx = cfg.get_int("grid.nx", 32);
  const Grid g = make_grid_1d(nx, p.x_lo, p.x_hi);
  const std::string mode = cfg.get_string("spectrum.mode", "analytic");

  SpectrumReport rep;
  if (mode == "analytic") {
    // Linearize the fluxes at a reference state (box midpoint by default).
    const auto& [lo, hi] = p.state_box.bounds[0];
    const double ustar =
        cfg.get_double("spectrum.linearization_u", 0.5 * (lo + hi));
    const double us[1] = {ustar};
    const std::span<const double> uspan(us, 1);
    const double a =
        cfg.has("spectrum.a") ? cfg.get_double("spectrum.a")
                              : diagonal_derivative(p.flux_x, uspan, 0);
    const double b = cfg.has("spectrum.b")
                         ? cfg.get_double("spectrum.b")
                         : diagonal_derivative(p.scaled_diffusion(), uspan, 0);
    const int horder =
        (scheme.hyperbolic == HyperbolicScheme::Upwind1)
            ? 1
            : (scheme.hyperbolic == HyperbolicScheme::Upwind4 ? 4 : 3);
    rep = analytic_spectrum(nx, g.dx(), p.lambda, p.theta, p.mu, p.epsilon,
                            horder, scheme.parabolic_order, a, b);
  } else if (mode == "numerical") {
    const KineticModel m = p.build_model();
    const KineticField f = init_kinetic(m, g, p.u0);
    rep = numerical_spectrum(m, g, scheme, p.boundary, f);
  } else {
    throw ConfigError("spectrum.mode must be analytic or numerical");
  }

  CsvWriter w(out_dir + "/spectrum.csv", {"re", "im", "class"});
  for (std::size_t n = 0; n < rep.eigenvalues.size(); ++n)
    w.row({g17(rep.eigenvalues[n].real()), g17(rep.eigenvalues[n].imag()),
           rep.is_dominant[n] ? "dominant" : "fast"});
  write_manifest(cfg, out_dir);
  std::printf(
      "spectrum: %zu eigenvalues, fast cluster center %.6g radius bound %.6g "
      "(fitted C %.6g), within bound: %s\n",
      rep.eigenvalues.size(), rep.fast_cluster_center,
      rep.fast_cluster_radius_bound, rep.fitted_C,
      rep.within_bound ? "yes" : "no");
  return 0;
}

int cmd_region(const Config& cfg, const std::string& out_dir) {
  require_known(cfg, {"region.ratio", "region.res_x", "region.res_y",
                      "region.window"});
  const double ratio = cfg.get_double("region.ratio", 10.0);
  const int K = std::max(cfg.get_int("integrator.n_inner", 2), 2);
  const int order = cfg.get_int("integrator.order", 1);
  ButcherTableau tab;
  if (order > 1) tab = prk_tableau(order);
  const int res_x = cfg.get_int("region.res_x", 512);
  const int res_y = cfg.get_int("region.res_y", 0);
  std::array<double, 4> window = {-2.0, 2.0, -2.0, 2.0};
  if (cfg.has("region.window")) {
    const auto v = double_list(cfg, "region.window", "");
    if (v.size() != 4)
      throw ConfigError("region.window needs 4 comma-separated numbers");
    std::copy(v.begin(), v.end(), window.begin());
  }
  const StabilityRaster r = stability_region(
      ratio, K, order > 1 ? &tab : nullptr, res_x, res_y, window);

  CsvWriter w(out_dir + "/region.csv", {"re", "im", "stable"});
  for (int iy = 0; iy < r.res_y; ++iy)
    for (int ix = 0; ix < r.res_x; ++ix) {
      const cplx tau = r.point(ix, iy);
      w.row({tau.real(), tau.imag(), r.at(ix, iy) ? 1.0 : 0.0});
    }
  write_manifest(cfg, out_dir);
  std::printf("region: ratio %.6g, K %d, order %d, %d connected components\n",
              ratio, K, order, connected_components(r));
  return 0;
}

int cmd_bench(const Config& cfg, const std::string& out_dir) {
  require_known(cfg, {"bench.eps_list", "bench.t_end", "bench.direct_budget",
                      "bench.imex"});
  const Problem p = load_problem(cfg, "viscous_lwr");
  const SchemeSpec scheme = load_scheme(cfg);
  const std::vector<double> eps_list =
      double_list(cfg, "bench.eps_list", "1e-5,1e-7");
  const double t_end = cfg.get_double("bench.t_end", 0.01);
  const long budget =
      static_cast<long>(cfg.get_double("bench.direct_budget", 1e8));
  const int K = std::max(cfg.get_int("integrator.n_inner", 2), 2);

  CsvWriter w(out_dir + "/bench.csv",
              {"eps", "dt_outer", "cpu_direct", "cpu_pi", "factor_measured",
               "factor_theoretical", "direct_extrapolated"});
  const bool with_imex = cfg.get_bool("bench.imex", false);
  std::vector<ImexRow> imex_rows;
  for (double eps : eps_list) {
    Problem q = p;
    q.epsilon = eps;
    const double h = q.dx;
    const double dt = cfg.get_double("integrator.dt_outer", q.cfl_C * h * h);
    const SpeedupRow row = speedup_bench(q, scheme, eps, dt, t_end, K, budget);
    w.row({row.epsilon, row.dt_outer, row.cpu_direct, row.cpu_pi,
           row.factor_measured, row.factor_theoretical,
           row.direct_extrapolated ? 1.0 : 0.0});
    std::printf(
        "bench eps=%.3g: direct %.4g s%s, pi %.4g s, factor %.4g "
        "(theoretical %.6g)\n",
        eps, row.cpu_direct, row.direct_extrapolated ? " (estimated)" : "",
        row.cpu_pi, row.factor_measured, row.factor_theoretical);
    if (with_imex) imex_rows.push_back(imex_comparison(q, scheme, eps, dt, t_end, K));
  }
  if (with_imex) {
    CsvWriter wi(out_dir + "/imex.csv",
                 {"eps", "dt_outer", "cpu_pi", "cpu_imex", "l1_distance"});
    for (const auto& r : imex_rows)
      wi.row({r.epsilon, r.dt_outer, r.cpu_pi, r.cpu_imex, r.l1_distance});
  }
  write_manifest(cfg, out_dir);
  return 0;
}

int cmd_catalog(const Config& cfg) {
  require_known(cfg, {});
  std::vector<std::string> names;
  if (cfg.has("problem.name"))
    names.push_back(cfg.get_string("problem.name"));
  else
    names = catalog_names();
  for (const auto& name : names) {
    const Problem p = catalog(name);
    std::printf("%s:\n", p.name.c_str());
    std::printf("  dim = %d, components = %d, boundary = %s\n", p.dim,
                p.n_components, to_string(p.boundary));
    if (p.dim == 2)
      std::printf("  domain = [%.17g, %.17g] x [%.17g, %.17g]\n", p.x_lo,
                  p.x_hi, p.y_lo, p.y_hi);
    else
      std::printf("  domain = [%.17g, %.17g]\n", p.x_lo, p.x_hi);
    std::printf("  dx = %.17g, t_end = %.17g, xi = %.17g\n", p.dx, p.t_end,
                p.xi);
    std::printf("  model = %s, lambda = %.17g, theta = %.17g, mu = %.17g\n",
                to_string(p.model_kind),
                p.dim == 2 ? p.lambda1 : p.lambda, p.theta, p.mu);
    std::printf("  epsilon = %.17g, cfl_C = %.17g, exact solution: %s\n",
                p.epsilon, p.cfl_C, p.exact ? "yes" : "no");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"projective integration solver for degenerate advection-diffusion"};
  app.require_subcommand(1);
  std::string config_path, out_dir = "out";
  int threads = 1;
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "config file (flat key = value)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads, "threads for ladder experiments");
  app.add_option("--set", overrides, "override config entries, key=value");

  auto* solve = app.add_subcommand("solve", "run a catalog problem, dump CSVs");
  auto* cspace = app.add_subcommand("converge-space", "spatial refinement study");
  auto* ctime = app.add_subcommand("converge-time", "temporal Richardson study");
  auto* spectrum = app.add_subcommand("spectrum", "eigenvalue spectrum dump");
  auto* region = app.add_subcommand("region", "stability region raster");
  auto* bench = app.add_subcommand("bench", "projective vs direct timing");
  auto* cat = app.add_subcommand("catalog", "list the problem catalog");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    pibgk::Config cfg;
    if (!config_path.empty()) cfg = pibgk::Config::parse_file(config_path);
    for (const auto& kv : overrides) cfg.set_pair(kv);
    if (threads < 1)
      throw pibgk::ConfigError("--threads must be at least 1");
    if (!cat->parsed()) std::filesystem::create_directories(out_dir);

    if (solve->parsed()) return cmd_solve(cfg, out_dir);
    if (cspace->parsed()) return cmd_converge_space(cfg, out_dir, threads);
    if (ctime->parsed()) return cmd_converge_time(cfg, out_dir, threads);
    if (spectrum->parsed()) return cmd_spectrum(cfg, out_dir);
    if (region->parsed()) return cmd_region(cfg, out_dir);
    if (bench->parsed()) return cmd_bench(cfg, out_dir);
    if (cat->parsed()) return cmd_catalog(cfg);
    return 1;
  } catch (const pibgk::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 2;
  }
}
