#include <cmath>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "pibgk/harness.hpp"

using namespace pibgk;
using Catch::Approx;

namespace {

ProjectiveParams quick_params(double eps, double dt_outer) {
  ProjectiveParams p;
  p.epsilon = eps;
  p.dt_inner = eps;
  p.n_inner = 2;
  p.dt_outer = dt_outer;
  p.validate();
  return p;
}

}  // namespace

TEST_CASE("field norms") {
  const Grid g = make_grid_1d(8, 0.0, 2.0);  // dx = 0.25
  MacroField e(g, 1);
  e.at(0, 0) = 3.0;
  e.at(0, 5) = -4.0;
  const auto n = field_norms(e, g);
  CHECK(n.l1 == Approx(0.25 * 7.0));
  CHECK(n.l2 == Approx(std::sqrt(0.25 * 25.0)));
  CHECK(n.linf == Approx(4.0));

  MacroField b(g, 1);
  b.at(0, 0) = 1.0;
  const auto d = difference_norms(e, b, g);
  CHECK(d.linf == Approx(4.0));
  CHECK(d.l1 == Approx(0.25 * 6.0));
}

TEST_CASE("exact cell averages at t = 0 match the initial data") {
  const auto p = catalog("linear_diffusion");
  const Grid g = make_grid_1d(16, p.x_lo, p.x_hi);
  const auto ref = exact_cell_averages(p, g, 0.0);
  MacroField init(g, 1);
  cell_average(p.u0, g, CellAverage::Gauss3, init);
  for (int i = 0; i < g.nx; ++i)
    CHECK(ref.at(0, i) == Approx(init.at(0, i)).margin(1e-14));

  CHECK_THROWS_AS(exact_cell_averages(catalog("viscous_lwr"), g, 0.0),
                  std::invalid_argument);
}

TEST_CASE("projective runs are deterministic") {
  const auto p = catalog("linear_diffusion");
  const Grid g = make_grid_1d(16, p.x_lo, p.x_hi);
  SchemeSpec scheme;
  const auto par = quick_params(1e-6, 1e-4);
  const auto r1 = run_projective(p, g, scheme, par, 5e-4);
  const auto r2 = run_projective(p, g, scheme, par, 5e-4);
  CHECK(r1.u.data == r2.u.data);
  CHECK(r1.stats.outer_steps == r2.stats.outer_steps);
  CHECK(r1.stats.outer_steps == 5);
}

TEST_CASE("spatial convergence table structure and threading") {
  const auto p = catalog("linear_diffusion");
  SchemeSpec scheme;
  const std::vector<int> sizes{16, 32};
  const auto t1 = spatial_convergence(p, scheme, sizes, 1e-5, 1e-6, 1e-3, 2, 1);
  REQUIRE(t1.rows.size() == 2);
  CHECK(t1.rows[0].h == Approx(1.0 / 16));
  CHECK(t1.rows[1].h == Approx(1.0 / 32));
  CHECK(t1.rows[0].error.l1 > 0.0);
  CHECK(t1.rows[1].error.l1 < t1.rows[0].error.l1);
  CHECK(std::isnan(t1.rows[0].order.l1));
  CHECK(std::isfinite(t1.rows[1].order.l1));
  CHECK(t1.plateau_threshold == Approx(1e-5));

  // Thread count does not change the results.
  const auto t2 = spatial_convergence(p, scheme, sizes, 1e-5, 1e-6, 1e-3, 2, 2);
  for (std::size_t r = 0; r < sizes.size(); ++r) {
    CHECK(t2.rows[r].error.l1 == t1.rows[r].error.l1);
    CHECK(t2.rows[r].error.linf == t1.rows[r].error.linf);
  }

  const std::string path = "spatial_test.csv";
  t1.write_csv(path);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 3);  // header + 2 rows
  in.close();
  std::filesystem::remove(path);
}

TEST_CASE("temporal convergence ladder") {
  const auto p = catalog("linear_diffusion");
  SchemeSpec scheme;
  // Descending below (K+1) inner steps is rejected up front.
  CHECK_THROWS_AS(
      temporal_convergence(p, scheme, 16, 8e-6, 4, 1e-6, 1, 1e-3),
      std::invalid_argument);

  const auto t = temporal_convergence(p, scheme, 16, 4e-3, 2, 1e-8, 1, 0.02);
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0].h == Approx(4e-3));
  CHECK(t.rows[1].h == Approx(2e-3));
  CHECK(t.rows[0].error.l1 > 0.0);
  CHECK(t.rows[1].error.l1 > 0.0);
}

TEST_CASE("richardson extrapolant beats both inputs") {
  const auto p = catalog("linear_diffusion");
  const Grid g = make_grid_1d(16, p.x_lo, p.x_hi);
  SchemeSpec scheme;
  const double T = 0.04, dt = 2e-3, eps = 1e-9;
  const auto u1 = run_projective(p, g, scheme, quick_params(eps, dt), T).u;
  const auto u2 = run_projective(p, g, scheme, quick_params(eps, dt / 2), T).u;
  const auto u8 = run_projective(p, g, scheme, quick_params(eps, dt / 8), T).u;

  // First-order extrapolant u* = 2 u_{dt/2} - u_dt.
  MacroField ustar = u2;
  for (std::size_t n = 0; n < ustar.data.size(); ++n)
    ustar.data[n] = 2.0 * u2.data[n] - u1.data[n];

  const double e_star = difference_norms(ustar, u8, g).l1;
  const double e_1 = difference_norms(u1, u8, g).l1;
  const double e_2 = difference_norms(u2, u8, g).l1;
  CHECK(e_star < e_1);
  CHECK(e_star < e_2);
  // First order against the dt/8 reference: e_dt ~ C (dt - dt/8).
  CHECK(e_1 / e_2 == Approx(7.0 / 3.0).margin(0.5));
}

TEST_CASE("speedup bench arithmetic") {
  auto p = catalog("linear_diffusion");
  p.dx = 1.0 / 16;
  SchemeSpec scheme;
  const double eps = 1e-4, dt_outer = 2e-3, T = 0.01;
  const auto row = speedup_bench(p, scheme, eps, dt_outer, T);
  CHECK(row.factor_theoretical == Approx(dt_outer / (3.0 * eps)));
  CHECK(row.direct_steps == 100);
  CHECK_FALSE(row.direct_extrapolated);
  CHECK(row.cpu_direct > 0.0);
  CHECK(row.cpu_pi > 0.0);
  CHECK(row.factor_measured > 0.0);
}

TEST_CASE("imex comparison runs and stays close") {
  auto p = catalog("linear_diffusion");
  p.dx = 1.0 / 16;
  SchemeSpec scheme;
  const auto row = imex_comparison(p, scheme, 1e-5, 5e-4, 5e-3);
  CHECK(row.cpu_pi > 0.0);
  CHECK(row.cpu_imex > 0.0);
  CHECK(row.l1_distance > 0.0);
  CHECK(row.l1_distance < 5.0 * row.dt_outer);
}

TEST_CASE("boundary flux drift") {
  // Steady shock: antisymmetric states, quadratic flux, zero net drift.
  const auto shock = catalog("burgers_steady_shock");
  CHECK(boundary_flux_drift(shock, 0.05)[0] == Approx(0.0).margin(1e-18));

  Problem p;
  p.flux_x = identity_map();
  p.diffusion = zero_map();
  p.u0 = [](double x, double, std::span<double> u) {
    u[0] = (x < 0.5) ? 2.0 : 0.5;
  };
  p.boundary = BoundaryRule::ZeroGradient;
  CHECK(boundary_flux_drift(p, 0.2)[0] == Approx(0.2 * 1.5));
}

TEST_CASE("snapshot run writes one csv per output time") {
  auto p = catalog("linear_diffusion");
  p.output_times = {5e-4, 1e-3};
  const Grid g = make_grid_1d(16, p.x_lo, p.x_hi);
  SchemeSpec scheme;
  const std::string dir = "snap_test_out";
  std::filesystem::create_directories(dir);
  const auto res = snapshot_run(p, g, scheme, quick_params(1e-6, 1e-4), dir);
  REQUIRE(res.files.size() == 2);
  for (const auto& f : res.files) CHECK(std::filesystem::exists(f));
  CHECK(res.stats.t == Approx(1e-3));
  CHECK(res.u_final.data.size() == 16);

  // Snapshot values are written back with full precision.
  std::ifstream in(res.files[1]);
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  CHECK(header == "x,u1");
  const auto comma = first.find(',');
  CHECK(std::stod(first.substr(comma + 1)) == res.u_final.at(0, 0));
  in.close();
  std::filesystem::remove_all(dir);
}

TEST_CASE("g17 round-trips doubles") {
  for (double v : {0.1, 1.0 / 3.0, 5.125e-5, -2.7182818284590452e10, 0.0})
    CHECK(std::stod(g17(v)) == v);
}
