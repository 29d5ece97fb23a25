#include <array>
#include <cmath>
#include <random>
#include <span>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "pibgk/model.hpp"

using namespace pibgk;
using Catch::Approx;

namespace {

const StateMap id_map = identity_map();
const StateMap null_map = zero_map();

// Nonlinear test fluxes used by the moment-identity checks.
const StateMap nl_A = scalar_map([](double u) { return 0.5 * u * u + 0.2 * std::sin(u); });
const StateMap nl_A2 = scalar_map([](double u) { return 0.1 * u * u * u - 0.3 * u; });
const StateMap nl_B = scalar_map([](double u) { return 0.3 * u * u; });

double eval_scalar(const StateMap& F, double u) {
  double out = 0.0;
  F(std::span<const double>(&u, 1), std::span<double>(&out, 1));
  return out;
}

std::vector<KineticModel> all_models(double eps) {
  return {build_drm1_1d(2.0, 1.4, 0.7, eps, nl_A, nl_B),
          build_drm2_1d(-1.5, 2.5, 1.4, 0.7, eps, nl_A, nl_B),
          build_ovm_1d(2.0, 1.4, eps, nl_A, nl_B),
          build_drm1_2d(2.0, 3.0, 1.4, 0.7, eps, nl_A, nl_A2, nl_B)};
}

}  // namespace

TEST_CASE("drm1 velocities") {
  const auto m = build_drm1_1d(2.0, std::sqrt(2.0), 0.0, 1e-7, id_map, id_map);
  CHECK(m.velocity(0) == Approx(-2.0));
  CHECK(m.velocity(1) == Approx(2.0));
  const double big = std::sqrt(2.0) * std::pow(10.0, 3.5);
  CHECK(m.velocity(2) == Approx(-big).epsilon(1e-12));
  CHECK(m.velocity(3) == Approx(big).epsilon(1e-12));

  const auto unit = build_drm1_1d(1.0, 1.0, 0.0, 1.0, null_map, null_map);
  CHECK(unit.velocity(0) == Approx(-1.0));
  CHECK(unit.velocity(1) == Approx(1.0));
  CHECK(unit.velocity(2) == Approx(-1.0));
  CHECK(unit.velocity(3) == Approx(1.0));

  const auto mu = build_drm1_1d(1.0, 1.0, std::sqrt(2.0), 0.25, id_map, id_map);
  CHECK(mu.velocity(2) == Approx(-3.0));  // mu/sqrt2 + theta/sqrt(eps) = 1 + 2
}

TEST_CASE("builder parameter validation") {
  CHECK_THROWS_AS(build_drm1_1d(0.0, 1.0, 0.0, 0.1, id_map, id_map), ModelError);
  CHECK_THROWS_AS(build_drm1_1d(1.0, -1.0, 0.0, 0.1, id_map, id_map), ModelError);
  CHECK_THROWS_AS(build_drm1_1d(1.0, 1.0, -0.5, 0.1, id_map, id_map), ModelError);
  CHECK_THROWS_AS(build_drm1_1d(1.0, 1.0, 0.0, 0.0, id_map, id_map), ModelError);
  CHECK_THROWS_AS(build_drm1_1d(1.0, 1.0, 0.0, 1.5, id_map, id_map), ModelError);
  CHECK_THROWS_AS(build_drm2_1d(1.0, 1.0, 1.0, 0.0, 0.1, id_map, id_map), ModelError);
  CHECK_THROWS_AS(build_ovm_1d(1.0, 0.0, 0.1, id_map, id_map), ModelError);
  // Custom sigma basis must be orthonormal and zero-sum.
  std::array<std::array<double, 3>, 2> bad{{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}}};
  CHECK_THROWS_AS(
      build_drm1_2d(1.0, 1.0, 1.0, 0.0, 0.1, id_map, id_map, id_map, 1, bad),
      ModelError);
}

TEST_CASE("drm1 maxwellian example") {
  const auto m = build_drm1_1d(2.0, std::sqrt(2.0), 0.0, 1e-7, id_map, id_map);
  const double u = 1.0;
  std::array<double, 4> M{};
  m.maxwellian(std::span<const double>(&u, 1), M);
  CHECK(M[0] == Approx(0.0).margin(1e-15));
  CHECK(M[1] == Approx(0.5));
  CHECK(M[2] == Approx(0.25));
  CHECK(M[3] == Approx(0.25));
}

TEST_CASE("drm2 maxwellian example") {
  const auto m = build_drm2_1d(-1.0, 1.0, 1.0, 0.0, 1e-7, id_map, null_map);
  const double u = 1.0;
  std::array<double, 4> M{};
  m.maxwellian(std::span<const double>(&u, 1), M);
  CHECK(M[0] == Approx(0.0).margin(1e-15));
  CHECK(M[1] == Approx(1.0));
  CHECK(M[2] == Approx(0.0).margin(1e-15));
  CHECK(M[3] == Approx(0.0).margin(1e-15));
}

TEST_CASE("ovm maxwellian consistent with the moment conditions") {
  // At lambda = theta = eps = 1, A = B = id, u = 1 the entries solving
  // (M1)-(M3) are (0, 0.75, 0.25): M2/M3 carry A/(2w) +- with w = 2.
  const auto m = build_ovm_1d(1.0, 1.0, 1.0, id_map, id_map);
  const double u = 1.0;
  std::array<double, 3> M{};
  m.maxwellian(std::span<const double>(&u, 1), M);
  CHECK(M[0] == Approx(0.0).margin(1e-15));
  CHECK(M[1] == Approx(0.75));
  CHECK(M[2] == Approx(0.25));
  CHECK(M[0] + M[1] + M[2] == Approx(u));
}

TEST_CASE("zero state gives zero maxwellian") {
  for (const auto& m : all_models(0.01)) {
    std::array<double, 1> u{0.0};
    std::array<double, max_velocities> M{};
    m.maxwellian(std::span<const double>(u.data(), 1),
                 std::span<double>(M.data(), m.n_velocities()));
    for (int l = 0; l < m.n_velocities(); ++l)
      CHECK(M[l] == Approx(0.0).margin(1e-15));
  }
}

TEST_CASE("moment conditions M1 M2 M3 at random states") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const double eps = 0.003;
  for (const auto& m : all_models(eps)) {
    for (int trial = 0; trial < 1000; ++trial) {
      const double u = dist(rng);
      std::array<double, max_velocities> M{}, M0{};
      m.maxwellian(std::span<const double>(&u, 1),
                   std::span<double>(M.data(), m.n_velocities()));
      m.maxwellian_at(0.0, std::span<const double>(&u, 1),
                      std::span<double>(M0.data(), m.n_velocities()));

      // (M1): sum over velocities recovers u.
      double s = 0.0;
      for (int l = 0; l < m.n_velocities(); ++l) s += M[l];
      CHECK(std::abs(s - u) <= 1e-12 * (1.0 + std::abs(u)));

      for (int d = 0; d < m.dim; ++d) {
        // (M2): velocity moment equals A_d plus the 1/sqrt(eps) cross term.
        const double A = (d == 0) ? eval_scalar(m.flux_x, u)
                                  : eval_scalar(m.flux_y, u);
        double m2 = 0.0, cross = 0.0;
        for (int l = 0; l < m.n_velocities(); ++l) {
          m2 += m.velocity(l, d) * M[l];
          cross += m.velocity_theta_part(l, d) * M0[l];
        }
        CHECK(std::abs(m2 - A - cross / std::sqrt(eps)) <=
              1e-10 * (1.0 + std::abs(m2)));

        // (M3): theta-part second moment equals delta_dj B.
        const double B = eval_scalar(m.diffusion, u);
        for (int j = 0; j < m.dim; ++j) {
          double m3 = 0.0;
          for (int l = 0; l < m.n_velocities(); ++l)
            m3 += m.velocity_theta_part(l, d) * m.velocity_theta_part(l, j) * M0[l];
          const double want = (d == j) ? B : 0.0;
          CHECK(std::abs(m3 - want) <= 1e-12 * (1.0 + std::abs(B)));
        }
      }
    }
  }
}

TEST_CASE("drm2 with symmetric lambdas reproduces drm1") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const auto m1 = build_drm1_1d(2.0, 1.4, 0.7, 0.01, nl_A, nl_B);
  const auto m2 = build_drm2_1d(-2.0, 2.0, 1.4, 0.7, 0.01, nl_A, nl_B);
  for (int trial = 0; trial < 100; ++trial) {
    const double u = dist(rng);
    std::array<double, 4> Ma{}, Mb{};
    m1.maxwellian(std::span<const double>(&u, 1), Ma);
    m2.maxwellian(std::span<const double>(&u, 1), Mb);
    for (int l = 0; l < 4; ++l)
      CHECK(std::abs(Ma[l] - Mb[l]) <= 1e-14 * (1.0 + std::abs(Ma[l])));
  }
}

TEST_CASE("check_mmf examples") {
  StateBox box;
  box.bounds = {{0.0, 1.0}};

  const auto pass = build_drm1_1d(2.0, std::sqrt(2.0), 0.0, 0.01, id_map, id_map);
  const auto rep1 = check_mmf(pass, box, 101);
  CHECK(rep1.is_mmf);
  CHECK(rep1.max_condition_value == Approx(1.0).epsilon(1e-6));

  const auto fail = build_drm1_1d(1.0, 1.0, 0.0, 0.01, id_map, id_map);
  const auto rep2 = check_mmf(fail, box, 101);
  CHECK_FALSE(rep2.is_mmf);
  CHECK(rep2.max_condition_value == Approx(2.0).epsilon(1e-6));
  REQUIRE(rep2.violating_state.has_value());

  const auto trivial = build_drm1_1d(0.3, 0.2, 0.0, 0.01, null_map, null_map);
  const auto rep3 = check_mmf(trivial, box, 11);
  CHECK(rep3.is_mmf);
  CHECK(rep3.max_condition_value == Approx(0.0).margin(1e-9));

  StateBox empty;
  CHECK_THROWS_AS(check_mmf(pass, empty, 11), ModelError);
}

TEST_CASE("check_mmf is monotone in lambda and theta") {
  StateBox box;
  box.bounds = {{-1.0, 1.0}};
  double prev = std::numeric_limits<double>::infinity();
  for (double lam : {1.0, 2.0, 4.0, 8.0}) {
    const auto m = build_drm1_1d(lam, 1.2, 0.0, 0.01, nl_A, nl_B);
    const double v = check_mmf(m, box, 41).max_condition_value;
    CHECK(v <= prev + 1e-12);
    prev = v;
  }
  prev = std::numeric_limits<double>::infinity();
  for (double th : {0.8, 1.2, 2.0, 4.0}) {
    const auto m = build_drm1_1d(4.0, th, 0.0, 0.01, nl_A, nl_B);
    const double v = check_mmf(m, box, 41).max_condition_value;
    CHECK(v <= prev + 1e-12);
    prev = v;
  }
}

TEST_CASE("compute_lambda_bounds") {
  const auto one = [](double) { return 1.0; };
  const auto zero = [](double) { return 0.0; };
  // A' = 1, B' = 1, theta^2 = 2: 1/(1 - 1/2) = 2 before widening.
  auto [lo, hi] = compute_lambda_bounds(one, one, std::sqrt(2.0), {0.0, 1.0},
                                        101, 1.0);
  CHECK(lo == Approx(2.0));
  CHECK(hi == Approx(2.0));

  auto [lo0, hi0] = compute_lambda_bounds(zero, zero, 1.0, {0.0, 1.0}, 101, 1.0);
  CHECK(lo0 == Approx(0.0).margin(1e-12));
  CHECK(hi0 == Approx(0.0).margin(1e-12));

  // LWR: A' = 1/2 - u on [0,1].
  auto [lm, lp] = compute_lambda_bounds([](double u) { return 0.5 - u; }, zero,
                                        1.0, {0.0, 1.0}, 1001, 1.0);
  CHECK(lm == Approx(-0.5));
  CHECK(lp == Approx(0.5));

  // Degenerate denominator must throw, not clamp.
  CHECK_THROWS_AS(
      compute_lambda_bounds(one, [](double) { return 2.0; }, 1.0, {0.0, 1.0}, 11),
      ModelError);

  // Default safety widening encloses the raw bounds.
  auto [wlo, whi] =
      compute_lambda_bounds(one, one, std::sqrt(2.0), {0.0, 1.0}, 101);
  CHECK(wlo < 2.0);
  CHECK(whi > 2.0);
}

TEST_CASE("project sums over velocities") {
  const auto m = build_drm1_1d(2.0, std::sqrt(2.0), 0.0, 0.01, id_map, id_map);
  const double u = 0.7;
  std::array<double, 4> M{};
  m.maxwellian(std::span<const double>(&u, 1), M);
  double got = 0.0;
  project(M, 4, std::span<double>(&got, 1));
  CHECK(got == Approx(u));

  std::array<double, 4> f{0.0, 0.0, 0.0, 0.0};
  f[2] = 3.5;
  project(f, 4, std::span<double>(&got, 1));
  CHECK(got == Approx(3.5));
}
