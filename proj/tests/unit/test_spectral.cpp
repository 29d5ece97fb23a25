#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "pibgk/spectral.hpp"

using namespace pibgk;
using Catch::Approx;

namespace {

constexpr double pi = 3.14159265358979323846;

}  // namespace

TEST_CASE("fourier symbols at special angles") {
  const double dx = 0.02, lambda = 1.5, theta = 1.2, mu = 0.6, eps = 0.04;

  const auto z = fourier_symbols(0.0, dx, lambda, theta, mu, eps);
  CHECK(z.alpha == Approx(0.0).margin(1e-15));
  CHECK(z.beta == Approx(0.0).margin(1e-15));
  CHECK(z.xi == Approx(0.0).margin(1e-15));
  CHECK(z.gamma == Approx(0.0).margin(1e-14));

  const auto p = fourier_symbols(pi, dx, lambda, theta, mu, eps);
  CHECK(p.alpha == Approx(-8.0 * lambda / (6.0 * dx)));
  CHECK(p.beta == Approx(0.0).margin(1e-12));
  CHECK(p.gamma == Approx(0.0).margin(1e-10));

  // Order 4 drops the dissipative real part, keeps the same phase.
  const double zeta = 0.7;
  const auto s3 = fourier_symbols(zeta, dx, lambda, theta, mu, eps, 3, 4);
  const auto s4 = fourier_symbols(zeta, dx, lambda, theta, mu, eps, 4, 4);
  CHECK(s4.alpha == 0.0);
  CHECK(s4.beta == Approx(s3.beta));
  CHECK(s3.alpha < 0.0);

  const auto s1 = fourier_symbols(zeta, dx, lambda, theta, mu, eps, 1, 2);
  CHECK(s1.alpha == Approx(-lambda * (1.0 - std::cos(zeta)) / dx));
  CHECK(s1.beta == Approx(-lambda * std::sin(zeta) / dx));
  const double w = mu / std::sqrt(2.0) + theta / std::sqrt(eps);
  CHECK(s1.gamma == Approx(w * std::sin(zeta) / dx));

  CHECK_THROWS_AS(fourier_symbols(zeta, 0.0, lambda, theta, mu, eps),
                  std::invalid_argument);
  CHECK_THROWS_AS(fourier_symbols(zeta, dx, lambda, theta, mu, eps, 2, 4),
                  std::invalid_argument);
}

TEST_CASE("maxwellian weights sum to one") {
  const auto c = maxwellian_weights(2.0, std::sqrt(2.0), 0.7, 0.9);
  CHECK(c[0] + c[1] + c[2] + c[3] == Approx(1.0));
  CHECK(c[2] == Approx(c[3]));
}

TEST_CASE("secular roots coincide with the dense spectrum") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double zeta = 0.05 + 0.9 * pi * dist(rng);
    const double eps = std::pow(10.0, -1.0 - 4.0 * dist(rng));
    const double lambda = 2.0, theta = std::sqrt(2.0), mu = 0.3, dx = 1.0 / 32;
    const auto s = fourier_symbols(zeta, dx, lambda, theta, mu, eps);
    const auto m = analytic_mode_spectrum(s, lambda, theta, eps);

    Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(
        bgk_symbol_matrix(s, lambda, theta, eps));
    REQUIRE(es.info() == Eigen::Success);
    // Greedy matching of the two 4-element sets.
    std::vector<cplx> dense(es.eigenvalues().data(), es.eigenvalues().data() + 4);
    for (const cplx& z : m.k_eigenvalues) {
      auto best = std::min_element(dense.begin(), dense.end(),
                                   [&](const cplx& a, const cplx& b) {
                                     return std::abs(a - z) < std::abs(b - z);
                                   });
      CHECK(std::abs(*best - z) <= 1e-10 * (1.0 + std::abs(z)));
      dense.erase(best);
    }
  }
}

TEST_CASE("zero mode has a vanishing dominant eigenvalue") {
  const double eps = 1e-4;
  const auto s = fourier_symbols(0.0, 1.0 / 32, 2.0, std::sqrt(2.0), 0.0, eps);
  const auto m = analytic_mode_spectrum(s, 2.0, std::sqrt(2.0), eps);
  CHECK(std::abs(m.dominant) <= 1e-6);
  // The remaining three eigenvalues sit at -1/eps.
  int fast = 0;
  for (const cplx& z : m.k_eigenvalues)
    if (std::abs(z + 1.0 / eps) <= 1e-6 / eps) ++fast;
  CHECK(fast == 3);
}

TEST_CASE("numerical spectrum matches the analytic union") {
  const int nx = 32;
  const Grid g = make_grid_1d(nx, 0.0, 1.0);
  const double lambda = 2.0, theta = std::sqrt(2.0), mu = 0.0, eps = 1e-4;
  const auto model =
      build_drm1_1d(lambda, theta, mu, eps, identity_map(), identity_map());
  SchemeSpec spec;
  const KineticField zero(g, 4, 1);
  const auto num =
      numerical_spectrum(model, g, spec, BoundaryRule::Periodic, zero);
  const auto ana = analytic_spectrum(nx, g.dx(), lambda, theta, mu, eps);
  REQUIRE(num.eigenvalues.size() == ana.eigenvalues.size());

  for (const cplx& z : num.eigenvalues) {
    double best = std::numeric_limits<double>::infinity();
    for (const cplx& w : ana.eigenvalues) best = std::min(best, std::abs(w - z));
    CHECK(best <= 1e-6 * (1.0 + std::abs(z)));
  }
}

TEST_CASE("numerical spectrum is base-state independent for linear models") {
  const int nx = 8;
  const Grid g = make_grid_1d(nx, 0.0, 1.0);
  const double eps = 1.0;
  const auto model =
      build_drm1_1d(2.0, std::sqrt(2.0), 0.0, eps, identity_map(), identity_map());
  SchemeSpec spec;
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> dist(-0.2, 0.2);

  std::vector<std::vector<cplx>> spectra;
  for (int run = 0; run < 2; ++run) {
    KineticField base(g, 4, 1);
    for (double& v : base.data) v = dist(rng);
    auto rep = numerical_spectrum(model, g, spec, BoundaryRule::Periodic, base);
    std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end(),
              [](const cplx& a, const cplx& b) {
                return a.real() != b.real() ? a.real() < b.real()
                                            : a.imag() < b.imag();
              });
    spectra.push_back(rep.eigenvalues);
  }
  for (std::size_t n = 0; n < spectra[0].size(); ++n) {
    double best = std::numeric_limits<double>::infinity();
    for (const cplx& w : spectra[1])
      best = std::min(best, std::abs(w - spectra[0][n]));
    CHECK(best <= 1e-8 * (1.0 + std::abs(spectra[0][n])));
  }

  const Grid big = make_grid_1d(256, 0.0, 1.0);
  CHECK_THROWS_AS(numerical_spectrum(model, big, spec, BoundaryRule::Periodic,
                                     KineticField(big, 4, 1)),
                  std::invalid_argument);
}

TEST_CASE("fast cluster imaginary extent scales like 1/sqrt(eps)") {
  const int nx = 32;
  const double dx = 1.0 / nx, lambda = 2.0, theta = std::sqrt(2.0), mu = 0.0;
  double prev = 0.0;
  for (double eps : {1e-4, 5e-5, 2.5e-5}) {
    const auto rep = analytic_spectrum(nx, dx, lambda, theta, mu, eps);
    double im_max = 0.0;
    for (std::size_t n = 0; n < rep.eigenvalues.size(); ++n)
      if (!rep.is_dominant[n])
        im_max = std::max(im_max, std::abs(rep.eigenvalues[n].imag()));
    if (prev > 0.0)
      CHECK(im_max / prev == Approx(std::sqrt(2.0)).epsilon(0.1));
    prev = im_max;
    CHECK(rep.within_bound);
    CHECK(rep.fitted_C > 0.0);
  }
}

TEST_CASE("spectral gap grows by a decade per epsilon decade") {
  const int nx = 32;
  const double dx = 1.0 / nx, lambda = 2.0, theta = std::sqrt(2.0), mu = 0.0;
  double prev_gap = 0.0;
  for (double eps : {1e-5, 1e-6, 1e-7}) {
    const auto rep = analytic_spectrum(nx, dx, lambda, theta, mu, eps);
    double dom_min = 0.0, fast_max = -std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < rep.eigenvalues.size(); ++n) {
      if (rep.is_dominant[n])
        dom_min = std::min(dom_min, rep.eigenvalues[n].real());
      else
        fast_max = std::max(fast_max, rep.eigenvalues[n].real());
    }
    const double gap = dom_min - fast_max;
    CHECK(gap > 0.0);
    if (prev_gap > 0.0) CHECK(gap / prev_gap == Approx(10.0).epsilon(0.2));
    prev_gap = gap;
  }
}

TEST_CASE("asymptotic dominant eigenvalue has quadratic remainder") {
  const double dx = 1.0 / 32, lambda = 2.0, theta = std::sqrt(2.0), mu = 0.0;
  const double zeta = 2.0 * pi * 2 / 32;
  double prev_rem = 0.0;
  for (double eps : {1e-5, 5e-6, 2.5e-6}) {
    const auto s = fourier_symbols(zeta, dx, lambda, theta, mu, eps);
    const auto m = analytic_mode_spectrum(s, lambda, theta, eps);
    // O(eps^2) holds for the amplification eigenvalue 1 + eps k.
    const double rem = eps * std::abs(m.dominant - m.asymptotic_k);
    if (prev_rem > 0.0) {
      const double ratio = prev_rem / rem;
      CHECK(ratio >= 3.0);
      CHECK(ratio <= 5.0);
    }
    prev_rem = rem;
  }
}

TEST_CASE("amplification endpoints") {
  CHECK(std::abs(pfe_amplification(1.0, 10.0, 1.0, 2) - 1.0) <= 1e-14);
  CHECK(std::abs(pfe_amplification(0.0, 10.0, 1.0, 2)) <= 1e-14);
  for (int order : {2, 3, 4}) {
    const auto tab = prk_tableau(order);
    CHECK(std::abs(prk_amplification(1.0, tab, 10.0, 1.0, 2) - 1.0) <= 1e-13);
    CHECK(std::abs(prk_amplification(0.0, tab, 10.0, 1.0, 2)) <= 1e-13);
  }
  CHECK_THROWS_AS(pfe_amplification(1.0, 10.0, 0.0, 2), std::invalid_argument);
}

TEST_CASE("pfe is stable on the printed disks") {
  const double ratio = 10.0;
  const int K = 2;
  const auto [d1, d2] = pfe_stability_disks(ratio, K);
  CHECK(d1.first == Approx(0.9));
  CHECK(d1.second == Approx(0.1));
  CHECK(d2.first == Approx(0.0));
  CHECK(d2.second == Approx(std::pow(0.1, 0.5)));

  std::mt19937 rng(17);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  const auto rk3 = rk3_ssp();
  const auto rk4 = rk4_classical();
  for (int n = 0; n < 10000; ++n) {
    const bool first = (n % 2) == 0;
    const double c = first ? d1.first : d2.first;
    const double r = first ? d1.second : d2.second;
    const double rho = r * std::sqrt(dist(rng));
    const double phi = 2.0 * pi * dist(rng);
    const cplx tau(c + rho * std::cos(phi), rho * std::sin(phi));
    CHECK(std::abs(pfe_amplification(tau, ratio, 1.0, K)) <= 1.0 + 1e-12);
    // The projective Runge-Kutta regions contain the forward Euler disks.
    CHECK(std::abs(prk_amplification(tau, rk3, ratio, 1.0, K)) <= 1.0 + 1e-12);
    CHECK(std::abs(prk_amplification(tau, rk4, ratio, 1.0, K)) <= 1.0 + 1e-12);
  }
}

TEST_CASE("stability raster basics") {
  CHECK_THROWS_AS(stability_region(10.0, 2, nullptr, 32, 32),
                  std::invalid_argument);

  const auto r = stability_region(10.0, 2, nullptr, 128, 128);
  CHECK(r.res_x == 128);
  // tau = 1 - dt/Dt is the center of the slow disk; it must be stable, and a
  // point far outside both disks must not be.
  auto probe = [&](double re, double im) {
    const int ix = static_cast<int>((re - r.re_lo) / (r.re_hi - r.re_lo) * r.res_x);
    const int iy = static_cast<int>((im - r.im_lo) / (r.im_hi - r.im_lo) * r.res_y);
    return r.at(ix, iy);
  };
  CHECK(probe(0.9, 0.0));
  CHECK(probe(0.0, 0.0));
  CHECK_FALSE(probe(-1.5, 1.5));
  CHECK(connected_components(r) >= 1);

  // Both printed disks lie inside the computed region at ratio 10, K = 2.
  const auto disks = pfe_stability_disks(10.0, 2);
  for (int iy = 0; iy < r.res_y; ++iy)
    for (int ix = 0; ix < r.res_x; ++ix) {
      const cplx t = r.point(ix, iy);
      const bool in_d1 = std::abs(t - cplx(disks.first.first, 0.0)) <=
                         disks.first.second * (1.0 - 1e-9);
      const bool in_d2 = std::abs(t - cplx(disks.second.first, 0.0)) <=
                         disks.second.second * (1.0 - 1e-9);
      if (in_d1 || in_d2) CHECK(r.at(ix, iy));
    }
}
