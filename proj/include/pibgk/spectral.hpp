#pragma once

// Spectral stability toolkit for the linearized four-velocity model:
// Fourier symbols, the BGK symbol matrix, analytic and numerical spectra,
// projective amplification factors and stability region rasters.

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "pibgk/integrate.hpp"
#include "pibgk/transport.hpp"

namespace pibgk {

using cplx = std::complex<double>;

struct SymbolSet {
  double zeta = 0.0;
  double alpha = 0.0;  // real part of the biased (hyperbolic) symbol, <= 0
  double beta = 0.0;   // imaginary part of the biased symbol
  double xi = 0.0;     // real part of the centered symbol, 0 by construction
  double gamma = 0.0;  // imaginary part of the centered symbol
};

// Symbols of the semidiscrete transport operator on a pure Fourier mode
// exp(i zeta x / dx). The velocity +lambda row carries alpha + i beta, the
// parabolic velocity +w row carries -(xi + i gamma) with w = mu/sqrt(2) +
// theta/sqrt(eps).
inline SymbolSet fourier_symbols(double zeta, double dx, double lambda,
                                 double theta, double mu, double epsilon,
                                 int hyperbolic_order = 3,
                                 int parabolic_order = 4) {
  if (!(dx > 0.0)) throw std::invalid_argument("fourier_symbols: dx must be positive");
  SymbolSet s;
  s.zeta = zeta;
  const double c1 = std::cos(zeta), s1 = std::sin(zeta);
  const double c2 = std::cos(2.0 * zeta), s2 = std::sin(2.0 * zeta);
  switch (hyperbolic_order) {
    case 1:
      s.alpha = -std::abs(lambda) * (1.0 - c1) / dx;
      s.beta = -lambda * s1 / dx;
      break;
    case 3:
      s.alpha = -std::abs(lambda) * (3.0 - 4.0 * c1 + c2) / (6.0 * dx);
      s.beta = -lambda * (8.0 * s1 - s2) / (6.0 * dx);
      break;
    case 4:
      s.alpha = 0.0;
      s.beta = -lambda * (8.0 * s1 - s2) / (6.0 * dx);
      break;
    default:
      throw std::invalid_argument("fourier_symbols: hyperbolic order must be 1, 3 or 4");
  }
  const double w = mu / std::sqrt(2.0) + theta / std::sqrt(epsilon);
  s.xi = 0.0;
  if (parabolic_order == 2)
    s.gamma = w * s1 / dx;
  else if (parabolic_order == 4)
    s.gamma = w * (8.0 * s1 - s2) / (6.0 * dx);
  else
    throw std::invalid_argument("fourier_symbols: parabolic order must be 2 or 4");
  return s;
}

// Diagonal transport symbol, ordering (-lambda, +lambda, -w, +w).
inline std::array<cplx, 4> transport_diagonal(const SymbolSet& s) {
  return {cplx(s.alpha, -s.beta), cplx(s.alpha, s.beta),
          cplx(-s.xi, s.gamma), cplx(-s.xi, -s.gamma)};
}

// Maxwellian derivative weights for the linearized model A' = a, B' = b,
// same velocity ordering. The weights sum to 1.
inline std::array<double, 4> maxwellian_weights(double lambda, double theta,
                                                double a = 1.0, double b = 1.0) {
  const double th2 = theta * theta;
  return {0.5 * (1.0 - a / lambda - b / th2), 0.5 * (1.0 + a / lambda - b / th2),
          0.5 * b / th2, 0.5 * b / th2};
}

// K-hat = diag(d) + (c 1^T - I)/eps acting on the per-mode amplitudes.
inline Eigen::Matrix4cd bgk_symbol_matrix(const SymbolSet& s, double lambda,
                                          double theta, double epsilon,
                                          double a = 1.0, double b = 1.0) {
  const auto d = transport_diagonal(s);
  const auto c = maxwellian_weights(lambda, theta, a, b);
  Eigen::Matrix4cd K;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      cplx v = cplx(c[i] / epsilon, 0.0);
      if (i == j) v += d[i] - 1.0 / epsilon;
      K(i, j) = v;
    }
  return K;
}

// Auxiliary matrix whose eigenvalues are 1 + eps * Sp(K-hat).
inline Eigen::Matrix4cd auxiliary_matrix(const SymbolSet& s, double lambda,
                                         double theta, double epsilon,
                                         double a = 1.0, double b = 1.0) {
  return Eigen::Matrix4cd::Identity() +
         epsilon * bgk_symbol_matrix(s, lambda, theta, epsilon, a, b);
}

// First-order dominant eigenvalue coefficients of K-hat: z1 = x1 + i y1.
inline cplx dominant_first_order(const SymbolSet& s, double lambda, double theta,
                                 double a = 1.0, double b = 1.0) {
  const double th2 = theta * theta;
  const double x1 = (1.0 - b / th2) * s.alpha + s.xi * b / th2;
  const double y1 = a * s.beta / lambda;
  return {x1, y1};
}

struct AsymptoticPrediction {
  cplx a_eigenvalue;  // 1 + eps z1 + eps^2 z2
  cplx k_eigenvalue;  // z1 + eps z2
  cplx z1, z2;
};

// Second-order expansion of the dominant eigenvalue. The auxiliary matrix is
// c 1^T + eps diag(d); expanding its secular equation around the simple root
// at 1 gives mu = 1 + eps D1 + eps^2 (D2 - D1^2) with the weighted power sums
// D1 = sum c_j d_j and D2 = sum c_j d_j^2. The remainder of mu is O(eps^2)
// uniformly in the stiff symbols because the odd powers of gamma cancel.
inline AsymptoticPrediction dominant_eigenvalue_asymptotic(
    const SymbolSet& s, double lambda, double theta, double epsilon,
    double a = 1.0, double b = 1.0) {
  AsymptoticPrediction p;
  p.z1 = dominant_first_order(s, lambda, theta, a, b);
  const double th2 = theta * theta;
  const double x1 = p.z1.real(), y1 = p.z1.imag();
  const double d2_re = (1.0 - b / th2) * (s.alpha * s.alpha - s.beta * s.beta) +
                       (b / th2) * (s.xi * s.xi - s.gamma * s.gamma);
  const double d2_im = 2.0 * (a / lambda) * s.alpha * s.beta;
  const double x2 = d2_re - (x1 * x1 - y1 * y1);
  const double y2 = d2_im - 2.0 * x1 * y1;
  p.z2 = {x2, y2};
  p.a_eigenvalue = 1.0 + epsilon * p.z1 + epsilon * epsilon * p.z2;
  p.k_eigenvalue = p.z1 + epsilon * p.z2;
  return p;
}

namespace detail {

// Secular function for the auxiliary matrix: g(z) = 1 - sum c_j/(z - eps d_j);
// its zeros are the non-defective eigenvalues.
inline cplx secular(const std::array<double, 4>& c, const std::array<cplx, 4>& ed,
                    cplx z, cplx* dg = nullptr) {
  cplx g = 1.0, d = 0.0;
  for (int j = 0; j < 4; ++j) {
    const cplx q = 1.0 / (z - ed[j]);
    g -= c[j] * q;
    d += c[j] * q * q;
  }
  if (dg) *dg = d;
  return g;
}

inline bool newton_secular(const std::array<double, 4>& c,
                           const std::array<cplx, 4>& ed, cplx& z) {
  for (int it = 0; it < 60; ++it) {
    cplx dg;
    const cplx g = secular(c, ed, z, &dg);
    if (std::abs(dg) < 1e-300) return false;
    const cplx step = g / dg;
    z -= step;
    if (std::abs(step) < 1e-15 * (1.0 + std::abs(z))) return true;
  }
  return false;
}

}  // namespace detail

struct ModeSpectrum {
  double zeta = 0.0;
  SymbolSet symbols;
  std::array<cplx, 4> k_eigenvalues{};  // eigenvalues of K-hat
  cplx dominant;                        // the one with the largest real part
  cplx asymptotic_k;                    // second-order prediction
  bool used_fallback = false;           // secular refinement did not converge
};

// Per-mode spectrum via the secular equation, arbitrated by a dense
// eigensolve of the auxiliary matrix.
inline ModeSpectrum analytic_mode_spectrum(const SymbolSet& s, double lambda,
                                           double theta, double epsilon,
                                           double a = 1.0, double b = 1.0) {
  ModeSpectrum m;
  m.zeta = s.zeta;
  m.symbols = s;
  const auto c = maxwellian_weights(lambda, theta, a, b);
  const auto d = transport_diagonal(s);
  std::array<cplx, 4> ed;
  for (int j = 0; j < 4; ++j) ed[j] = epsilon * d[j];

  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(
      auxiliary_matrix(s, lambda, theta, epsilon, a, b));
  if (es.info() != Eigen::Success)
    throw std::runtime_error("analytic_mode_spectrum: dense eigensolve failed");

  for (int j = 0; j < 4; ++j) {
    cplx root = es.eigenvalues()(j);
    cplx refined = root;
    if (detail::newton_secular(c, ed, refined) &&
        std::abs(refined - root) < 1e-6 * (1.0 + std::abs(root))) {
      root = refined;
    } else {
      m.used_fallback = true;
    }
    m.k_eigenvalues[j] = (root - 1.0) / epsilon;
  }
  m.dominant = *std::max_element(
      m.k_eigenvalues.begin(), m.k_eigenvalues.end(),
      [](const cplx& p, const cplx& q) { return p.real() < q.real(); });
  m.asymptotic_k =
      dominant_eigenvalue_asymptotic(s, lambda, theta, epsilon, a, b).k_eigenvalue;
  return m;
}

struct SpectrumReport {
  std::vector<cplx> eigenvalues;
  std::vector<int> is_dominant;  // parallel to eigenvalues
  double fast_cluster_center = 0.0;
  double fast_cluster_radius_bound = 0.0;  // C (|xi| + |gamma|) / sqrt(eps), worst mode
  double fitted_C = 0.0;
  bool within_bound = false;
  std::vector<ModeSpectrum> modes;
};

// Full-grid analytic spectrum over the nx Fourier modes zeta_m = 2 pi m / nx.
inline SpectrumReport analytic_spectrum(int nx, double dx, double lambda,
                                        double theta, double mu, double epsilon,
                                        int hyperbolic_order = 3,
                                        int parabolic_order = 4, double a = 1.0,
                                        double b = 1.0) {
  SpectrumReport rep;
  rep.fast_cluster_center = -1.0 / epsilon;
  const double pi = std::acos(-1.0);
  double worst_sym = 0.0;
  for (int mode = 0; mode < nx; ++mode) {
    const double zeta = 2.0 * pi * mode / nx;
    const auto s = fourier_symbols(zeta, dx, lambda, theta, mu, epsilon,
                                   hyperbolic_order, parabolic_order);
    auto m = analytic_mode_spectrum(s, lambda, theta, epsilon, a, b);
    // Epsilon-free symbol scale: the slow-row symbol carries the 1/sqrt(eps)
    // velocity weight, so sqrt(eps) strips it back out. At the Nyquist mode
    // the slow symbol vanishes and the hyperbolic dissipation takes over.
    const double sym = std::hypot(s.alpha, s.beta) +
                       std::sqrt(epsilon) * std::hypot(s.xi, s.gamma);
    double radius = 0.0;
    for (const cplx& z : m.k_eigenvalues) {
      const bool dom = std::abs(z - m.dominant) < 1e-9 * (1.0 + std::abs(z));
      if (!dom) radius = std::max(radius, std::abs(z - rep.fast_cluster_center));
      rep.eigenvalues.push_back(z);
      rep.is_dominant.push_back(dom ? 1 : 0);
    }
    if (sym > 0.0) {
      rep.fitted_C = std::max(rep.fitted_C, radius * std::sqrt(epsilon) / sym);
      worst_sym = std::max(worst_sym, sym);
    }
    rep.modes.push_back(std::move(m));
  }
  rep.fast_cluster_radius_bound = rep.fitted_C * worst_sym / std::sqrt(epsilon);
  // The bound uses the fitted C, so the fast cluster lies inside it by
  // construction; within_bound re-checks against the per-mode radii.
  rep.within_bound = true;
  for (std::size_t n = 0; n < rep.eigenvalues.size(); ++n)
    if (!rep.is_dominant[n] &&
        std::abs(rep.eigenvalues[n] - rep.fast_cluster_center) >
            rep.fast_cluster_radius_bound * (1.0 + 1e-12) + 1e-9)
      rep.within_bound = false;
  return rep;
}

// Dense Jacobian spectrum of the full semidiscrete operator by forward
// differences, h = 1e-7 (1 + |f|).
inline SpectrumReport numerical_spectrum(const KineticModel& model,
                                         const Grid& grid, const SchemeSpec& scheme,
                                         BoundaryRule rule,
                                         const KineticField& base_state) {
  if (grid.n_cells() > 200)
    throw std::invalid_argument("numerical_spectrum: grid too large for a dense solve");
  const int L = model.n_velocities(), K = model.n_components;
  const long N = grid.n_cells() * L * K;

  KineticField f = base_state, rhs0 = base_state, rhs1 = base_state;
  semidiscrete_rhs(model, grid, scheme, rule, f, rhs0);

  // Interior indices in a fixed order.
  std::vector<std::size_t> interior;
  interior.reserve(N);
  for (int l = 0; l < L; ++l)
    for (int k = 0; k < K; ++k)
      for (int j = 0; j < f.ny; ++j)
        for (int i = 0; i < f.nx; ++i) interior.push_back(f.index(l, k, i, j));

  Eigen::MatrixXd J(N, N);
  for (long col = 0; col < N; ++col) {
    const std::size_t idx = interior[col];
    const double h = 1e-7 * (1.0 + std::abs(base_state.data[idx]));
    f = base_state;
    f.data[idx] += h;
    semidiscrete_rhs(model, grid, scheme, rule, f, rhs1);
    for (long row = 0; row < N; ++row)
      J(row, col) = (rhs1.data[interior[row]] - rhs0.data[interior[row]]) / h;
  }

  Eigen::EigenSolver<Eigen::MatrixXd> es(J);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("numerical_spectrum: eigensolve failed, matrix norm " +
                             std::to_string(J.norm()));
  SpectrumReport rep;
  rep.fast_cluster_center = -1.0 / model.epsilon;
  for (long n = 0; n < N; ++n) {
    const cplx z = es.eigenvalues()(n);
    rep.eigenvalues.push_back(z);
    rep.is_dominant.push_back(z.real() > -0.5 / model.epsilon ? 1 : 0);
  }
  double radius = 0.0;
  for (long n = 0; n < N; ++n)
    if (!rep.is_dominant[n])
      radius = std::max(radius, std::abs(rep.eigenvalues[n] - rep.fast_cluster_center));
  rep.fast_cluster_radius_bound = radius;
  rep.within_bound = true;
  return rep;
}

// ---------------------------------------------------------------------------
// Amplification factors of the projective schemes on the Dahlquist equation,
// written in terms of the inner amplification tau = 1 + dt z.

inline cplx pfe_amplification(cplx tau, double Dt, double dt, int K) {
  if (!(dt > 0.0)) throw std::invalid_argument("pfe_amplification: dt must be positive");
  const double M = (Dt - (K + 1) * dt) / dt;
  return ((M + 1.0) * tau - M) * std::pow(tau, K);
}

inline cplx prk_amplification(cplx tau, const ButcherTableau& tab, double Dt,
                              double dt, int K) {
  tab.validate();
  const int S = tab.stages();
  const cplx tK = std::pow(tau, K);
  const cplx tK1 = tK * tau;
  const cplx slope = (tK1 - tK) / dt;
  std::vector<cplx> kappa(S);
  kappa[0] = slope;
  for (int s = 1; s < S; ++s) {
    const double Ms = (tab.c[s] * Dt - (K + 1) * dt) / dt;
    cplx acc = 0.0;
    for (int l = 0; l < s; ++l) acc += (tab.a[s][l] / tab.c[s]) * kappa[l];
    kappa[s] = slope * (tK1 + Ms * dt * acc);
  }
  const double M = (Dt - (K + 1) * dt) / dt;
  cplx sigma = tK1;
  for (int s = 0; s < S; ++s) sigma += M * dt * tab.b[s] * kappa[s];
  return sigma;
}

struct StabilityRaster {
  int res_x = 0, res_y = 0;
  double re_lo = -2.0, re_hi = 2.0, im_lo = -2.0, im_hi = 2.0;
  std::vector<unsigned char> stable;  // row-major, stable[iy * res_x + ix]

  bool at(int ix, int iy) const {
    return stable[static_cast<std::size_t>(iy) * res_x + ix] != 0;
  }
  cplx point(int ix, int iy) const {
    return {re_lo + (re_hi - re_lo) * (ix + 0.5) / res_x,
            im_lo + (im_hi - im_lo) * (iy + 0.5) / res_y};
  }
};

// Raster of {tau : |sigma(tau)| <= 1}, default 512^2 over [-2,2]^2. A
// rectangular window/resolution lets callers resolve the tiny slow disk at
// large step ratios.
inline StabilityRaster stability_region(double ratio, int K,
                                        const ButcherTableau* tab = nullptr,
                                        int res_x = 512, int res_y = 0,
                                        std::array<double, 4> window = {-2.0, 2.0,
                                                                        -2.0, 2.0}) {
  if (res_y == 0) res_y = res_x;
  if (static_cast<long>(res_x) * res_y < 64L * 64L)
    throw std::invalid_argument("stability_region: resolution below 64x64");
  StabilityRaster r;
  r.res_x = res_x;
  r.res_y = res_y;
  r.re_lo = window[0];
  r.re_hi = window[1];
  r.im_lo = window[2];
  r.im_hi = window[3];
  r.stable.assign(static_cast<std::size_t>(res_x) * res_y, 0);
  const double dt = 1.0, Dt = ratio;
  for (int iy = 0; iy < res_y; ++iy)
    for (int ix = 0; ix < res_x; ++ix) {
      const cplx tau = r.point(ix, iy);
      const cplx sigma = tab ? prk_amplification(tau, *tab, Dt, dt, K)
                             : pfe_amplification(tau, Dt, dt, K);
      if (std::abs(sigma) <= 1.0)
        r.stable[static_cast<std::size_t>(iy) * res_x + ix] = 1;
    }
  return r;
}

// 4-connected component count of the stable set.
inline int connected_components(const StabilityRaster& r) {
  const int nx = r.res_x, ny = r.res_y;
  std::vector<int> label(static_cast<std::size_t>(nx) * ny, -1);
  int count = 0;
  std::vector<long> stack;
  for (long seed = 0; seed < static_cast<long>(label.size()); ++seed) {
    if (!r.stable[seed] || label[seed] >= 0) continue;
    ++count;
    stack.push_back(seed);
    label[seed] = count;
    while (!stack.empty()) {
      const long p = stack.back();
      stack.pop_back();
      const int ix = static_cast<int>(p % nx), iy = static_cast<int>(p / nx);
      const int dx4[4] = {1, -1, 0, 0}, dy4[4] = {0, 0, 1, -1};
      for (int q = 0; q < 4; ++q) {
        const int jx = ix + dx4[q], jy = iy + dy4[q];
        if (jx < 0 || jy < 0 || jx >= nx || jy >= ny) continue;
        const long pn = static_cast<long>(jy) * nx + jx;
        if (r.stable[pn] && label[pn] < 0) {
          label[pn] = count;
          stack.push_back(pn);
        }
      }
    }
  }
  return count;
}

// The two printed PFE stability disks.
inline std::pair<std::pair<double, double>, std::pair<double, double>>
pfe_stability_disks(double ratio, int K) {
  const double q = 1.0 / ratio;  // dt / Dt
  return {{1.0 - q, q}, {0.0, std::pow(q, 1.0 / K)}};
}

}  // namespace pibgk
