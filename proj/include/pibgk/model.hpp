#pragma once

// Discrete-kinetic BGK relaxation models for advection-diffusion systems:
// velocity families, Maxwellian equilibria and admissibility checks.

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pibgk {

inline constexpr int max_components = 4;  // K
inline constexpr int max_velocities = 8;  // L

enum class ModelKind { Drm1_1d, Drm2_1d, Ovm_1d, Drm1_2d };

inline const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::Drm1_1d: return "drm1_1d";
    case ModelKind::Drm2_1d: return "drm2_1d";
    case ModelKind::Ovm_1d: return "ovm_1d";
    case ModelKind::Drm1_2d: return "drm1_2d";
  }
  return "?";
}

// Componentwise state map u in R^K -> out in R^K.
using StateMap = std::function<void(std::span<const double>, std::span<double>)>;

inline StateMap scalar_map(std::function<double(double)> f) {
  return [f = std::move(f)](std::span<const double> u, std::span<double> out) {
    for (std::size_t k = 0; k < u.size(); ++k) out[k] = f(u[k]);
  };
}

inline StateMap zero_map() {
  return [](std::span<const double> u, std::span<double> out) {
    for (std::size_t k = 0; k < u.size(); ++k) out[k] = 0.0;
  };
}

inline StateMap identity_map() {
  return [](std::span<const double> u, std::span<double> out) {
    for (std::size_t k = 0; k < u.size(); ++k) out[k] = u[k];
  };
}

struct ModelError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct KineticModel {
  ModelKind kind = ModelKind::Drm1_1d;
  int dim = 1;           // D
  int n_components = 1;  // K
  int n_hyperbolic = 2;  // J
  int n_parabolic = 2;   // J'
  double epsilon = 1.0;

  // Constants; which of the lambdas are meaningful depends on `kind`.
  double lambda = 0.0, lambda_m = 0.0, lambda_p = 0.0;
  double lambda1 = 0.0, lambda2 = 0.0;
  double theta = 0.0, mu = 0.0;

  // Orthonormal zero-sum basis of H (2D only), sigma[d][m], m < J'.
  std::array<std::array<double, 3>, 2> sigma{};

  StateMap flux_x, flux_y, diffusion;

  int n_velocities() const { return n_hyperbolic + n_parabolic; }

  // gamma_ld^eps = lambda_ld + theta_ld / sqrt(eps)
  double velocity(int l, int d = 0) const {
    return velocity_lambda_part(l, d) + velocity_theta_part(l, d) / std::sqrt(epsilon);
  }

  double velocity_lambda_part(int l, int d = 0) const {
    switch (kind) {
      case ModelKind::Drm1_1d: {
        const double lp[4] = {-lambda, lambda, -mu / std::sqrt(2.0), mu / std::sqrt(2.0)};
        return lp[l];
      }
      case ModelKind::Drm2_1d: {
        const double lp[4] = {lambda_m, lambda_p, -mu / std::sqrt(2.0), mu / std::sqrt(2.0)};
        return lp[l];
      }
      case ModelKind::Ovm_1d: {
        const double lp[3] = {0.0, lambda, -lambda};
        return lp[l];
      }
      case ModelKind::Drm1_2d: {
        const double lam = (d == 0) ? lambda1 : lambda2;
        // Hyperbolic patterns: x uses (-1,0,1), y uses (0,-1,1).
        static constexpr double cx[3] = {-1.0, 0.0, 1.0};
        static constexpr double cy[3] = {0.0, -1.0, 1.0};
        if (l < 3) return lam * ((d == 0) ? cx[l] : cy[l]);
        return mu * sigma[d][l - 3];
      }
    }
    return 0.0;
  }

  double velocity_theta_part(int l, int d = 0) const {
    switch (kind) {
      case ModelKind::Drm1_1d:
      case ModelKind::Drm2_1d: {
        const double tp[4] = {0.0, 0.0, -theta, theta};
        return tp[l];
      }
      case ModelKind::Ovm_1d: {
        const double tp[3] = {0.0, theta, -theta};
        return tp[l];
      }
      case ModelKind::Drm1_2d: {
        if (l < 3) return 0.0;
        return theta * std::sqrt(3.0) * sigma[d][l - 3];
      }
    }
    return 0.0;
  }

  // M(eps, u): row l occupies out[l*K .. l*K+K).
  void maxwellian(std::span<const double> u, std::span<double> out) const {
    maxwellian_at(epsilon, u, out);
  }

  // M at an explicit relaxation value; eps = 0 gives the limit Maxwellian.
  void maxwellian_at(double eps, std::span<const double> u, std::span<double> out) const {
    const int K = n_components;
    std::array<double, max_components> a1{}, a2{}, b{};
    flux_x(u, std::span<double>(a1.data(), K));
    if (dim == 2) flux_y(u, std::span<double>(a2.data(), K));
    diffusion(u, std::span<double>(b.data(), K));
    const double th2 = theta * theta;
    switch (kind) {
      case ModelKind::Drm1_1d:
        for (int k = 0; k < K; ++k) {
          out[0 * K + k] = 0.5 * (u[k] - a1[k] / lambda - b[k] / th2);
          out[1 * K + k] = 0.5 * (u[k] + a1[k] / lambda - b[k] / th2);
          out[2 * K + k] = 0.5 * b[k] / th2;
          out[3 * K + k] = 0.5 * b[k] / th2;
        }
        break;
      case ModelKind::Drm2_1d: {
        const double dl = lambda_p - lambda_m;
        for (int k = 0; k < K; ++k) {
          const double w = u[k] - b[k] / th2;
          out[0 * K + k] = (lambda_p * w - a1[k]) / dl;
          out[1 * K + k] = (-lambda_m * w + a1[k]) / dl;
          out[2 * K + k] = 0.5 * b[k] / th2;
          out[3 * K + k] = 0.5 * b[k] / th2;
        }
        break;
      }
      case ModelKind::Ovm_1d: {
        // w -> infinity as eps -> 0; the A-contribution vanishes in the limit.
        const double ainv = (eps > 0.0) ? 0.5 / (lambda + theta / std::sqrt(eps)) : 0.0;
        for (int k = 0; k < K; ++k) {
          out[0 * K + k] = u[k] - b[k] / th2;
          out[1 * K + k] = ainv * a1[k] + 0.5 * b[k] / th2;
          out[2 * K + k] = -ainv * a1[k] + 0.5 * b[k] / th2;
        }
        break;
      }
      case ModelKind::Drm1_2d:
        for (int k = 0; k < K; ++k) {
          const double r1 = a1[k] / lambda1, r2 = a2[k] / lambda2;
          const double bq = b[k] / (3.0 * th2);
          out[0 * K + k] = (u[k] - 2.0 * r1 + r2) / 3.0 - bq;
          out[1 * K + k] = (u[k] + r1 - 2.0 * r2) / 3.0 - bq;
          out[2 * K + k] = (u[k] + r1 + r2) / 3.0 - bq;
          out[3 * K + k] = bq;
          out[4 * K + k] = bq;
          out[5 * K + k] = bq;
        }
        break;
    }
  }
};

// Sum over velocities: f is L x K, result is K.
inline void project(std::span<const double> f, int n_velocities,
                    std::span<double> u_out) {
  const int K = static_cast<int>(u_out.size());
  for (int k = 0; k < K; ++k) u_out[k] = 0.0;
  for (int l = 0; l < n_velocities; ++l)
    for (int k = 0; k < K; ++k) u_out[k] += f[static_cast<std::size_t>(l) * K + k];
}

inline std::vector<double> project(std::span<const double> f, int n_velocities) {
  std::vector<double> u(f.size() / n_velocities);
  project(f, n_velocities, u);
  return u;
}

namespace detail {

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw ModelError(msg);
}

inline void check_epsilon(double eps) {
  require(eps > 0.0 && eps <= 1.0, "epsilon must lie in (0, 1]");
}

}  // namespace detail

inline KineticModel build_drm1_1d(double lambda, double theta, double mu,
                                  double epsilon, StateMap A, StateMap B,
                                  int n_components = 1) {
  detail::require(lambda > 0.0, "drm1: lambda must be positive");
  detail::require(theta > 0.0, "drm1: theta must be positive");
  detail::require(mu >= 0.0, "drm1: mu must be nonnegative");
  detail::check_epsilon(epsilon);
  KineticModel m;
  m.kind = ModelKind::Drm1_1d;
  m.dim = 1;
  m.n_components = n_components;
  m.n_hyperbolic = 2;
  m.n_parabolic = 2;
  m.lambda = lambda;
  m.theta = theta;
  m.mu = mu;
  m.epsilon = epsilon;
  m.flux_x = std::move(A);
  m.diffusion = std::move(B);
  return m;
}

inline KineticModel build_drm2_1d(double lambda_m, double lambda_p, double theta,
                                  double mu, double epsilon, StateMap A, StateMap B,
                                  int n_components = 1) {
  detail::require(lambda_m < lambda_p, "drm2: lambda_m must be below lambda_p");
  detail::require(theta > 0.0, "drm2: theta must be positive");
  detail::require(mu >= 0.0, "drm2: mu must be nonnegative");
  detail::check_epsilon(epsilon);
  KineticModel m;
  m.kind = ModelKind::Drm2_1d;
  m.dim = 1;
  m.n_components = n_components;
  m.n_hyperbolic = 2;
  m.n_parabolic = 2;
  m.lambda_m = lambda_m;
  m.lambda_p = lambda_p;
  m.theta = theta;
  m.mu = mu;
  m.epsilon = epsilon;
  m.flux_x = std::move(A);
  m.diffusion = std::move(B);
  return m;
}

inline KineticModel build_ovm_1d(double lambda, double theta, double epsilon,
                                 StateMap A, StateMap B, int n_components = 1) {
  detail::require(lambda > 0.0, "ovm: lambda must be positive");
  detail::require(theta > 0.0, "ovm: theta must be positive");
  detail::check_epsilon(epsilon);
  KineticModel m;
  m.kind = ModelKind::Ovm_1d;
  m.dim = 1;
  m.n_components = n_components;
  m.n_hyperbolic = 1;  // the resting velocity
  m.n_parabolic = 2;
  m.lambda = lambda;
  m.theta = theta;
  m.epsilon = epsilon;
  m.flux_x = std::move(A);
  m.diffusion = std::move(B);
  return m;
}

inline KineticModel build_drm1_2d(
    double lambda1, double lambda2, double theta, double mu, double epsilon,
    StateMap A1, StateMap A2, StateMap B, int n_components = 1,
    std::optional<std::array<std::array<double, 3>, 2>> sigma_basis = {}) {
  detail::require(lambda1 > 0.0 && lambda2 > 0.0, "drm1_2d: lambdas must be positive");
  detail::require(theta > 0.0, "drm1_2d: theta must be positive");
  detail::require(mu >= 0.0, "drm1_2d: mu must be nonnegative");
  detail::check_epsilon(epsilon);
  KineticModel m;
  m.kind = ModelKind::Drm1_2d;
  m.dim = 2;
  m.n_components = n_components;
  m.n_hyperbolic = 3;
  m.n_parabolic = 3;
  m.lambda1 = lambda1;
  m.lambda2 = lambda2;
  m.theta = theta;
  m.mu = mu;
  m.epsilon = epsilon;
  m.flux_x = std::move(A1);
  m.flux_y = std::move(A2);
  m.diffusion = std::move(B);
  if (sigma_basis) {
    const auto& s = *sigma_basis;
    for (int d = 0; d < 2; ++d) {
      double sum = 0.0, nrm = 0.0;
      for (int i = 0; i < 3; ++i) { sum += s[d][i]; nrm += s[d][i] * s[d][i]; }
      detail::require(std::abs(sum) < 1e-12, "drm1_2d: sigma vectors must sum to zero");
      detail::require(std::abs(nrm - 1.0) < 1e-12, "drm1_2d: sigma vectors must be unit");
    }
    double dot = 0.0;
    for (int i = 0; i < 3; ++i) dot += s[0][i] * s[1][i];
    detail::require(std::abs(dot) < 1e-12, "drm1_2d: sigma vectors must be orthogonal");
    m.sigma = s;
  } else {
    const double s2 = 1.0 / std::sqrt(2.0), s6 = 1.0 / std::sqrt(6.0);
    m.sigma = {{{s2, -s2, 0.0}, {s6, s6, -2.0 * s6}}};
  }
  return m;
}

// ---------------------------------------------------------------------------
// Admissibility (monotone Maxwellian / subcharacteristic conditions)

struct StateBox {
  // One [lo, hi] interval per component.
  std::vector<std::array<double, 2>> bounds;
  int n_components() const { return static_cast<int>(bounds.size()); }
};

struct AdmissibilityReport {
  bool is_mmf = false;
  double max_condition_value = 0.0;
  std::optional<std::vector<double>> violating_state;
  ModelKind condition_kind = ModelKind::Drm1_1d;
  // Classification slack; the finite-difference derivative probes carry
  // rounding noise around 1e-10, so boundary cases need a looser margin.
  double tolerance = 1e-9;
};

// 4th-order central difference of the diagonal derivative dF_k/du_k.
inline double diagonal_derivative(const StateMap& F, std::span<const double> u,
                                  int k) {
  const double h = std::max(1e-6, 1e-6 * std::abs(u[k]));
  const int K = static_cast<int>(u.size());
  std::array<double, max_components> up{}, out{};
  for (int j = 0; j < K; ++j) up[j] = u[j];
  auto eval = [&](double shift) {
    up[k] = u[k] + shift;
    F(std::span<const double>(up.data(), K), std::span<double>(out.data(), K));
    return out[k];
  };
  const double d = (-eval(2 * h) + 8 * eval(h) - 8 * eval(-h) + eval(-2 * h)) / (12 * h);
  return d;
}

// Evaluates the model-specific monotonicity condition in a <= 1 normal form.
inline AdmissibilityReport check_mmf(const KineticModel& model, const StateBox& box,
                                     int n_samples,
                                     const StateMap* A_prime = nullptr,
                                     const StateMap* A2_prime = nullptr,
                                     const StateMap* B_prime = nullptr) {
  if (box.bounds.empty() || n_samples < 1)
    throw ModelError("check_mmf: empty state box");
  const int K = box.n_components();
  AdmissibilityReport rep;
  rep.condition_kind = model.kind;
  rep.max_condition_value = -std::numeric_limits<double>::infinity();

  std::array<double, max_components> u{}, da{}, da2{}, db{};
  std::vector<int> idx(K, 0);
  const double th2 = model.theta * model.theta;

  auto derivs_at = [&](std::span<const double> us) {
    for (int k = 0; k < K; ++k) {
      if (A_prime) {
        std::array<double, max_components> tmp{};
        (*A_prime)(us, std::span<double>(tmp.data(), K));
        da[k] = tmp[k];
      } else {
        da[k] = diagonal_derivative(model.flux_x, us, k);
      }
      if (model.dim == 2) {
        if (A2_prime) {
          std::array<double, max_components> tmp{};
          (*A2_prime)(us, std::span<double>(tmp.data(), K));
          da2[k] = tmp[k];
        } else {
          da2[k] = diagonal_derivative(model.flux_y, us, k);
        }
      }
      if (B_prime) {
        std::array<double, max_components> tmp{};
        (*B_prime)(us, std::span<double>(tmp.data(), K));
        db[k] = tmp[k];
      } else {
        db[k] = diagonal_derivative(model.diffusion, us, k);
      }
    }
  };

  // Tensor grid over the box, n_samples points per axis.
  const long total = static_cast<long>(std::pow(static_cast<double>(n_samples), K));
  for (long s = 0; s < total; ++s) {
    long rem = s;
    for (int k = 0; k < K; ++k) {
      idx[k] = static_cast<int>(rem % n_samples);
      rem /= n_samples;
      const auto& [lo, hi] = box.bounds[k];
      u[k] = (n_samples == 1) ? 0.5 * (lo + hi)
                              : lo + (hi - lo) * idx[k] / (n_samples - 1.0);
    }
    const std::span<const double> us(u.data(), K);
    derivs_at(us);
    double v = 0.0;
    switch (model.kind) {
      case ModelKind::Drm1_1d:
        for (int k = 0; k < K; ++k)
          v = std::max(v, std::abs(da[k]) / model.lambda + db[k] / th2);
        break;
      case ModelKind::Drm2_1d:
        for (int k = 0; k < K; ++k) {
          const double lo = model.lambda_m * (1.0 - db[k] / th2);
          const double hi = model.lambda_p * (1.0 - db[k] / th2);
          if (hi <= lo) { v = std::max(v, 2.0); continue; }
          v = std::max(v, std::abs(2.0 * da[k] - lo - hi) / (hi - lo));
        }
        break;
      case ModelKind::Ovm_1d:
        // Small-eps monotonicity needs theta^2 > max B'.
        for (int k = 0; k < K; ++k) v = std::max(v, db[k] / th2);
        break;
      case ModelKind::Drm1_2d:
        for (int k = 0; k < K; ++k) {
          const double r1 = da[k] / model.lambda1, r2 = da2[k] / model.lambda2;
          const double h = std::max({2.0 * r1 - r2, -r1 + 2.0 * r2, -r1 - r2});
          v = std::max(v, h + db[k] / th2);
        }
        break;
    }
    if (v > rep.max_condition_value) rep.max_condition_value = v;
    if (v > 1.0 + rep.tolerance && !rep.violating_state)
      rep.violating_state = std::vector<double>(u.begin(), u.begin() + K);
  }
  rep.is_mmf = rep.max_condition_value <= 1.0 + rep.tolerance;
  return rep;
}

// Sampled inf/sup of A'/(1 - B'/theta^2), widened by a safety factor.
inline std::pair<double, double> compute_lambda_bounds(
    const std::function<double(double)>& A_prime,
    const std::function<double(double)>& B_prime, double theta,
    std::array<double, 2> interval, int n_samples, double safety_factor = 1.05) {
  if (n_samples < 2) throw ModelError("compute_lambda_bounds: need at least 2 samples");
  const double th2 = theta * theta;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_samples; ++i) {
    const double u = interval[0] + (interval[1] - interval[0]) * i / (n_samples - 1.0);
    const double den = 1.0 - B_prime(u) / th2;
    if (den <= 0.0)
      throw ModelError("compute_lambda_bounds: 1 - B'/theta^2 <= 0 at u=" +
                       std::to_string(u) + "; increase theta");
    const double r = A_prime(u) / den;
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  const double pad = (safety_factor - 1.0) * std::max({std::abs(lo), std::abs(hi), 1e-12});
  return {lo - pad, hi + pad};
}

}  // namespace pibgk
