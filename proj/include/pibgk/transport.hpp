#pragma once

// Finite-difference transport stencils (upwind, centered, CWENO3) and the
// semidiscrete BGK right-hand side D_t(f) = -sum_d gamma_ld d_d f_l + (M-f)/eps.

#include <cmath>
#include <span>
#include <stdexcept>

#include "pibgk/core.hpp"
#include "pibgk/model.hpp"

namespace pibgk {

enum class HyperbolicScheme { Upwind1, Upwind3, Upwind4, Cweno3 };

inline const char* to_string(HyperbolicScheme s) {
  switch (s) {
    case HyperbolicScheme::Upwind1: return "upwind1";
    case HyperbolicScheme::Upwind3: return "upwind3";
    case HyperbolicScheme::Upwind4: return "upwind4";
    case HyperbolicScheme::Cweno3: return "cweno3";
  }
  return "?";
}

struct SchemeSpec {
  HyperbolicScheme hyperbolic = HyperbolicScheme::Upwind3;
  int parabolic_order = 4;  // 2 or 4
  double weno_eps = 1e-6;
  int weno_p = 2;
};

// r is a padded row; p indexes into it (cell i sits at p = i + ghost_width).
// All stencils return an approximation of df/dx at cell p.

inline double upwind1_derivative(double gamma, std::span<const double> r, int p,
                                 double dx) {
  if (gamma > 0.0) return (r[p] - r[p - 1]) / dx;
  if (gamma < 0.0) return (r[p + 1] - r[p]) / dx;
  return 0.0;
}

inline double upwind3_derivative(double gamma, std::span<const double> r, int p,
                                 double dx) {
  if (gamma > 0.0)
    return (2.0 * r[p + 1] + 3.0 * r[p] - 6.0 * r[p - 1] + r[p - 2]) / (6.0 * dx);
  if (gamma < 0.0)
    return (-r[p + 2] + 6.0 * r[p + 1] - 3.0 * r[p] - 2.0 * r[p - 1]) / (6.0 * dx);
  return 0.0;
}

inline double centered2_derivative(std::span<const double> r, int p, double dx) {
  return (r[p + 1] - r[p - 1]) / (2.0 * dx);
}

inline double centered4_derivative(std::span<const double> r, int p, double dx) {
  return (r[p - 2] - 8.0 * r[p - 1] + 8.0 * r[p + 1] - r[p + 2]) / (12.0 * dx);
}

// The order-4 biased stencil coincides with the centered one for both signs.
inline double upwind4_derivative(double gamma, std::span<const double> r, int p,
                                 double dx) {
  if (gamma == 0.0) return 0.0;
  return centered4_derivative(r, p, dx);
}

namespace detail {

// CWENO3 point reconstruction at the face p+1/2, biased by wind direction.
// from_left uses cells {p-1, p, p+1}, otherwise the mirror from {p, p+1, p+2}.
inline double cweno3_face(std::span<const double> r, int p, bool from_left,
                          double weno_eps, int weno_p) {
  double fm, f0, fp;
  if (from_left) {
    fm = r[p - 1]; f0 = r[p]; fp = r[p + 1];
  } else {
    fm = r[p + 2]; f0 = r[p + 1]; fp = r[p];
  }
  const double PL = 0.5 * (3.0 * f0 - fm);
  const double PR = 0.5 * (f0 + fp);
  const double PC_opt = (-fm + 5.0 * f0 + 2.0 * fp) / 6.0;
  // P_opt = cL PL + cC PC + cR PR with cL = cR = 1/4, cC = 1/2.
  const double PC = 2.0 * PC_opt - 0.5 * (PL + PR);
  const double dL = f0 - fm, dR = fp - f0;
  const double isL = dL * dL;
  const double isR = dR * dR;
  const double d2 = fp - 2.0 * f0 + fm, d1 = fp - fm;
  const double isC = (13.0 / 3.0) * d2 * d2 + 0.25 * d1 * d1;
  auto alpha = [&](double c, double is) {
    return c / std::pow(weno_eps + is, weno_p);
  };
  const double aL = alpha(0.25, isL), aR = alpha(0.25, isR), aC = alpha(0.5, isC);
  const double asum = aL + aR + aC;
  return (aL * PL + aR * PR + aC * PC) / asum;
}

}  // namespace detail

inline double cweno3_derivative(double gamma, std::span<const double> r, int p,
                                double dx, double weno_eps = 1e-6,
                                int weno_p = 2) {
  if (gamma == 0.0) return 0.0;
  const bool from_left = gamma > 0.0;
  const double f_hi = detail::cweno3_face(r, p, from_left, weno_eps, weno_p);
  const double f_lo = detail::cweno3_face(r, p - 1, from_left, weno_eps, weno_p);
  return (f_hi - f_lo) / dx;
}

inline double hyperbolic_derivative(const SchemeSpec& s, double gamma,
                                    std::span<const double> r, int p, double dx) {
  switch (s.hyperbolic) {
    case HyperbolicScheme::Upwind1: return upwind1_derivative(gamma, r, p, dx);
    case HyperbolicScheme::Upwind3: return upwind3_derivative(gamma, r, p, dx);
    case HyperbolicScheme::Upwind4: return upwind4_derivative(gamma, r, p, dx);
    case HyperbolicScheme::Cweno3:
      return cweno3_derivative(gamma, r, p, dx, s.weno_eps, s.weno_p);
  }
  return 0.0;
}

inline double parabolic_derivative(const SchemeSpec& s,
                                   std::span<const double> r, int p, double dx) {
  if (s.parabolic_order == 2) return centered2_derivative(r, p, dx);
  if (s.parabolic_order == 4) return centered4_derivative(r, p, dx);
  throw std::invalid_argument("parabolic_order must be 2 or 4");
}

// Velocities carrying a theta part scale like 1/sqrt(eps); those use the
// centered parabolic stencil, the O(1) hyperbolic ones use the biased scheme.
inline bool is_parabolic_velocity(const KineticModel& m, int l) {
  return l >= m.n_hyperbolic;
}

// Transport part only: out_l = -sum_d gamma_ld d_d f_l. Fills ghosts of f.
inline void transport_rhs(const KineticModel& model, const Grid& grid,
                          const SchemeSpec& scheme, BoundaryRule rule,
                          KineticField& f, KineticField& out) {
  fill_ghosts(f, rule);
  const int G = ghost_width;
  const int K = model.n_components, L = model.n_velocities();
  const double dx = grid.dx();
  for (int l = 0; l < L; ++l) {
    const bool parab = is_parabolic_velocity(model, l);
    for (int k = 0; k < K; ++k) {
      for (int j = 0; j < f.ny; ++j) {
        const auto r = f.row(l, k, j);
        const double gx = model.velocity(l, 0);
        for (int i = 0; i < f.nx; ++i) {
          const int p = i + G;
          double d;
          if (parab)
            d = parabolic_derivative(scheme, r, p, dx);
          else
            d = hyperbolic_derivative(scheme, gx, r, p, dx);
          out.at(l, k, i, j) = -gx * d;
        }
      }
      if (grid.dim == 2) {
        const double gy = model.velocity(l, 1);
        const double dy = grid.dy();
        for (int i = 0; i < f.nx; ++i) {
          // Gather the y-column into a small padded buffer, then reuse the
          // same one-dimensional stencils.
          std::array<double, 2 * ghost_width + 1> col{};
          for (int j = 0; j < f.ny; ++j) {
            for (int t = -G; t <= G; ++t) col[t + G] = f.at(l, k, i, j + t);
            const auto cr = std::span<const double>(col.data(), col.size());
            double d;
            if (parab)
              d = parabolic_derivative(scheme, cr, G, dy);
            else
              d = hyperbolic_derivative(scheme, gy, cr, G, dy);
            out.at(l, k, i, j) -= gy * d;
          }
        }
      }
    }
  }
}

// Adds the BGK collision term (M(u) - f)/eps on interior cells.
inline void add_collision(const KineticModel& model, KineticField& f,
                          KineticField& out) {
  const int K = model.n_components, L = model.n_velocities();
  std::array<double, max_components> u{};
  std::array<double, max_velocities * max_components> m{};
  const double inv_eps = 1.0 / model.epsilon;
  for (int j = 0; j < f.ny; ++j)
    for (int i = 0; i < f.nx; ++i) {
      for (int k = 0; k < K; ++k) {
        double s = 0.0;
        for (int l = 0; l < L; ++l) s += f.at(l, k, i, j);
        u[k] = s;
      }
      model.maxwellian(std::span<const double>(u.data(), K),
                       std::span<double>(m.data(), static_cast<std::size_t>(L) * K));
      for (int l = 0; l < L; ++l)
        for (int k = 0; k < K; ++k)
          out.at(l, k, i, j) += (m[l * K + k] - f.at(l, k, i, j)) * inv_eps;
    }
}

inline void semidiscrete_rhs(const KineticModel& model, const Grid& grid,
                             const SchemeSpec& scheme, BoundaryRule rule,
                             KineticField& f, KineticField& out) {
  transport_rhs(model, grid, scheme, rule, f, out);
  add_collision(model, f, out);
}

}  // namespace pibgk
