#pragma once

// Projective time integration: inner forward Euler relaxation, projective
// forward Euler and projective Runge-Kutta outer steps, plus a direct
// forward Euler reference and a first-order IMEX comparator.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "pibgk/core.hpp"
#include "pibgk/transport.hpp"

namespace pibgk {

struct TableauError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct IntegrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ButcherTableau {
  std::string name;
  std::vector<double> c;
  std::vector<std::vector<double>> a;  // strictly lower triangular
  std::vector<double> b;

  int stages() const { return static_cast<int>(b.size()); }

  void validate() const {
    const int S = stages();
    if (static_cast<int>(c.size()) != S || static_cast<int>(a.size()) != S)
      throw TableauError(name + ": inconsistent tableau sizes");
    double bs = 0.0;
    for (double v : b) bs += v;
    if (std::abs(bs - 1.0) > 1e-14)
      throw TableauError(name + ": weights must sum to 1");
    if (c[0] != 0.0) throw TableauError(name + ": c1 must be 0");
    for (int s = 0; s < S; ++s) {
      if (static_cast<int>(a[s].size()) != s)
        throw TableauError(name + ": a must be strictly lower triangular");
      double rs = 0.0;
      for (int l = 0; l < s; ++l) {
        rs += a[s][l];
        if (a[s][l] < 0.0 || a[s][l] > c[s] + 1e-14)
          throw TableauError(name + ": need 0 <= a_sl <= c_s");
      }
      if (std::abs(rs - c[s]) > 1e-14)
        throw TableauError(name + ": row sums must equal c");
      if (s >= 1 && c[s] <= 0.0)
        throw TableauError(name + ": abscissae after the first must be positive");
    }
  }
};

inline ButcherTableau rk2_heun() {
  ButcherTableau t;
  t.name = "rk2_heun";
  t.c = {0.0, 1.0};
  t.a = {{}, {1.0}};
  t.b = {0.5, 0.5};
  t.validate();
  return t;
}

inline ButcherTableau rk3_ssp() {
  ButcherTableau t;
  t.name = "rk3_ssp";
  t.c = {0.0, 1.0, 0.5};
  t.a = {{}, {1.0}, {0.25, 0.25}};
  t.b = {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0};
  t.validate();
  return t;
}

inline ButcherTableau rk4_classical() {
  ButcherTableau t;
  t.name = "rk4_classical";
  t.c = {0.0, 0.5, 0.5, 1.0};
  t.a = {{}, {0.5}, {0.0, 0.5}, {0.0, 0.0, 1.0}};
  t.b = {1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0};
  t.validate();
  return t;
}

inline ButcherTableau prk_tableau(int order) {
  switch (order) {
    case 2: return rk2_heun();
    case 3: return rk3_ssp();
    case 4: return rk4_classical();
  }
  throw TableauError("prk order must be 2, 3 or 4");
}

struct ProjectiveParams {
  double epsilon = 0.0;
  double dt_inner = 0.0;  // relaxation step, defaults to eps
  int n_inner = 2;        // K inner steps before the extrapolation pair
  double dt_outer = 0.0;
  double cfl_C = 0.0;
  int order = 1;  // 1 = PFE, 2..4 = PRK
  ButcherTableau tableau;

  double extrapolation_M() const {
    return dt_outer / dt_inner - (n_inner + 1);
  }
  void validate() const {
    if (!(dt_inner > 0.0))
      throw IntegrationError("projective params: inner step must be positive");
    if (extrapolation_M() < 0.0)
      throw IntegrationError(
          "projective params: outer step below (K+1) inner steps; reduce K or "
          "integrate directly");
  }
};

// Default selection: inner step eps, K at least 2, outer step from the
// parabolic CFL number cfl_C applied to the finest mesh width.
inline ProjectiveParams select_parameters(const KineticModel& model,
                                          const Grid& grid, double cfl_C,
                                          int n_inner = 2, int order = 1) {
  ProjectiveParams p;
  p.epsilon = model.epsilon;
  p.dt_inner = model.epsilon;
  p.n_inner = std::max(n_inner, 2);
  p.cfl_C = cfl_C;
  const double h = (grid.dim == 2) ? std::min(grid.dx(), grid.dy()) : grid.dx();
  p.dt_outer = cfl_C * h * h;
  p.order = order;
  if (order > 1) p.tableau = prk_tableau(order);
  p.validate();
  return p;
}

// Vector-space glue for scalar test states.
inline void axpy(std::complex<double>& y, double a, const std::complex<double>& x) {
  y += a * x;
}
inline void axpy(double& y, double a, const double& x) { y += a * x; }
inline bool state_is_finite(const std::complex<double>& f) {
  return std::isfinite(f.real()) && std::isfinite(f.imag());
}
inline bool state_is_finite(const double& f) { return std::isfinite(f); }
inline bool state_is_finite(const KineticField& f) { return !has_non_finite(f); }

template <class State, class Rhs>
void inner_euler_step(const Rhs& rhs, State& f, State& work, double dt) {
  rhs(f, work);
  axpy(f, dt, work);
}

// One projective forward Euler step over dt_outer. Runs n_inner + 1 inner
// steps and extrapolates over the remaining M * dt_inner.
template <class State, class Rhs>
void pfe_step(const Rhs& rhs, State& f, const ProjectiveParams& p) {
  p.validate();
  State work = f, prev = f;
  for (int k = 0; k < p.n_inner; ++k) inner_euler_step(rhs, f, work, p.dt_inner);
  prev = f;
  inner_euler_step(rhs, f, work, p.dt_inner);
  const double M = p.dt_outer / p.dt_inner - (p.n_inner + 1);
  // f <- f + M (f - prev)
  State diff = f;
  axpy(diff, -1.0, prev);
  axpy(f, M, diff);
}

// One projective Runge-Kutta step. Each stage estimate k_s is the slope of
// the last inner relaxation pair started from the extrapolated stage seed.
template <class State, class Rhs>
void prk_step(const Rhs& rhs, State& f, const ProjectiveParams& p,
              const ButcherTableau& tab) {
  p.validate();
  tab.validate();
  const int S = tab.stages();
  const double dt = p.dt_inner;
  const double Dt = p.dt_outer;
  const int K = p.n_inner;

  State work = f, prev = f, stage = f;
  std::vector<State> ks;
  ks.reserve(S);

  // Stage 1 runs from f itself; its endpoint seeds every later stage.
  for (int k = 0; k < K; ++k) inner_euler_step(rhs, f, work, dt);
  prev = f;
  inner_euler_step(rhs, f, work, dt);
  State k1 = f;
  axpy(k1, -1.0, prev);
  axpy(k1, 1.0 / dt - 1.0, k1);  // k1 = (end - prev)/dt
  ks.push_back(k1);
  const State& base = f;  // f^{n, K+1}

  for (int s = 1; s < S; ++s) {
    stage = base;
    const double Ms = tab.c[s] * Dt - (K + 1) * dt;
    for (int l = 0; l < s; ++l)
      axpy(stage, Ms * tab.a[s][l] / tab.c[s], ks[l]);
    for (int k = 0; k < K; ++k) inner_euler_step(rhs, stage, work, dt);
    prev = stage;
    inner_euler_step(rhs, stage, work, dt);
    State kq = stage;
    axpy(kq, -1.0, prev);
    axpy(kq, 1.0 / dt - 1.0, kq);
    ks.push_back(kq);
  }

  const double Mc = Dt - (K + 1) * dt;
  for (int s = 0; s < S; ++s) axpy(f, Mc * tab.b[s], ks[s]);
}

struct AdvanceStats {
  long outer_steps = 0;
  long inner_steps = 0;
  double t = 0.0;
};

// Advances f from t0 to t_end with outer steps dt_outer, shortening the
// final step. When the remaining time cannot hold an extrapolated step the
// tail is finished with plain inner relaxation steps.
template <class State, class Rhs>
AdvanceStats projective_advance(const Rhs& rhs, State& f, double t0, double t_end,
                                ProjectiveParams p,
                                const ButcherTableau* tab = nullptr) {
  AdvanceStats st;
  st.t = t0;
  State work = f;
  const double tiny = 1e-14 * std::max(1.0, std::abs(t_end));
  while (st.t < t_end - tiny) {
    const double remaining = t_end - st.t;
    if (remaining >= (p.n_inner + 1) * p.dt_inner * (1.0 + 1e-12)) {
      ProjectiveParams q = p;
      q.dt_outer = std::min(p.dt_outer, remaining);
      if (tab)
        prk_step(rhs, f, q, *tab);
      else
        pfe_step(rhs, f, q);
      st.t += q.dt_outer;
      st.inner_steps += (tab ? tab->stages() : 1) * (p.n_inner + 1);
    } else {
      const double dt = std::min(p.dt_inner, remaining);
      inner_euler_step(rhs, f, work, dt);
      st.t += dt;
      st.inner_steps += 1;
    }
    ++st.outer_steps;
    if (!state_is_finite(f))
      throw IntegrationError("projective_advance: non-finite state after step " +
                             std::to_string(st.outer_steps) + " at t=" +
                             std::to_string(st.t));
  }
  st.t = t_end;
  return st;
}

// Plain forward Euler with the inner step everywhere; the brute-force
// reference the projective schemes are measured against.
template <class State, class Rhs>
AdvanceStats direct_integrate(const Rhs& rhs, State& f, double t0, double t_end,
                              double dt, long max_steps = 2000000000L) {
  AdvanceStats st;
  st.t = t0;
  State work = f;
  const double tiny = 1e-14 * std::max(1.0, std::abs(t_end));
  while (st.t < t_end - tiny) {
    const double h = std::min(dt, t_end - st.t);
    inner_euler_step(rhs, f, work, h);
    st.t += h;
    ++st.inner_steps;
    ++st.outer_steps;
    if (st.inner_steps > max_steps)
      throw IntegrationError("direct_integrate: step budget exceeded");
    if (!state_is_finite(f))
      throw IntegrationError("direct_integrate: non-finite state at t=" +
                             std::to_string(st.t));
  }
  st.t = t_end;
  return st;
}

// First-order IMEX comparator: explicit transport, implicit relaxation,
// taken directly at the outer step size.
inline void imex1_step(const KineticModel& model, const Grid& grid,
                       const SchemeSpec& scheme, BoundaryRule rule,
                       KineticField& f, double Dt, KineticField& work,
                       MacroField& u_work) {
  transport_rhs(model, grid, scheme, rule, f, work);
  axpy(f, Dt, work);  // f* = f - Dt Phi(f)
  project(f, u_work);
  const double r = Dt / model.epsilon;
  const int K = model.n_components, L = model.n_velocities();
  std::array<double, max_components> u{};
  std::array<double, max_velocities * max_components> m{};
  for (int j = 0; j < f.ny; ++j)
    for (int i = 0; i < f.nx; ++i) {
      for (int k = 0; k < K; ++k) u[k] = u_work.at(k, i, j);
      model.maxwellian(std::span<const double>(u.data(), K),
                       std::span<double>(m.data(), static_cast<std::size_t>(L) * K));
      for (int l = 0; l < L; ++l)
        for (int k = 0; k < K; ++k)
          f.at(l, k, i, j) = (f.at(l, k, i, j) + r * m[l * K + k]) / (1.0 + r);
    }
}

inline AdvanceStats imex_advance(const KineticModel& model, const Grid& grid,
                                 const SchemeSpec& scheme, BoundaryRule rule,
                                 KineticField& f, double t0, double t_end,
                                 double Dt) {
  AdvanceStats st;
  st.t = t0;
  KineticField work = f;
  MacroField u_work;
  u_work.nx = f.nx;
  u_work.ny = f.ny;
  u_work.n_components = f.n_components;
  u_work.data.assign(static_cast<std::size_t>(f.nx) * f.ny * f.n_components, 0.0);
  const double tiny = 1e-14 * std::max(1.0, std::abs(t_end));
  while (st.t < t_end - tiny) {
    const double h = std::min(Dt, t_end - st.t);
    imex1_step(model, grid, scheme, rule, f, h, work, u_work);
    st.t += h;
    ++st.outer_steps;
    if (!state_is_finite(f))
      throw IntegrationError("imex_advance: non-finite state at t=" +
                             std::to_string(st.t));
  }
  st.t = t_end;
  return st;
}

}  // namespace pibgk
