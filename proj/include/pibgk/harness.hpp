#pragma once

// Measurement harness: error norms against exact solutions, spatial and
// temporal convergence tables, timing benchmarks and balance checks.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "pibgk/core.hpp"
#include "pibgk/csv.hpp"
#include "pibgk/integrate.hpp"
#include "pibgk/problems.hpp"
#include "pibgk/transport.hpp"

namespace pibgk {

struct Norms {
  double l1 = 0.0, l2 = 0.0, linf = 0.0;
};

// Discrete norms of a cell-centered field, volume weighted.
inline Norms field_norms(const MacroField& e, const Grid& g) {
  Norms n;
  const double vol = (g.dim == 2) ? g.dx() * g.dy() : g.dx();
  double s1 = 0.0, s2 = 0.0, si = 0.0;
  for (double v : e.data) {
    const double a = std::abs(v);
    s1 += a;
    s2 += a * a;
    si = std::max(si, a);
  }
  n.l1 = vol * s1;
  n.l2 = std::sqrt(vol * s2);
  n.linf = si;
  return n;
}

inline Norms difference_norms(const MacroField& a, const MacroField& b,
                              const Grid& g) {
  MacroField e = a;
  for (std::size_t n = 0; n < e.data.size(); ++n) e.data[n] -= b.data[n];
  return field_norms(e, g);
}

// Cell averages of the exact solution at time t, third-order Gauss rule.
// Numerical cell values are compared against these so the measurable order
// of the semidiscrete operator is not capped by midpoint sampling.
inline MacroField exact_cell_averages(const Problem& p, const Grid& g, double t) {
  if (!p.exact)
    throw std::invalid_argument("exact_cell_averages: '" + p.name +
                                "' has no exact solution");
  MacroField u(g, p.n_components);
  InitialData at_t = [&p, t](double x, double y, std::span<double> out) {
    (*p.exact)(x, y, t, out);
  };
  cell_average(at_t, g, CellAverage::Gauss3, u);
  return u;
}

struct RunResult {
  MacroField u;
  AdvanceStats stats;
  double seconds = 0.0;
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// Runs fn(0..n-1), optionally spread over threads. Ladder entries are
// independent runs with no shared mutable state, so results are identical to
// the sequential order.
template <class Fn>
void ladder_for(std::size_t n, int n_threads, const Fn& fn) {
  if (n_threads <= 1 || n <= 1) {
    for (std::size_t r = 0; r < n; ++r) fn(r);
    return;
  }
  const int nt = static_cast<int>(std::min<std::size_t>(n_threads, n));
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (int t = 0; t < nt; ++t)
    pool.emplace_back([&, t] {
      for (std::size_t r = t; r < n; r += nt) fn(r);
    });
  for (auto& th : pool) th.join();
}

// Median of three timings of fn(), after one discarded warm-up run.
template <class Fn>
double median_of_three(Fn&& fn) {
  fn();
  double t[3];
  for (int r = 0; r < 3; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    t[r] = seconds_since(t0);
  }
  std::sort(t, t + 3);
  return t[1];
}

}  // namespace detail

// Full projective run of a catalog problem on a given grid. The model is
// rebuilt at par.epsilon so epsilon sweeps reuse one Problem instance.
inline RunResult run_projective(const Problem& p, const Grid& g,
                                const SchemeSpec& scheme,
                                const ProjectiveParams& par, double t_end) {
  const KineticModel model = p.build_model(par.epsilon);
  KineticField f = init_kinetic(
      model, g, p.u0,
      p.discontinuous ? CellAverage::Midpoint : CellAverage::Gauss3);
  auto rhs = [&](KineticField& in, KineticField& out) {
    semidiscrete_rhs(model, g, scheme, p.boundary, in, out);
  };
  const ButcherTableau* tab = (par.order > 1) ? &par.tableau : nullptr;
  RunResult r;
  const auto t0 = std::chrono::steady_clock::now();
  r.stats = projective_advance(rhs, f, 0.0, t_end, par, tab);
  r.seconds = detail::seconds_since(t0);
  r.u = project(f, g);
  return r;
}

struct ConvergenceRow {
  double h = 0.0;  // mesh width or outer step
  Norms error;
  Norms order;  // fitted between this row and the previous one; nan on row 0
  bool plateau = false;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  double plateau_threshold = 0.0;

  void write_csv(const std::string& path) const {
    CsvWriter w(path, {"h", "err_l1", "err_l2", "err_linf", "order_l1",
                       "order_l2", "order_linf", "plateau"});
    for (const auto& r : rows)
      w.row({r.h, r.error.l1, r.error.l2, r.error.linf, r.order.l1, r.order.l2,
             r.order.linf, r.plateau ? 1.0 : 0.0});
  }
};

namespace detail {

inline void fit_orders(ConvergenceTable& t) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    auto& row = t.rows[r];
    row.plateau = row.error.l1 < t.plateau_threshold;
    if (r == 0) {
      row.order = {nan, nan, nan};
      continue;
    }
    const auto& prev = t.rows[r - 1];
    const double lr = std::log(prev.h / row.h);
    row.order.l1 = std::log(prev.error.l1 / row.error.l1) / lr;
    row.order.l2 = std::log(prev.error.l2 / row.error.l2) / lr;
    row.order.linf = std::log(prev.error.linf / row.error.linf) / lr;
  }
}

}  // namespace detail

// Refinement study in space at fixed outer step; errors against the exact
// solution's cell averages. Rows are flagged as plateau once the error sits
// below 10 eps, where the relaxation error floor dominates.
inline ConvergenceTable spatial_convergence(const Problem& p,
                                            const SchemeSpec& scheme,
                                            const std::vector<int>& sizes,
                                            double dt_outer, double eps,
                                            double t_end, int n_inner = 2,
                                            int n_threads = 1) {
  ConvergenceTable t;
  t.plateau_threshold = 10.0 * eps;
  t.rows.resize(sizes.size());
  auto run_one = [&](std::size_t r) {
    const Grid g = make_grid_1d(sizes[r], p.x_lo, p.x_hi);
    ProjectiveParams par;
    par.epsilon = eps;
    par.dt_inner = eps;
    par.n_inner = std::max(n_inner, 2);
    par.dt_outer = dt_outer;
    par.validate();
    const RunResult res = run_projective(p, g, scheme, par, t_end);
    const MacroField ref = exact_cell_averages(p, g, t_end);
    t.rows[r].h = g.dx();
    t.rows[r].error = difference_norms(res.u, ref, g);
  };
  detail::ladder_for(sizes.size(), n_threads, run_one);
  detail::fit_orders(t);
  return t;
}

// Refinement study in the outer step at fixed mesh, self-convergence by
// Richardson pairs: the error charged to step Dt is |u_Dt - u_{Dt/2}| at the
// final time. Runs n_levels + 1 simulations on a halving ladder.
inline ConvergenceTable temporal_convergence(const Problem& p,
                                             const SchemeSpec& scheme, int nx,
                                             double base_dt, int n_levels,
                                             double eps, int order,
                                             double t_end, int n_inner = 2,
                                             int n_threads = 1,
                                             double plateau_threshold = 0.0) {
  if (n_levels < 1)
    throw std::invalid_argument("temporal_convergence: need at least one level");
  const int K = std::max(n_inner, 2);
  const double smallest = base_dt / std::pow(2.0, n_levels);
  if (smallest < (K + 1) * eps * (1.0 + 1e-12))
    throw std::invalid_argument(
        "temporal_convergence: ladder descends below (K+1) inner steps");

  const Grid g = make_grid_1d(nx, p.x_lo, p.x_hi);
  std::vector<MacroField> endpoints(n_levels + 1);
  detail::ladder_for(endpoints.size(), n_threads, [&](std::size_t lev) {
    ProjectiveParams par;
    par.epsilon = eps;
    par.dt_inner = eps;
    par.n_inner = K;
    par.dt_outer = base_dt / std::pow(2.0, static_cast<double>(lev));
    par.order = order;
    if (order > 1) par.tableau = prk_tableau(order);
    par.validate();
    endpoints[lev] = run_projective(p, g, scheme, par, t_end).u;
  });

  // Richardson differences bottom out at a floor mixing the O(eps) inner
  // defect with rounding noise from the eps-sized inner steps; the caller
  // knows the scale, so the threshold is explicit here (0 = never flag).
  ConvergenceTable t;
  t.plateau_threshold = plateau_threshold;
  double dt = base_dt;
  for (int lev = 0; lev < n_levels; ++lev, dt *= 0.5) {
    ConvergenceRow row;
    row.h = dt;
    row.error = difference_norms(endpoints[lev], endpoints[lev + 1], g);
    t.rows.push_back(row);
  }
  detail::fit_orders(t);
  return t;
}

struct SpeedupRow {
  double epsilon = 0.0;
  double dt_outer = 0.0;
  double cpu_direct = 0.0;
  double cpu_pi = 0.0;
  double factor_measured = 0.0;
  double factor_theoretical = 0.0;  // Dt / (dt_inner (K+1))
  long direct_steps = 0;
  bool direct_extrapolated = false;
};

// Wall-clock comparison of projective integration against brute-force inner
// stepping. Direct runs above the step budget are timed on a sample and
// extrapolated linearly, and flagged as such.
inline SpeedupRow speedup_bench(const Problem& p, const SchemeSpec& scheme,
                                double eps, double dt_outer, double t_end,
                                int n_inner = 2,
                                long direct_budget = 100000000L) {
  const int K = std::max(n_inner, 2);
  SpeedupRow row;
  row.epsilon = eps;
  row.dt_outer = dt_outer;
  row.factor_theoretical = dt_outer / (eps * (K + 1));

  const Grid g = p.build_grid();
  const KineticModel model = p.build_model(eps);
  const KineticField f0 = init_kinetic(
      model, g, p.u0,
      p.discontinuous ? CellAverage::Midpoint : CellAverage::Gauss3);
  auto rhs = [&](KineticField& in, KineticField& out) {
    semidiscrete_rhs(model, g, scheme, p.boundary, in, out);
  };

  ProjectiveParams par;
  par.epsilon = eps;
  par.dt_inner = eps;
  par.n_inner = K;
  par.dt_outer = dt_outer;
  par.validate();

  row.cpu_pi = detail::median_of_three([&] {
    KineticField f = f0;
    projective_advance(rhs, f, 0.0, t_end, par);
  });

  row.direct_steps = static_cast<long>(std::ceil(t_end / eps));
  if (row.direct_steps > direct_budget) {
    const long sample = 20000;
    const double t_sample = sample * eps;
    const double cpu_sample = detail::median_of_three([&] {
      KineticField f = f0;
      direct_integrate(rhs, f, 0.0, t_sample, eps);
    });
    row.cpu_direct = cpu_sample * (static_cast<double>(row.direct_steps) / sample);
    row.direct_extrapolated = true;
  } else {
    row.cpu_direct = detail::median_of_three([&] {
      KineticField f = f0;
      direct_integrate(rhs, f, 0.0, t_end, eps);
    });
  }
  row.factor_measured = row.cpu_direct / row.cpu_pi;
  return row;
}

struct ImexRow {
  double epsilon = 0.0;
  double dt_outer = 0.0;
  double cpu_pi = 0.0;
  double cpu_imex = 0.0;
  double l1_distance = 0.0;  // between the two endpoints
};

// Times projective forward Euler against the first-order IMEX comparator at
// the same outer step and reports how far the endpoints drift apart.
inline ImexRow imex_comparison(const Problem& p, const SchemeSpec& scheme,
                               double eps, double dt_outer, double t_end,
                               int n_inner = 2) {
  ImexRow row;
  row.epsilon = eps;
  row.dt_outer = dt_outer;

  const Grid g = p.build_grid();
  const KineticModel model = p.build_model(eps);
  const KineticField f0 = init_kinetic(
      model, g, p.u0,
      p.discontinuous ? CellAverage::Midpoint : CellAverage::Gauss3);
  auto rhs = [&](KineticField& in, KineticField& out) {
    semidiscrete_rhs(model, g, scheme, p.boundary, in, out);
  };

  ProjectiveParams par;
  par.epsilon = eps;
  par.dt_inner = eps;
  par.n_inner = std::max(n_inner, 2);
  par.dt_outer = dt_outer;
  par.validate();

  KineticField f_pi = f0;
  row.cpu_pi = detail::median_of_three([&] {
    f_pi = f0;
    projective_advance(rhs, f_pi, 0.0, t_end, par);
  });
  KineticField f_imex = f0;
  row.cpu_imex = detail::median_of_three([&] {
    f_imex = f0;
    imex_advance(model, g, scheme, p.boundary, f_imex, 0.0, t_end, dt_outer);
  });
  row.l1_distance =
      difference_norms(project(f_pi, g), project(f_imex, g), g).l1;
  return row;
}

// Expected interior mass drift over [0, T] under zero-gradient boundaries
// with constant boundary states: T * (A(u_left) - A(u_right)) per component,
// plus the analogous y-direction contribution in 2D.
inline std::vector<double> boundary_flux_drift(const Problem& p, double T) {
  const int K = p.n_components;
  std::vector<double> drift(K, 0.0);
  std::array<double, max_components> uL{}, uR{}, aL{}, aR{};
  auto span_c = [K](std::array<double, max_components>& a) {
    return std::span<const double>(a.data(), K);
  };
  auto span_m = [K](std::array<double, max_components>& a) {
    return std::span<double>(a.data(), K);
  };
  const double ymid = 0.5 * (p.y_lo + p.y_hi);
  p.u0(p.x_lo, ymid, span_m(uL));
  p.u0(p.x_hi, ymid, span_m(uR));
  p.flux_x(span_c(uL), span_m(aL));
  p.flux_x(span_c(uR), span_m(aR));
  const double ly = (p.dim == 2) ? (p.y_hi - p.y_lo) : 1.0;
  for (int k = 0; k < K; ++k) drift[k] = T * ly * (aL[k] - aR[k]);
  if (p.dim == 2) {
    const double xmid = 0.5 * (p.x_lo + p.x_hi);
    p.u0(xmid, p.y_lo, span_m(uL));
    p.u0(xmid, p.y_hi, span_m(uR));
    p.flux_y(span_c(uL), span_m(aL));
    p.flux_y(span_c(uR), span_m(aR));
    const double lx = p.x_hi - p.x_lo;
    for (int k = 0; k < K; ++k) drift[k] += T * lx * (aL[k] - aR[k]);
  }
  return drift;
}

struct SnapshotResult {
  std::vector<std::string> files;
  MacroField u_final;
  AdvanceStats stats;
};

// Advances through the problem's output times, writing one macroscopic CSV
// snapshot per time into out_dir (created by the caller).
inline SnapshotResult snapshot_run(const Problem& p, const Grid& g,
                                   const SchemeSpec& scheme,
                                   const ProjectiveParams& par,
                                   const std::string& out_dir) {
  std::vector<double> times = p.output_times;
  if (times.empty()) times.push_back(p.t_end);
  std::sort(times.begin(), times.end());

  const KineticModel model = p.build_model(par.epsilon);
  KineticField f = init_kinetic(
      model, g, p.u0,
      p.discontinuous ? CellAverage::Midpoint : CellAverage::Gauss3);
  auto rhs = [&](KineticField& in, KineticField& out) {
    semidiscrete_rhs(model, g, scheme, p.boundary, in, out);
  };
  const ButcherTableau* tab = (par.order > 1) ? &par.tableau : nullptr;

  SnapshotResult res;
  double t = 0.0;
  int idx = 0;
  for (double t_out : times) {
    const AdvanceStats st = projective_advance(rhs, f, t, t_out, par, tab);
    res.stats.outer_steps += st.outer_steps;
    res.stats.inner_steps += st.inner_steps;
    t = t_out;
    res.u_final = project(f, g);
    char tag[32];
    std::snprintf(tag, sizeof tag, "u_%04d.csv", idx++);
    const std::string path = out_dir + "/" + tag;
    write_macro_csv(path, g, res.u_final);
    res.files.push_back(path);
  }
  res.stats.t = t;
  return res;
}

}  // namespace pibgk
