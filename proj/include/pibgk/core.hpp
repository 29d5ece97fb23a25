#pragma once

// Uniform grids, macroscopic and kinetic fields, boundary handling and
// kinetic initialization.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "pibgk/model.hpp"

namespace pibgk {

inline constexpr int ghost_width = 3;

enum class BoundaryRule { Periodic, ZeroGradient };

inline const char* to_string(BoundaryRule r) {
  return r == BoundaryRule::Periodic ? "periodic" : "zero_gradient";
}

struct Grid {
  int dim = 1;
  int nx = 0, ny = 1;
  double x_lo = 0.0, x_hi = 1.0;
  double y_lo = 0.0, y_hi = 1.0;

  double dx() const { return (x_hi - x_lo) / nx; }
  double dy() const { return (y_hi - y_lo) / ny; }
  double x_center(int i) const { return x_lo + (i + 0.5) * dx(); }
  double y_center(int j) const { return y_lo + (j + 0.5) * dy(); }
  long n_cells() const { return static_cast<long>(nx) * ny; }
};

inline Grid make_grid_1d(int nx, double x_lo, double x_hi) {
  // The widest stencil needs 3 ghost layers per side.
  if (nx < 7 || !(x_hi > x_lo)) throw std::invalid_argument("bad 1d grid");
  Grid g;
  g.dim = 1;
  g.nx = nx;
  g.x_lo = x_lo;
  g.x_hi = x_hi;
  return g;
}

inline Grid make_grid_2d(int nx, int ny, double x_lo, double x_hi, double y_lo,
                         double y_hi) {
  if (nx < 7 || ny < 7 || !(x_hi > x_lo) || !(y_hi > y_lo))
    throw std::invalid_argument("bad 2d grid");
  Grid g;
  g.dim = 2;
  g.nx = nx;
  g.ny = ny;
  g.x_lo = x_lo;
  g.x_hi = x_hi;
  g.y_lo = y_lo;
  g.y_hi = y_hi;
  return g;
}

// Cell-centered macroscopic field, interior cells only. Layout: component-major
// rows, u(k, i, j) = data[(k*ny + j)*nx + i].
struct MacroField {
  int nx = 0, ny = 1, n_components = 1;
  std::vector<double> data;

  MacroField() = default;
  MacroField(const Grid& g, int K)
      : nx(g.nx), ny(g.ny), n_components(K),
        data(static_cast<std::size_t>(K) * g.nx * g.ny, 0.0) {}

  double& at(int k, int i, int j = 0) {
    return data[(static_cast<std::size_t>(k) * ny + j) * nx + i];
  }
  double at(int k, int i, int j = 0) const {
    return data[(static_cast<std::size_t>(k) * ny + j) * nx + i];
  }
};

// Kinetic field with ghost layers on every side. Layout keeps each (l, k, j)
// x-row contiguous: f(l, k, i, j) = data[((l*K + k)*py + j+G)*px + i+G].
struct KineticField {
  int nx = 0, ny = 1, n_velocities = 0, n_components = 1, dim = 1;
  std::vector<double> data;

  KineticField() = default;
  KineticField(const Grid& g, int L, int K)
      : nx(g.nx), ny(g.ny), n_velocities(L), n_components(K), dim(g.dim) {
    const std::size_t py = (dim == 2) ? ny + 2 * ghost_width : 1;
    data.assign(static_cast<std::size_t>(L) * K * py * (nx + 2 * ghost_width), 0.0);
  }

  int padded_x() const { return nx + 2 * ghost_width; }
  int padded_y() const { return dim == 2 ? ny + 2 * ghost_width : 1; }

  std::size_t index(int l, int k, int i, int j = 0) const {
    const int jj = (dim == 2) ? j + ghost_width : 0;
    return ((static_cast<std::size_t>(l) * n_components + k) * padded_y() + jj) *
               padded_x() +
           (i + ghost_width);
  }
  double& at(int l, int k, int i, int j = 0) { return data[index(l, k, i, j)]; }
  double at(int l, int k, int i, int j = 0) const { return data[index(l, k, i, j)]; }

  // Contiguous padded x-row for (l, k, j); element [ghost_width] is cell 0.
  std::span<double> row(int l, int k, int j = 0) {
    return {data.data() + index(l, k, -ghost_width, j),
            static_cast<std::size_t>(padded_x())};
  }
  std::span<const double> row(int l, int k, int j = 0) const {
    return {data.data() + index(l, k, -ghost_width, j),
            static_cast<std::size_t>(padded_x())};
  }
};

// Vector-space helpers used by the time integrators.
inline void axpy(KineticField& y, double a, const KineticField& x) {
  for (std::size_t n = 0; n < y.data.size(); ++n) y.data[n] += a * x.data[n];
}
inline void scale(KineticField& y, double a) {
  for (double& v : y.data) v *= a;
}
inline bool has_non_finite(const KineticField& f) {
  for (double v : f.data)
    if (!std::isfinite(v)) return true;
  return false;
}

inline void project(const KineticField& f, MacroField& u) {
  const int K = f.n_components;
  for (int k = 0; k < K; ++k)
    for (int j = 0; j < f.ny; ++j)
      for (int i = 0; i < f.nx; ++i) {
        double s = 0.0;
        for (int l = 0; l < f.n_velocities; ++l) s += f.at(l, k, i, j);
        u.at(k, i, j) = s;
      }
}

inline MacroField project(const KineticField& f, const Grid& g) {
  MacroField u(g, f.n_components);
  project(f, u);
  return u;
}

inline void fill_ghosts(KineticField& f, BoundaryRule rule) {
  const int G = ghost_width;
  for (int l = 0; l < f.n_velocities; ++l)
    for (int k = 0; k < f.n_components; ++k) {
      const int jmax = (f.dim == 2) ? f.ny : 1;
      for (int j = 0; j < jmax; ++j) {
        auto r = f.row(l, k, j);
        for (int g = 0; g < G; ++g) {
          if (rule == BoundaryRule::Periodic) {
            r[G - 1 - g] = r[G + f.nx - 1 - g];
            r[G + f.nx + g] = r[G + g];
          } else {
            r[G - 1 - g] = r[G];
            r[G + f.nx + g] = r[G + f.nx - 1];
          }
        }
      }
      if (f.dim == 2) {
        // y-direction ghosts, including corners (copy whole padded rows).
        for (int g = 0; g < G; ++g) {
          const int j_lo = -1 - g, j_hi = f.ny + g;
          const int src_lo = (rule == BoundaryRule::Periodic) ? f.ny - 1 - g : 0;
          const int src_hi = (rule == BoundaryRule::Periodic) ? g : f.ny - 1;
          auto dst_lo = f.row(l, k, j_lo);
          auto dst_hi = f.row(l, k, j_hi);
          auto s_lo = f.row(l, k, src_lo);
          auto s_hi = f.row(l, k, src_hi);
          for (int i = 0; i < f.padded_x(); ++i) {
            dst_lo[i] = s_lo[i];
            dst_hi[i] = s_hi[i];
          }
        }
      }
    }
}

// Initial macroscopic data evaluated at a point; writes K components.
using InitialData = std::function<void(double x, double y, std::span<double>)>;

// Cell averaging for initialization: 3-point Gauss for smooth data,
// midpoint for discontinuous data.
enum class CellAverage { Gauss3, Midpoint };

inline void cell_average(const InitialData& u0, const Grid& g, CellAverage mode,
                         MacroField& u) {
  const int K = u.n_components;
  std::array<double, max_components> val{}, acc{};
  // Gauss-Legendre nodes on [-1/2, 1/2] and weights summing to 1.
  const double q = 0.5 * std::sqrt(3.0 / 5.0);
  const double node[3] = {-q, 0.0, q};
  const double wt[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
  const int npt = (mode == CellAverage::Gauss3) ? 3 : 1;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      for (int k = 0; k < K; ++k) acc[k] = 0.0;
      for (int a = 0; a < npt; ++a) {
        const double x = (mode == CellAverage::Gauss3)
                             ? g.x_center(i) + node[a] * g.dx()
                             : g.x_center(i);
        const int npy = (g.dim == 2) ? npt : 1;
        for (int b = 0; b < npy; ++b) {
          const double y = (g.dim == 2)
                               ? ((mode == CellAverage::Gauss3)
                                      ? g.y_center(j) + node[b] * g.dy()
                                      : g.y_center(j))
                               : 0.0;
          u0(x, y, std::span<double>(val.data(), K));
          const double w = (mode == CellAverage::Gauss3)
                               ? wt[a] * ((g.dim == 2) ? wt[b] : 1.0)
                               : 1.0;
          for (int k = 0; k < K; ++k) acc[k] += w * val[k];
        }
      }
      for (int k = 0; k < K; ++k) {
        if (!std::isfinite(acc[k]))
          throw std::invalid_argument("cell_average: initial data is not finite");
        u.at(k, i, j) = acc[k];
      }
    }
}

// Maxwellian initialization f(0) = M(eps, u0) cell by cell.
inline void set_maxwellian(const KineticModel& model, const MacroField& u,
                           KineticField& f) {
  const int K = model.n_components, L = model.n_velocities();
  std::array<double, max_components> uc{};
  std::array<double, max_velocities * max_components> m{};
  for (int j = 0; j < f.ny; ++j)
    for (int i = 0; i < f.nx; ++i) {
      for (int k = 0; k < K; ++k) uc[k] = u.at(k, i, j);
      model.maxwellian(std::span<const double>(uc.data(), K),
                       std::span<double>(m.data(), static_cast<std::size_t>(L) * K));
      for (int l = 0; l < L; ++l)
        for (int k = 0; k < K; ++k) f.at(l, k, i, j) = m[l * K + k];
    }
}

inline KineticField init_kinetic(const KineticModel& model, const Grid& g,
                                 const InitialData& u0,
                                 CellAverage mode = CellAverage::Gauss3) {
  MacroField u(g, model.n_components);
  cell_average(u0, g, mode, u);
  KineticField f(g, model.n_velocities(), model.n_components);
  set_maxwellian(model, u, f);
  return f;
}

// Interior totals, cell-volume weighted: one value per component.
inline std::vector<double> total_mass(const MacroField& u, const Grid& g) {
  std::vector<double> m(u.n_components, 0.0);
  const double vol = (g.dim == 2) ? g.dx() * g.dy() : g.dx();
  for (int k = 0; k < u.n_components; ++k) {
    double s = 0.0;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) s += u.at(k, i, j);
    m[k] = vol * s;
  }
  return m;
}

inline std::vector<double> total_mass(const KineticField& f, const Grid& g) {
  MacroField u(g, f.n_components);
  project(f, u);
  return total_mass(u, g);
}

}  // namespace pibgk
