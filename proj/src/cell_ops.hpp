#pragma once

// Per-cell arithmetic shared by the serial and OpenMP kernels. Keeping it in
// one place is what makes the two kernel families bit-identical.

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

#include "polyreg/grid.hpp"
#include "polyreg/integrands.hpp"
#include "polyreg/minors.hpp"
#include "polyreg/poly_subgradient.hpp"

namespace polyreg::kernels::detail {

// Corner order: (0,0), (1,0), (0,1), (1,1) relative to the cell.
using CellCorners = std::array<std::size_t, 4>;
inline constexpr std::array<double, 4> kSignX{-1.0, 1.0, -1.0, 1.0};
inline constexpr std::array<double, 4> kSignY{-1.0, -1.0, 1.0, 1.0};

inline CellCorners cell_corners(const Grid& g, std::size_t c) {
  const int ci = static_cast<int>(c % g.cells_x());
  const int cj = static_cast<int>(c / g.cells_x());
  return {g.node_index(ci, cj), g.node_index(ci + 1, cj), g.node_index(ci, cj + 1),
          g.node_index(ci + 1, cj + 1)};
}

// Q1 cell-center gradient: average of the forward differences on the two
// opposite edges. Exact for affine fields.
inline void cell_jacobian(const Grid& g, int dim, std::span<const double> v, const CellCorners& k,
                          SmallMatrix& j) {
  j.resize(dim, 2);
  const double sx = 0.5 / g.hx();
  const double sy = 0.5 / g.hy();
  for (int r = 0; r < dim; ++r) {
    const double v00 = v[k[0] * dim + r];
    const double v10 = v[k[1] * dim + r];
    const double v01 = v[k[2] * dim + r];
    const double v11 = v[k[3] * dim + r];
    j(r, 0) = ((v10 - v00) + (v11 - v01)) * sx;
    j(r, 1) = ((v01 - v00) + (v11 - v10)) * sy;
  }
}

inline void cell_mean(int dim, std::span<const double> v, const CellCorners& k, SmallVector& out) {
  out.resize(dim);
  for (int r = 0; r < dim; ++r) {
    out[r] = 0.25 * (((v[k[0] * dim + r] + v[k[1] * dim + r]) + v[k[2] * dim + r]) +
                     v[k[3] * dim + r]);
  }
}

struct CellScratch {
  SmallMatrix jac;
  MinorsVec xi;
  SmallVector x;
  SmallVector u;
  IntegrandGradient grad;
};

inline double cell_density(const Grid& g, const Integrand& f, int dim, std::span<const double> v,
                           std::size_t c, CellScratch& s) {
  const CellCorners k = cell_corners(g, c);
  cell_jacobian(g, dim, v, k, s.jac);
  cell_mean(dim, v, k, s.u);
  all_minors_into(f.layout(), s.jac, s.xi);
  s.x = g.cell_center(c);
  return f.eval(s.x, s.u, s.xi);
}

// Contribution of one cell to d(|cell| F)/d(u at each corner), 4 * dim values.
// Returns the density; contributions are left untouched when it is not finite.
inline double cell_gradient(const Grid& g, const Integrand& f, int dim, std::span<const double> v,
                            std::size_t c, CellScratch& s, std::span<double> contrib) {
  const double density = cell_density(g, f, dim, v, c, s);
  if (!std::isfinite(density)) return density;
  f.grad_into(s.x, s.u, s.xi, s.grad);
  const SmallMatrix dj = pull_back_minors_covector(f.layout(), s.jac, s.grad.dxi);
  const double area = g.cell_area();
  const double sx = 0.5 / g.hx();
  const double sy = 0.5 / g.hy();
  for (int corner = 0; corner < 4; ++corner) {
    for (int r = 0; r < dim; ++r) {
      contrib[corner * dim + r] =
          area * (dj(r, 0) * (kSignX[corner] * sx) + dj(r, 1) * (kSignY[corner] * sy) +
                  0.25 * s.grad.du[r]);
    }
  }
  return density;
}

// Value of w's pairing density at one cell, unweighted.
inline double cell_pairing(const Grid& g, const PolySubgradient& w, int dim,
                           std::span<const double> v, std::size_t c, CellScratch& s) {
  const CellCorners k = cell_corners(g, c);
  cell_jacobian(g, dim, v, k, s.jac);
  cell_mean(dim, v, k, s.u);
  SmallVector u0;
  cell_mean(dim, w.u0, k, u0);
  double acc = u0.dot(s.u);
  const int entries = dim * 2;
  for (int r = 0; r < dim; ++r) {
    for (int col = 0; col < 2; ++col) acc += w.u1[c * entries + r * 2 + col] * s.jac(r, col);
  }
  const int tau2 = w.layout.tau2();
  if (tau2 > 0) {
    all_minors_into(w.layout, s.jac, s.xi);
    for (int m = 0; m < tau2; ++m) acc += w.v2[c * tau2 + m] * s.xi[entries + m];
  }
  return acc;
}

// Unweighted Bregman density F(v) - F(u) - [u0.(v - u) + u1:(Jv - Ju) +
// v2.(T2(Jv) - T2(Ju))] at one cell, u = w.base_point.
inline double cell_bregman(const Grid& g, const Integrand& f, const PolySubgradient& w, int dim,
                           std::span<const double> v, std::size_t c, CellScratch& sv,
                           CellScratch& su) {
  const std::span<const double> base = w.base_point.values();
  const double fv = cell_density(g, f, dim, v, c, sv);
  const double fu = cell_density(g, f, dim, base, c, su);
  if (!std::isfinite(fv) || !std::isfinite(fu)) return std::numeric_limits<double>::infinity();
  const CellCorners k = cell_corners(g, c);
  SmallVector u0;
  cell_mean(dim, w.u0, k, u0);
  double lin = u0.dot(sv.u - su.u);
  const int entries = dim * 2;
  for (int r = 0; r < dim; ++r) {
    for (int col = 0; col < 2; ++col) {
      lin += w.u1[c * entries + r * 2 + col] * (sv.jac(r, col) - su.jac(r, col));
    }
  }
  const int tau2 = w.layout.tau2();
  for (int m = 0; m < tau2; ++m) {
    lin += w.v2[c * tau2 + m] * (sv.xi[entries + m] - su.xi[entries + m]);
  }
  return (fv - fu) - lin;
}

}  // namespace polyreg::kernels::detail
