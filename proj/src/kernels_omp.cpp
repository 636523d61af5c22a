#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cmath>

#include "cell_ops.hpp"
#include "polyreg/kernels.hpp"

namespace polyreg::kernels::omp {

using detail::CellScratch;

int max_threads() { return omp_get_max_threads(); }

void cell_jacobians(const FieldView& u, std::vector<SmallMatrix>& out) {
  const Grid& g = u.domain.grid();
  const auto cells = static_cast<std::ptrdiff_t>(g.num_cells());
  out.resize(g.num_cells());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < cells; ++c) {
    detail::cell_jacobian(g, u.dim, u.values, detail::cell_corners(g, c), out[c]);
  }
}

void energy_densities(const FieldView& u, const Integrand& f, std::span<double> density) {
  const Grid& g = u.domain.grid();
  const auto cells = static_cast<std::ptrdiff_t>(g.num_cells());
#pragma omp parallel
  {
    CellScratch s;
#pragma omp for schedule(static)
    for (std::ptrdiff_t c = 0; c < cells; ++c) {
      density[c] =
          u.domain.cell_active(c) ? detail::cell_density(g, f, u.dim, u.values, c, s) : 0.0;
    }
  }
}

bool energy_gradient(const FieldView& u, const Integrand& f, std::span<double> density,
                     std::span<double> grad) {
  const Grid& g = u.domain.grid();
  const int dim = u.dim;
  const auto cells = static_cast<std::ptrdiff_t>(g.num_cells());
  const std::size_t stride = 4 * static_cast<std::size_t>(dim);
  std::vector<double> contrib(g.num_cells() * stride, 0.0);
  int finite = 1;

  // Cell pass: per-cell corner contributions into private slots.
#pragma omp parallel reduction(&& : finite)
  {
    CellScratch s;
#pragma omp for schedule(static)
    for (std::ptrdiff_t c = 0; c < cells; ++c) {
      if (!u.domain.cell_active(c)) {
        density[c] = 0.0;
        continue;
      }
      density[c] = detail::cell_gradient(g, f, dim, u.values, c, s,
                                         std::span<double>(contrib).subspan(c * stride, stride));
      if (!std::isfinite(density[c])) finite = 0;
    }
  }

  // Node pass: gather from the up to four neighbouring cells in ascending
  // cell order, which is the order the serial scatter adds them in.
  const int nx = g.nx();
  const auto nodes = static_cast<std::ptrdiff_t>(g.num_nodes());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < nodes; ++k) {
    const int i = static_cast<int>(k % nx);
    const int j = static_cast<int>(k / nx);
    for (int r = 0; r < dim; ++r) grad[k * dim + r] = 0.0;
    // (cell offset, corner of this node inside that cell)
    constexpr int kNeighbours[4][3] = {{-1, -1, 3}, {0, -1, 2}, {-1, 0, 1}, {0, 0, 0}};
    for (const auto& nb : kNeighbours) {
      const int ci = i + nb[0];
      const int cj = j + nb[1];
      if (ci < 0 || cj < 0 || ci >= g.cells_x() || cj >= g.cells_y()) continue;
      const std::size_t c = g.cell_index(ci, cj);
      if (!u.domain.cell_active(c) || !std::isfinite(density[c])) continue;
      for (int r = 0; r < dim; ++r) grad[k * dim + r] += contrib[c * stride + nb[2] * dim + r];
    }
  }
  return finite != 0;
}

void warp(const ScalarImage& image, const FieldView& u, std::span<double> out) {
  const auto nodes = static_cast<std::ptrdiff_t>(u.domain.grid().num_nodes());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < nodes; ++k) {
    const Point p(u.values[k * u.dim], u.values[k * u.dim + 1]);
    out[k] = image.sample(u.domain.project(p));
  }
}

void pairing_densities(const PolySubgradient& w, const FieldView& u, std::span<double> out) {
  const Grid& g = u.domain.grid();
  const auto cells = static_cast<std::ptrdiff_t>(g.num_cells());
#pragma omp parallel
  {
    CellScratch s;
#pragma omp for schedule(static)
    for (std::ptrdiff_t c = 0; c < cells; ++c) {
      out[c] = u.domain.cell_active(c)
                   ? g.cell_area() * detail::cell_pairing(g, w, u.dim, u.values, c, s)
                   : 0.0;
    }
  }
}

void bregman_densities(const Integrand& f, const PolySubgradient& w, const FieldView& v,
                       std::span<double> out) {
  const Grid& g = v.domain.grid();
  const auto cells = static_cast<std::ptrdiff_t>(g.num_cells());
#pragma omp parallel
  {
    CellScratch sv, su;
#pragma omp for schedule(static)
    for (std::ptrdiff_t c = 0; c < cells; ++c) {
      out[c] = v.domain.cell_active(c)
                   ? g.cell_area() * detail::cell_bregman(g, f, w, v.dim, v.values, c, sv, su)
                   : 0.0;
    }
  }
}

}  // namespace polyreg::kernels::omp
