#include <algorithm>
#include <cmath>

#include "cell_ops.hpp"
#include "polyreg/kernels.hpp"

namespace polyreg::kernels::serial {

using detail::CellScratch;

void cell_jacobians(const FieldView& u, std::vector<SmallMatrix>& out) {
  const Grid& g = u.domain.grid();
  out.resize(g.num_cells());
  for (std::size_t c = 0; c < g.num_cells(); ++c) {
    detail::cell_jacobian(g, u.dim, u.values, detail::cell_corners(g, c), out[c]);
  }
}

void energy_densities(const FieldView& u, const Integrand& f, std::span<double> density) {
  const Grid& g = u.domain.grid();
  CellScratch s;
  for (std::size_t c = 0; c < g.num_cells(); ++c) {
    density[c] = u.domain.cell_active(c) ? detail::cell_density(g, f, u.dim, u.values, c, s) : 0.0;
  }
}

bool energy_gradient(const FieldView& u, const Integrand& f, std::span<double> density,
                     std::span<double> grad) {
  const Grid& g = u.domain.grid();
  const int dim = u.dim;
  std::fill(grad.begin(), grad.end(), 0.0);
  std::vector<double> contrib(4 * dim);
  CellScratch s;
  bool finite = true;
  for (std::size_t c = 0; c < g.num_cells(); ++c) {
    if (!u.domain.cell_active(c)) {
      density[c] = 0.0;
      continue;
    }
    density[c] = detail::cell_gradient(g, f, dim, u.values, c, s, contrib);
    if (!std::isfinite(density[c])) {
      finite = false;
      continue;
    }
    const detail::CellCorners k = detail::cell_corners(g, c);
    for (int corner = 0; corner < 4; ++corner) {
      for (int r = 0; r < dim; ++r) grad[k[corner] * dim + r] += contrib[corner * dim + r];
    }
  }
  return finite;
}

void warp(const ScalarImage& image, const FieldView& u, std::span<double> out) {
  const std::size_t nodes = u.domain.grid().num_nodes();
  for (std::size_t k = 0; k < nodes; ++k) {
    const Point p(u.values[k * u.dim], u.values[k * u.dim + 1]);
    out[k] = image.sample(u.domain.project(p));
  }
}

void pairing_densities(const PolySubgradient& w, const FieldView& u, std::span<double> out) {
  const Grid& g = u.domain.grid();
  CellScratch s;
  for (std::size_t c = 0; c < g.num_cells(); ++c) {
    out[c] = u.domain.cell_active(c)
                 ? g.cell_area() * detail::cell_pairing(g, w, u.dim, u.values, c, s)
                 : 0.0;
  }
}

void bregman_densities(const Integrand& f, const PolySubgradient& w, const FieldView& v,
                       std::span<double> out) {
  const Grid& g = v.domain.grid();
  CellScratch sv, su;
  for (std::size_t c = 0; c < g.num_cells(); ++c) {
    out[c] = v.domain.cell_active(c)
                 ? g.cell_area() * detail::cell_bregman(g, f, w, v.dim, v.values, c, sv, su)
                 : 0.0;
  }
}

}  // namespace polyreg::kernels::serial
