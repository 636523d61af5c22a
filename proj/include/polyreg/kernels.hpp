#pragma once

// Cell- and node-parallel assembly kernels. Every kernel exists twice: a
// plain serial reference in kernels::serial and an OpenMP version in
// kernels::omp. Both produce bit-identical output for any thread count: the
// parallel versions only change which thread computes a cell or node, never
// the order in which floating point contributions are combined.

#include <span>
#include <vector>

#include "polyreg/grid.hpp"
#include "polyreg/image.hpp"
#include "polyreg/integrands.hpp"
#include "polyreg/minors.hpp"
#include "polyreg/poly_subgradient.hpp"

namespace polyreg::kernels {

struct FieldView {
  const Domain& domain;
  int dim;
  std::span<const double> values;  // dim per node
};

#define POLYREG_DECLARE_KERNELS                                                              \
  /* dim x 2 Jacobian per cell (inactive cells included). */                                 \
  void cell_jacobians(const FieldView& u, std::vector<SmallMatrix>& out);                    \
  /* F(x_c, u_c, T(J_c)) per cell, 0 on inactive cells. */                                   \
  void energy_densities(const FieldView& u, const Integrand& f, std::span<double> density);  \
  /* Densities as above plus dR/du per node value, R = sum |cell| density. Returns false   */ \
  /* (gradient unspecified) if an active density is not finite.                            */ \
  bool energy_gradient(const FieldView& u, const Integrand& f, std::span<double> density,    \
                       std::span<double> grad);                                              \
  /* out[k] = image(P(u_k)), P the projection onto the closed domain. */                   \
  void warp(const ScalarImage& image, const FieldView& u, std::span<double> out);            \
  /* |cell| (u0.u + u1:J + v2.T2(J)) per cell. */                                           \
  void pairing_densities(const PolySubgradient& w, const FieldView& u, std::span<double> out); \
  /* |cell| (F(v) - F(base) - w-increment) per cell, base = w.base_point. */                  \
  void bregman_densities(const Integrand& f, const PolySubgradient& w, const FieldView& v,    \
                         std::span<double> out);

namespace serial {
POLYREG_DECLARE_KERNELS
}  // namespace serial

namespace omp {
POLYREG_DECLARE_KERNELS
// Threads used by the OpenMP kernels.
int max_threads();
}  // namespace omp

#undef POLYREG_DECLARE_KERNELS

}  // namespace polyreg::kernels
