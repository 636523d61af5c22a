#pragma once

// Discrete energies R(u) = sum_cells |cell| F(x_c, u_c, T(J_c)) on a Domain,
// where J_c is the Q1 cell-center Jacobian and u_c the mean of the cell's
// corner values, together with their exact gradients.

#include <span>
#include <vector>

#include "polyreg/field.hpp"
#include "polyreg/integrands.hpp"
#include "polyreg/poly_subgradient.hpp"

namespace polyreg {

enum class Exec { serial, parallel };

struct EnergyValue {
  double value = 0.0;             // +inf when any active density is +inf
  std::vector<double> densities;  // F per cell, 0 on inactive cells
  bool finite() const noexcept;
};

std::vector<SmallMatrix> discrete_jacobian(const MatrixField& u, Exec exec = Exec::parallel);

EnergyValue energy(const MatrixField& u, const Integrand& f, Exec exec = Exec::parallel);

// dR/du, laid out like u.values(). Throws UndefinedGradientError at infinite
// energy.
std::vector<double> energy_gradient(const MatrixField& u, const Integrand& f,
                                    Exec exec = Exec::parallel);

// R(u) and dR/du in one pass; `grad` must have u.values().size() entries.
double energy_and_gradient(const MatrixField& u, const Integrand& f, std::span<double> grad,
                           Exec exec = Exec::parallel);

// w(u). Throws DomainError if w and u do not share a layout and grid.
double pairing(const PolySubgradient& w, const MatrixField& u, Exec exec = Exec::parallel);

// (sum |cell| (|u_c|^p + |J_c|^p))^{1/p} over active cells.
double sobolev_norm(const MatrixField& u, double p);

// Throws DomainError unless the integrand's layout is (u.dim() x 2).
void check_compatible(const MatrixField& u, const Integrand& f);

}  // namespace polyreg
