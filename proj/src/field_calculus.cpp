#include "polyreg/field_calculus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "polyreg/errors.hpp"
#include "polyreg/kernels.hpp"
#include "polyreg/reduction.hpp"

namespace polyreg {

// ---- MatrixField ------------------------------------------------------------

MatrixField::MatrixField(std::shared_ptr<const Domain> domain, int dim)
    : MatrixField(domain, dim, std::vector<double>(domain->grid().num_nodes() * dim, 0.0)) {}

MatrixField::MatrixField(std::shared_ptr<const Domain> domain, int dim, std::vector<double> values)
    : domain_(std::move(domain)), dim_(dim), values_(std::move(values)) {
  if (dim < 1 || dim > kMaxDim) throw DomainError("field dimension must be 1..3");
  if (values_.size() != domain_->grid().num_nodes() * static_cast<std::size_t>(dim)) {
    throw DomainError("field has " + std::to_string(values_.size()) + " values, expected " +
                      std::to_string(domain_->grid().num_nodes() * dim));
  }
}

MatrixField MatrixField::from_function(std::shared_ptr<const Domain> domain, int dim,
                                       const std::function<SmallVector(const Point&)>& fn) {
  MatrixField u(std::move(domain), dim);
  for (std::size_t k = 0; k < u.num_nodes(); ++k) u.set_value(k, fn(u.grid().node(k)));
  return u;
}

MatrixField MatrixField::identity(std::shared_ptr<const Domain> domain) {
  return from_function(std::move(domain), 2, [](const Point& x) { return SmallVector(x); });
}

SmallVector MatrixField::value(std::size_t k) const {
  SmallVector v(dim_);
  for (int r = 0; r < dim_; ++r) v[r] = values_[k * dim_ + r];
  return v;
}

void MatrixField::set_value(std::size_t k, const SmallVector& v) {
  for (int r = 0; r < dim_; ++r) values_[k * dim_ + r] = v[r];
}

PolySubgradient PolySubgradient::zero(const MatrixField& base, double base_energy) {
  const MinorsLayout layout = base.layout();
  const Grid& g = base.grid();
  return PolySubgradient{layout,
                         std::vector<double>(g.num_nodes() * layout.rows(), 0.0),
                         std::vector<double>(g.num_cells() * layout.rows() * 2, 0.0),
                         std::vector<double>(g.num_cells() * layout.tau2(), 0.0),
                         base,
                         base_energy};
}

bool PolySubgradient::classical() const {
  return std::all_of(v2.begin(), v2.end(), [](double x) { return x == 0.0; });
}

// ---- energies ---------------------------------------------------------------

namespace {

kernels::FieldView view(const MatrixField& u) { return {u.domain(), u.dim(), u.values()}; }

double weighted_sum(const Grid& g, const std::vector<double>& densities) {
  std::vector<double> weighted(densities.size());
  for (std::size_t c = 0; c < densities.size(); ++c) weighted[c] = g.cell_area() * densities[c];
  return pairwise_sum(weighted);
}

}  // namespace

bool EnergyValue::finite() const noexcept { return std::isfinite(value); }

void check_compatible(const MatrixField& u, const Integrand& f) {
  if (!(f.layout() == u.layout())) {
    throw DomainError("integrand '" + f.name() + "' expects " + std::to_string(f.layout().rows()) +
                      "x" + std::to_string(f.layout().cols()) + " Jacobians, field gives " +
                      std::to_string(u.dim()) + "x2");
  }
}

std::vector<SmallMatrix> discrete_jacobian(const MatrixField& u, Exec exec) {
  std::vector<SmallMatrix> out;
  if (exec == Exec::serial) {
    kernels::serial::cell_jacobians(view(u), out);
  } else {
    kernels::omp::cell_jacobians(view(u), out);
  }
  return out;
}

EnergyValue energy(const MatrixField& u, const Integrand& f, Exec exec) {
  check_compatible(u, f);
  EnergyValue e;
  e.densities.assign(u.grid().num_cells(), 0.0);
  if (exec == Exec::serial) {
    kernels::serial::energy_densities(view(u), f, e.densities);
  } else {
    kernels::omp::energy_densities(view(u), f, e.densities);
  }
  const bool any_infinite = std::any_of(e.densities.begin(), e.densities.end(),
                                        [](double d) { return !std::isfinite(d); });
  e.value = any_infinite ? std::numeric_limits<double>::infinity()
                         : weighted_sum(u.grid(), e.densities);
  return e;
}

double energy_and_gradient(const MatrixField& u, const Integrand& f, std::span<double> grad,
                           Exec exec) {
  check_compatible(u, f);
  if (grad.size() != u.values().size()) throw DomainError("gradient buffer has the wrong size");
  std::vector<double> densities(u.grid().num_cells(), 0.0);
  const bool finite = exec == Exec::serial
                          ? kernels::serial::energy_gradient(view(u), f, densities, grad)
                          : kernels::omp::energy_gradient(view(u), f, densities, grad);
  if (!finite) {
    throw UndefinedGradientError("energy of integrand '" + f.name() +
                                 "' is infinite; its gradient is undefined");
  }
  return weighted_sum(u.grid(), densities);
}

std::vector<double> energy_gradient(const MatrixField& u, const Integrand& f, Exec exec) {
  std::vector<double> grad(u.values().size());
  energy_and_gradient(u, f, grad, exec);
  return grad;
}

double pairing(const PolySubgradient& w, const MatrixField& u, Exec exec) {
  if (!(w.layout == u.layout()) || !(w.base_point.grid() == u.grid())) {
    throw DomainError("subgradient and field have different layouts or grids");
  }
  std::vector<double> dens(u.grid().num_cells());
  if (exec == Exec::serial) {
    kernels::serial::pairing_densities(w, view(u), dens);
  } else {
    kernels::omp::pairing_densities(w, view(u), dens);
  }
  return pairwise_sum(dens);
}

double sobolev_norm(const MatrixField& u, double p) {
  const std::vector<SmallMatrix> jac = discrete_jacobian(u);
  const Grid& g = u.grid();
  std::vector<double> terms(g.num_cells(), 0.0);
  for (std::size_t c = 0; c < g.num_cells(); ++c) {
    if (!u.domain().cell_active(c)) continue;
    SmallVector mean = SmallVector::Zero(u.dim());
    const int ci = static_cast<int>(c % g.cells_x());
    const int cj = static_cast<int>(c / g.cells_x());
    for (int dj = 0; dj < 2; ++dj)
      for (int di = 0; di < 2; ++di) mean += 0.25 * u.value(g.node_index(ci + di, cj + dj));
    terms[c] = g.cell_area() * (std::pow(mean.norm(), p) + std::pow(jac[c].norm(), p));
  }
  return std::pow(pairwise_sum(terms), 1.0 / p);
}

}  // namespace polyreg
