#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "polyreg/grid.hpp"
#include "polyreg/minors.hpp"

namespace polyreg {

// Nodal samples of a map u: Omega -> R^N on a Domain, N in 1..3. Values are
// interleaved per node: values[k * N + r] is component r at node k. The
// domain is shared and immutable, so copies are cheap.
class MatrixField {
 public:
  MatrixField(std::shared_ptr<const Domain> domain, int dim);
  MatrixField(std::shared_ptr<const Domain> domain, int dim, std::vector<double> values);
  MatrixField(const Domain& domain, int dim)
      : MatrixField(std::make_shared<const Domain>(domain), dim) {}

  static MatrixField from_function(std::shared_ptr<const Domain> domain, int dim,
                                   const std::function<SmallVector(const Point&)>& fn);
  // u(x) = x.
  static MatrixField identity(std::shared_ptr<const Domain> domain);

  const Domain& domain() const noexcept { return *domain_; }
  const std::shared_ptr<const Domain>& domain_ptr() const noexcept { return domain_; }
  const Grid& grid() const noexcept { return domain_->grid(); }
  int dim() const noexcept { return dim_; }
  // Jacobians are dim x 2.
  MinorsLayout layout() const { return MinorsLayout(dim_, 2); }
  std::size_t num_nodes() const noexcept { return domain_->grid().num_nodes(); }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  std::vector<double>& storage() noexcept { return values_; }

  SmallVector value(std::size_t k) const;
  void set_value(std::size_t k, const SmallVector& v);

 private:
  std::shared_ptr<const Domain> domain_;
  int dim_;
  std::vector<double> values_;
};

}  // namespace polyreg
