#pragma once

#include <vector>

#include "polyreg/field.hpp"
#include "polyreg/minors.hpp"

namespace polyreg {

// Element w of the extended dual acting on fields by
//   w(u) = <u0, u> + <u1, grad u> + <v2, T2(grad u)>,
// discretised with u0 on nodes and u1, v2 on cells. Pairings use the cell
// midpoint rule with u0 and u averaged to cell centers.
struct PolySubgradient {
  MinorsLayout layout;     // dim x 2
  std::vector<double> u0;  // dim per node
  std::vector<double> u1;  // dim * 2 per cell, row-major
  std::vector<double> v2;  // tau2 per cell
  MatrixField base_point;
  double base_energy = 0.0;

  // The zero functional anchored at `base`.
  static PolySubgradient zero(const MatrixField& base, double base_energy);

  // True when the minors part vanishes, i.e. w is a classical dual element.
  bool classical() const;
};

}  // namespace polyreg
