#pragma once

// Forward operator K(u) = I2 o u of the registration problem, the L^q data
// term, synthetic rotation ground truth and noise injection.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "polyreg/field.hpp"
#include "polyreg/field_calculus.hpp"
#include "polyreg/image.hpp"

namespace polyreg {

// Both modes sample I2 at P(u(x)), P the projection onto the closed domain,
// which is the identity on admissible points. strict additionally requires
// nodes of the closed domain to land within 1e-9 diam(Omega) of it and throws
// DomainViolationError otherwise; clamp (solver iterates) does not check.
enum class WarpMode { strict, clamp };

inline constexpr double kWarpToleranceFactor = 1e-9;

double domain_diameter(const Domain& domain);

// Node k of the result is I2(u(x_k)); the result lives on u's grid.
ScalarImage warp(const ScalarImage& reference, const MatrixField& u,
                 WarpMode mode = WarpMode::strict, Exec exec = Exec::parallel);

// Nodes whose image under u leaves the closed domain by more than the strict
// tolerance; empty when u is admissible.
std::vector<std::size_t> admissibility_violations(const MatrixField& u);

// sum_k w_k |Ku_k - target_k|^q with the domain's node weights. Throws
// DomainError for q < 1 or mismatched grids.
double data_term(const ScalarImage& ku, const ScalarImage& target, double q, const Domain& domain);

// data_term(...)^{1/q}.
double lq_distance(const ScalarImage& a, const ScalarImage& b, double q, const Domain& domain);

// Clamped data term of u and its gradient with respect to the node values.
double data_term_and_gradient(const ScalarImage& reference, const ScalarImage& target, double q,
                              const MatrixField& u, std::span<double> grad,
                              Exec exec = Exec::parallel);

// u(x) = c + R_theta (x - c) with c the disk center (the origin for non-disk
// domains, which also appends a warning since admissibility is then not
// guaranteed).
MatrixField rotation_field(double theta, std::shared_ptr<const Domain> domain,
                           std::vector<std::string>* warnings = nullptr);

struct NoisySample {
  ScalarImage image;
  double delta = 0.0;
  std::uint64_t seed = 0;
};

// exact + n where n is i.i.d. standard normal on data-carrying nodes (0
// elsewhere), rescaled so that its L^q norm is exactly delta.
NoisySample add_noise(const ScalarImage& exact, double delta, double q, std::uint64_t seed,
                      const Domain& domain);

// Exact operator data: K = I2 o (.) and the exact right-hand side v = I1.
struct ForwardModel {
  ScalarImage reference;  // I2
  ScalarImage exact;      // I1, on the field grid
  double q = 2.0;
};

}  // namespace polyreg
