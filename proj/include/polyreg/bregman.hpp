#pragma once

// Subgradients in the extended dual, (generalised) Bregman distances,
// sampled certificates and source-condition residuals.

#include <cstdint>

#include "polyreg/field.hpp"
#include "polyreg/field_calculus.hpp"
#include "polyreg/integrands.hpp"
#include "polyreg/poly_subgradient.hpp"
#include "polyreg/registration.hpp"

namespace polyreg {

// Candidate subgradient of R at u built from dF/d(u, xi) at every cell: u1 is
// the order-1 block of dF/dxi, v2 the remaining blocks, u0 the per-node mean
// of dF/du over adjacent active cells. Throws UndefinedGradientError if
// R(u) = +inf and IntegrabilityError if some gradient entry is not finite.
PolySubgradient poly_subgradient(const Integrand& f, const MatrixField& u);

// R(v) - R(u) - w(v) + w(u), assembled cell by cell. Throws
// UndefinedGradientError if R(v) or R(u) is infinite.
double bregman_poly(const Integrand& f, const MatrixField& v, const MatrixField& u,
                    const PolySubgradient& w, Exec exec = Exec::parallel);

// Classical Bregman distance; w must have a vanishing minors part
// (ContractError otherwise). Same arithmetic as bregman_poly.
double bregman_classical(const Integrand& f, const MatrixField& v, const MatrixField& u,
                         const PolySubgradient& w, Exec exec = Exec::parallel);

inline constexpr double kSubgradientTolerance = 1e-8;

struct SubgradientReport {
  int trials = 0;
  int violations = 0;      // trials with D(v; u) < -kSubgradientTolerance
  double worst_gap = 0.0;  // smallest D(v; u) seen (0 when trials == 0)
};

// Probes R(v) >= R(u) + w(v) - w(u) at u = w.base_point on v = u + r phi.
// Trials cycle through smooth global perturbations, localised bumps and
// nodal noise with r log-uniform in [1e-4 radius, radius], plus large probes
// with r in [radius, 10 radius].
SubgradientReport verify_subgradient(const Integrand& f, const PolySubgradient& w, int trials,
                                     std::uint64_t seed, double radius);

struct SourceConditionParams {
  double beta1 = 0.5;
  double beta2 = 1.0;
  double rho = 1.0;
  double alpha_bar = 1.0;

  // Throws ConfigError unless beta1 in [0,1), beta2, rho, alpha_bar > 0 and
  // alpha_bar * r_dagger < rho.
  void validate(double r_dagger) const;
};

// [w(u_dagger) - w(u)] - [beta1 D_w(u; u_dagger) + beta2 |K(u) - v_dagger|_q].
// Non-positive where the source condition holds.
double source_condition_residual(const Integrand& f, const ForwardModel& model,
                                 const PolySubgradient& w, const MatrixField& u_dagger,
                                 const MatrixField& u, const SourceConditionParams& params);

// |K(u) - v_dagger|_q^q + alpha_bar R(u) <= rho, the set on which the source
// condition is required.
bool in_sublevel_set(const Integrand& f, const ForwardModel& model, const MatrixField& u,
                     const SourceConditionParams& params);

// Random smooth field: per component a sum of four plane waves with
// wave-vector entries in [-3, 3] / (domain diameter / 2), scaled to sup norm 1.
MatrixField random_smooth_field(std::shared_ptr<const Domain> domain, int dim, std::uint64_t seed);

}  // namespace polyreg
