#pragma once

// Minimisation of the Tikhonov functional
//   T_alpha(u) = |I2 o u - v|_{L^q}^q + alpha R(u)
// with the clamped warp standing in for the constraint u(Omega) in Omega.

#include <optional>
#include <span>
#include <string>

#include "polyreg/field.hpp"
#include "polyreg/image.hpp"
#include "polyreg/integrands.hpp"

namespace polyreg {

struct TikhonovProblem {
  Integrand integrand;
  ScalarImage reference;  // I2
  ScalarImage data;       // v^delta on the field grid
  double q = 2.0;
  double alpha = 1.0;
  MatrixField initial;
};

struct SolverOptions {
  double tol = 1e-6;  // on the sup norm of the mass-scaled gradient
  int max_iter = 2000;
  int memory = 10;
  double armijo = 1e-4;
  double shrink = 0.5;
  int stall_window = 5;
};

struct SolveResult {
  MatrixField u;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  double gradient_norm = 0.0;
  int evaluations = 0;
  std::string stop_reason;
};

// T_alpha(u); fills `grad` (same layout as u.values()) when non-empty.
double tikhonov_objective(const TikhonovProblem& problem, const MatrixField& u,
                          std::span<double> grad = {});

// Limited-memory BFGS with the lumped node mass as initial inverse Hessian
// scaling and Armijo backtracking. Stops when the sup norm of the gradient
// divided by the node weights drops below tol, or when the objective
// decreased by less than tol^2 (relative) over the last stall_window steps.
// Hitting max_iter returns the last iterate with converged = false.
SolveResult minimize(const TikhonovProblem& problem, const SolverOptions& options);

// a-priori parameter choice: alpha0 delta^{q-1} for q > 1, alpha0 delta^eps
// for q = 1 (eps in [0, 1)). For q = 1 and eps = 0 the safeguard
// 0 < alpha beta2 < 1 must hold, so beta2 is then required. Throws
// ConfigError on invalid input.
double choose_alpha(double delta, double q, double alpha0, double epsilon,
                    std::optional<double> beta2 = std::nullopt);

}  // namespace polyreg
