#pragma once

// Energy densities F(x, u, xi) that are convex in the minors variable xi.
// The polyconvex density seen by a field is f(x, u, A) = F(x, u, T(A)).

#include <cstdint>
#include <functional>
#include <map>
#include <string>

#include "polyreg/minors.hpp"

namespace polyreg {

struct IntegrandGradient {
  SmallVector du;  // dF/du, length N
  MinorsVec dxi;   // dF/dxi, length tau
};

class Integrand {
 public:
  // x is a point of the (2D) domain, u a value in R^N, xi a minors vector.
  // Returns +inf outside the effective domain.
  using EvalFn = std::function<double(const SmallVector& x, const SmallVector& u, const MinorsVec& xi)>;
  // Called only where EvalFn is finite; `out` arrives sized (N, tau).
  using GradFn = std::function<void(const SmallVector& x, const SmallVector& u, const MinorsVec& xi,
                                    IntegrandGradient& out)>;

  Integrand(std::string name, MinorsLayout layout, std::map<std::string, double> params,
            EvalFn eval, GradFn grad);

  const std::string& name() const noexcept { return name_; }
  const MinorsLayout& layout() const noexcept { return layout_; }
  const std::map<std::string, double>& params() const noexcept { return params_; }
  // Throws std::out_of_range for unknown keys.
  double param(const std::string& key) const { return params_.at(key); }

  double eval(const SmallVector& x, const SmallVector& u, const MinorsVec& xi) const {
    return eval_(x, u, xi);
  }
  void grad_into(const SmallVector& x, const SmallVector& u, const MinorsVec& xi,
                 IntegrandGradient& out) const;
  IntegrandGradient grad(const SmallVector& x, const SmallVector& u, const MinorsVec& xi) const;

  // f(A) = F(0, 0, T(A)) for autonomous densities.
  double density(const SmallMatrix& a) const;

 private:
  std::string name_;
  MinorsLayout layout_;
  std::map<std::string, double> params_;
  EvalFn eval_;
  GradFn grad_;
};

// tr[(A^T A)^{p/2}] + p e^{1 - det A} on 2x2 matrices, in minors form
// F(A, d) = lambda1^p + lambda2^p + p e^{1-d}. Requires p > 2.
Integrand rotation_energy(double p);

// |A|^p / p + |det A|^q / q for square n x n fields, n in {2, 3}.
// Requires p > n and q > 1.
Integrand pq_energy(double p, double q, int n = 2);

// (det A)^2 on 2x2 matrices.
Integrand detsq_energy();

// Built-in integrand by config name: "rotation" (uses p), "pq" (p, q) or
// "detsq". Throws DomainError for unknown names.
Integrand make_integrand(const std::string& name, double p, double q);

struct ConvexityReport {
  int samples = 0;
  int violations = 0;
  double worst_gap = 0.0;  // largest F(mix) - mix(F); <= 0 for convex F
};

inline constexpr double kConvexityTolerance = 1e-10;

// Random convexity test of xi -> F(x, u, xi) with xi entries uniform in
// [-3, 3] and a uniform mixing weight t.
ConvexityReport check_convexity(const Integrand& f, int samples, std::uint64_t seed);

struct CoercivityReport {
  int samples = 0;
  double c_estimate = 0.0;  // min over samples of F(T(A)) / |A|^p
  int violations_at_c = 0;  // samples with F(T(A)) < c |A|^p
};

// Samples A with entries uniform in [-3, 3] times a log-uniform scale in
// [0.1, 10] and measures the lower bound F(T(A)) >= c |A|^p.
CoercivityReport check_coercivity(const Integrand& f, double p, double c, int samples,
                                  std::uint64_t seed);

}  // namespace polyreg
