#include "polyreg/integrands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <utility>

#include "polyreg/errors.hpp"
#include "polyreg/svd2.hpp"

namespace polyreg {

Integrand::Integrand(std::string name, MinorsLayout layout, std::map<std::string, double> params,
                     EvalFn eval, GradFn grad)
    : name_(std::move(name)),
      layout_(layout),
      params_(std::move(params)),
      eval_(std::move(eval)),
      grad_(std::move(grad)) {}

void Integrand::grad_into(const SmallVector& x, const SmallVector& u, const MinorsVec& xi,
                          IntegrandGradient& out) const {
  out.du.setZero(layout_.rows());
  out.dxi.setZero(layout_.tau());
  grad_(x, u, xi, out);
}

IntegrandGradient Integrand::grad(const SmallVector& x, const SmallVector& u,
                                  const MinorsVec& xi) const {
  IntegrandGradient g;
  grad_into(x, u, xi, g);
  return g;
}

double Integrand::density(const SmallMatrix& a) const {
  MinorsVec xi;
  all_minors_into(layout_, a, xi);
  return eval(SmallVector::Zero(2), SmallVector::Zero(layout_.rows()), xi);
}

namespace {

Eigen::Matrix2d a_block_2x2(const MinorsVec& xi) {
  Eigen::Matrix2d a;
  a << xi[0], xi[1], xi[2], xi[3];
  return a;
}

double abs_pow(double v, double e) { return std::pow(std::abs(v), e); }

// |v|^{e-2} v, continuous at 0 for e > 1.
double signed_pow_grad(double v, double e) {
  if (v == 0.0) return 0.0;
  return std::pow(std::abs(v), e - 2.0) * v;
}

}  // namespace

Integrand rotation_energy(double p) {
  if (!(p > 2.0)) throw DomainError("rotation_energy needs p > 2, got " + std::to_string(p));
  auto eval = [p](const SmallVector&, const SmallVector&, const MinorsVec& xi) {
    const Svd2 d = svd2(a_block_2x2(xi));
    return abs_pow(d.s1, p) + abs_pow(d.s2, p) + p * std::exp(1.0 - xi[4]);
  };
  auto grad = [p](const SmallVector&, const SmallVector&, const MinorsVec& xi,
                  IntegrandGradient& out) {
    // d/dA sum |s_i|^p = U diag(p |s_i|^{p-2} s_i) V^T for any SVD.
    const Svd2 d = svd2(a_block_2x2(xi));
    const Eigen::Matrix2d g = d.u *
                              Eigen::Vector2d(p * signed_pow_grad(d.s1, p),
                                              p * signed_pow_grad(d.s2, p))
                                  .asDiagonal() *
                              d.v.transpose();
    out.dxi[0] = g(0, 0);
    out.dxi[1] = g(0, 1);
    out.dxi[2] = g(1, 0);
    out.dxi[3] = g(1, 1);
    out.dxi[4] = -p * std::exp(1.0 - xi[4]);
  };
  return Integrand("rotation", MinorsLayout(2, 2), {{"p", p}}, eval, grad);
}

Integrand pq_energy(double p, double q, int n) {
  if (n != 2 && n != 3) throw DomainError("pq_energy supports n = 2 or 3");
  if (!(p > n)) throw DomainError("pq_energy needs p > n");
  if (!(q > 1.0)) throw DomainError("pq_energy needs q > 1");
  const MinorsLayout layout(n, n);
  const int entries = n * n;
  const int det_slot = layout.tau() - 1;
  auto eval = [=](const SmallVector&, const SmallVector&, const MinorsVec& xi) {
    const double norm = xi.head(entries).norm();
    return std::pow(norm, p) / p + abs_pow(xi[det_slot], q) / q;
  };
  auto grad = [=](const SmallVector&, const SmallVector&, const MinorsVec& xi,
                  IntegrandGradient& out) {
    const double norm = xi.head(entries).norm();
    const double scale = norm == 0.0 ? 0.0 : std::pow(norm, p - 2.0);
    out.dxi.head(entries) = scale * xi.head(entries);
    out.dxi[det_slot] = signed_pow_grad(xi[det_slot], q);
  };
  return Integrand("pq", layout, {{"p", p}, {"q", q}}, eval, grad);
}

Integrand detsq_energy() {
  auto eval = [](const SmallVector&, const SmallVector&, const MinorsVec& xi) {
    return xi[4] * xi[4];
  };
  auto grad = [](const SmallVector&, const SmallVector&, const MinorsVec& xi,
                 IntegrandGradient& out) { out.dxi[4] = 2.0 * xi[4]; };
  return Integrand("detsq", MinorsLayout(2, 2), {}, eval, grad);
}

Integrand make_integrand(const std::string& name, double p, double q) {
  if (name == "rotation") return rotation_energy(p);
  if (name == "pq") return pq_energy(p, q, 2);
  if (name == "detsq") return detsq_energy();
  throw DomainError("unknown integrand '" + name + "' (expected rotation, pq or detsq)");
}

ConvexityReport check_convexity(const Integrand& f, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> entry(-3.0, 3.0);
  std::uniform_real_distribution<double> weight(0.0, 1.0);
  const MinorsLayout& layout = f.layout();
  const SmallVector x = SmallVector::Zero(2);

  ConvexityReport report;
  report.worst_gap = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < samples; ++k) {
    SmallVector u(layout.rows());
    for (int i = 0; i < u.size(); ++i) u[i] = entry(rng);
    MinorsVec xi1(layout.tau()), xi2(layout.tau());
    for (int i = 0; i < layout.tau(); ++i) xi1[i] = entry(rng);
    for (int i = 0; i < layout.tau(); ++i) xi2[i] = entry(rng);
    double t = weight(rng);
    if (t == 0.0) t = 0.5;

    const double f1 = f.eval(x, u, xi1);
    const double f2 = f.eval(x, u, xi2);
    if (!std::isfinite(f1) || !std::isfinite(f2)) continue;
    const MinorsVec mid = t * xi1 + (1.0 - t) * xi2;
    const double gap = f.eval(x, u, mid) - (t * f1 + (1.0 - t) * f2);
    ++report.samples;
    report.worst_gap = std::max(report.worst_gap, gap);
    if (gap > kConvexityTolerance) ++report.violations;
  }
  if (report.samples == 0) report.worst_gap = 0.0;
  return report;
}

CoercivityReport check_coercivity(const Integrand& f, double p, double c, int samples,
                                  std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> entry(-3.0, 3.0);
  std::uniform_real_distribution<double> log_scale(std::log(0.1), std::log(10.0));
  const MinorsLayout& layout = f.layout();

  CoercivityReport report;
  report.c_estimate = std::numeric_limits<double>::infinity();
  SmallMatrix a(layout.rows(), layout.cols());
  for (int k = 0; k < samples; ++k) {
    const double scale = std::exp(log_scale(rng));
    for (int i = 0; i < a.rows(); ++i)
      for (int j = 0; j < a.cols(); ++j) a(i, j) = scale * entry(rng);
    const double value = f.density(a);
    const double bound = std::pow(a.norm(), p);
    ++report.samples;
    if (bound > 0.0) report.c_estimate = std::min(report.c_estimate, value / bound);
    // Relative slack of a few ulps for samples that sit on the bound.
    if (value < c * bound * (1.0 - 1e-12)) ++report.violations_at_c;
  }
  return report;
}

}  // namespace polyreg
