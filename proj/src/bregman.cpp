#include "polyreg/bregman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "polyreg/errors.hpp"
#include "polyreg/kernels.hpp"
#include "polyreg/reduction.hpp"

namespace polyreg {

PolySubgradient poly_subgradient(const Integrand& f, const MatrixField& u) {
  check_compatible(u, f);
  const double base_energy = energy(u, f).value;
  if (!std::isfinite(base_energy)) {
    throw UndefinedGradientError("R(u) is infinite; no subgradient at u");
  }

  PolySubgradient w = PolySubgradient::zero(u, base_energy);
  const Grid& g = u.grid();
  const int dim = u.dim();
  const int entries = dim * 2;
  const int tau2 = w.layout.tau2();
  const std::vector<SmallMatrix> jac = discrete_jacobian(u);
  std::vector<double> du_cells(g.num_cells() * dim, 0.0);

  MinorsVec xi;
  IntegrandGradient grad;
  for (std::size_t c = 0; c < g.num_cells(); ++c) {
    if (!u.domain().cell_active(c)) continue;
    const int ci = static_cast<int>(c % g.cells_x());
    const int cj = static_cast<int>(c / g.cells_x());
    SmallVector mean = SmallVector::Zero(dim);
    for (int dj = 0; dj < 2; ++dj)
      for (int di = 0; di < 2; ++di) mean += 0.25 * u.value(g.node_index(ci + di, cj + dj));
    all_minors_into(w.layout, jac[c], xi);
    f.grad_into(g.cell_center(c), mean, xi, grad);
    if (!grad.du.allFinite() || !grad.dxi.allFinite()) {
      throw IntegrabilityError("integrand gradient is not finite at cell " + std::to_string(c));
    }
    for (int e = 0; e < entries; ++e) w.u1[c * entries + e] = grad.dxi[e];
    for (int m = 0; m < tau2; ++m) w.v2[c * tau2 + m] = grad.dxi[entries + m];
    for (int r = 0; r < dim; ++r) du_cells[c * dim + r] = grad.du[r];
  }

  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const std::size_t k = g.node_index(i, j);
      int count = 0;
      for (int cj = j - 1; cj <= j; ++cj) {
        for (int ci = i - 1; ci <= i; ++ci) {
          if (ci < 0 || cj < 0 || ci >= g.cells_x() || cj >= g.cells_y()) continue;
          const std::size_t c = g.cell_index(ci, cj);
          if (!u.domain().cell_active(c)) continue;
          ++count;
          for (int r = 0; r < dim; ++r) w.u0[k * dim + r] += du_cells[c * dim + r];
        }
      }
      if (count > 0) {
        for (int r = 0; r < dim; ++r) w.u0[k * dim + r] /= count;
      }
    }
  }
  return w;
}

namespace {

double assemble_bregman(const Integrand& f, const MatrixField& v, const PolySubgradient& w,
                        Exec exec) {
  std::vector<double> dens(v.grid().num_cells());
  const kernels::FieldView view{v.domain(), v.dim(), v.values()};
  if (exec == Exec::serial) {
    kernels::serial::bregman_densities(f, w, view, dens);
  } else {
    kernels::omp::bregman_densities(f, w, view, dens);
  }
  if (std::any_of(dens.begin(), dens.end(), [](double d) { return !std::isfinite(d); })) {
    throw UndefinedGradientError("Bregman distance undefined: infinite energy");
  }
  return pairwise_sum(dens);
}

}  // namespace

double bregman_poly(const Integrand& f, const MatrixField& v, const MatrixField& u,
                    const PolySubgradient& w, Exec exec) {
  check_compatible(v, f);
  if (!(v.layout() == w.layout) || !(v.grid() == u.grid()) || !(u.grid() == w.base_point.grid())) {
    throw DomainError("bregman_poly: fields and subgradient disagree on layout or grid");
  }
  // The cell kernels expand around w.base_point.
  if (std::ranges::equal(u.values(), w.base_point.values())) {
    return assemble_bregman(f, v, w, exec);
  }
  PolySubgradient rebased = w;
  rebased.base_point = u;
  return assemble_bregman(f, v, rebased, exec);
}

double bregman_classical(const Integrand& f, const MatrixField& v, const MatrixField& u,
                         const PolySubgradient& w, Exec exec) {
  if (!w.classical()) {
    throw ContractError("bregman_classical needs a subgradient with v2 = 0; use bregman_poly");
  }
  return bregman_poly(f, v, u, w, exec);
}

MatrixField random_smooth_field(std::shared_ptr<const Domain> domain, int dim,
                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> wave(-3.0, 3.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
  std::normal_distribution<double> amp(0.0, 1.0);
  const double scale = 2.0 / domain->grid().diameter();
  struct Mode {
    Point k;
    double phase, amp;
  };
  std::vector<std::vector<Mode>> modes(dim);
  for (int r = 0; r < dim; ++r) {
    for (int m = 0; m < 4; ++m) {
      modes[r].push_back({scale * Point(wave(rng), wave(rng)), phase(rng), amp(rng)});
    }
  }
  MatrixField phi = MatrixField::from_function(domain, dim, [&](const Point& x) {
    SmallVector v = SmallVector::Zero(dim);
    for (int r = 0; r < dim; ++r)
      for (const auto& md : modes[r]) v[r] += md.amp * std::sin(md.k.dot(x) + md.phase);
    return v;
  });
  double sup = 0.0;
  for (double x : phi.values()) sup = std::max(sup, std::abs(x));
  if (sup > 0.0)
    for (double& x : phi.values()) x /= sup;
  return phi;
}

namespace {

MatrixField bump_field(std::shared_ptr<const Domain> domain, int dim, std::mt19937_64& rng) {
  const Grid& g = domain->grid();
  std::uniform_int_distribution<std::size_t> pick(0, g.num_cells() - 1);
  std::size_t c = pick(rng);
  for (int tries = 0; tries < 1000 && !domain->cell_active(c); ++tries) c = pick(rng);
  const Point center = g.cell_center(c);
  const double width = 1.5 * std::max(g.hx(), g.hy());
  std::normal_distribution<double> normal(0.0, 1.0);
  SmallVector dir(dim);
  for (int r = 0; r < dim; ++r) dir[r] = normal(rng);
  dir /= std::max(dir.norm(), 1e-12);
  return MatrixField::from_function(domain, dim, [&](const Point& x) {
    return SmallVector(dir * std::exp(-(x - center).squaredNorm() / (2.0 * width * width)));
  });
}

MatrixField noise_field(std::shared_ptr<const Domain> domain, int dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  MatrixField phi(domain, dim);
  for (double& x : phi.values()) x = unit(rng);
  return phi;
}

}  // namespace

SubgradientReport verify_subgradient(const Integrand& f, const PolySubgradient& w, int trials,
                                     std::uint64_t seed, double radius) {
  SubgradientReport report;
  if (trials <= 0) return report;
  const MatrixField& base = w.base_point;
  report.worst_gap = std::numeric_limits<double>::infinity();

  for (int t = 0; t < trials; ++t) {
    // Per-trial generator so a trial does not depend on the ones before it.
    std::mt19937_64 rng(seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(t + 1)));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    MatrixField phi = [&] {
      switch (t % 4) {
        case 1: return bump_field(base.domain_ptr(), base.dim(), rng);
        case 2: return noise_field(base.domain_ptr(), base.dim(), rng);
        default: return random_smooth_field(base.domain_ptr(), base.dim(), rng());
      }
    }();
    const double r = (t % 4 == 3) ? radius * std::exp(unit(rng) * std::log(10.0))
                                  : radius * std::exp(-unit(rng) * std::log(1e4));
    MatrixField v = base;
    for (std::size_t i = 0; i < v.values().size(); ++i) v.values()[i] += r * phi.values()[i];

    double d = 0.0;
    try {
      d = bregman_poly(f, v, base, w);
    } catch (const UndefinedGradientError&) {
      d = std::numeric_limits<double>::infinity();  // R(v) = +inf satisfies the inequality
    }
    ++report.trials;
    report.worst_gap = std::min(report.worst_gap, d);
    if (d < -kSubgradientTolerance) ++report.violations;
  }
  return report;
}

void SourceConditionParams::validate(double r_dagger) const {
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw ConfigError("beta1 must lie in [0, 1)");
  if (!(beta2 > 0.0)) throw ConfigError("beta2 must be positive");
  if (!(rho > 0.0)) throw ConfigError("rho must be positive");
  if (!(alpha_bar > 0.0)) throw ConfigError("alpha_bar must be positive");
  if (!(alpha_bar * r_dagger < rho)) throw ConfigError("need alpha_bar * R(u_dagger) < rho");
}

double source_condition_residual(const Integrand& f, const ForwardModel& model,
                                 const PolySubgradient& w, const MatrixField& u_dagger,
                                 const MatrixField& u, const SourceConditionParams& params) {
  const double lhs = pairing(w, u_dagger) - pairing(w, u);
  const double d = bregman_poly(f, u, u_dagger, w);
  const ScalarImage ku = warp(model.reference, u, WarpMode::clamp);
  const double misfit = lq_distance(ku, model.exact, model.q, u.domain());
  return lhs - (params.beta1 * d + params.beta2 * misfit);
}

bool in_sublevel_set(const Integrand& f, const ForwardModel& model, const MatrixField& u,
                     const SourceConditionParams& params) {
  const ScalarImage ku = warp(model.reference, u, WarpMode::clamp);
  const double value =
      data_term(ku, model.exact, model.q, u.domain()) + params.alpha_bar * energy(u, f).value;
  return value <= params.rho;
}

}  // namespace polyreg
