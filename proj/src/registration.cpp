#include "polyreg/registration.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "polyreg/errors.hpp"
#include "polyreg/kernels.hpp"
#include "polyreg/reduction.hpp"

namespace polyreg {

namespace {

void check_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) throw DomainError("images live on different grids");
}

void check_exponent(double q) {
  if (!(q >= 1.0)) throw DomainError("data exponent q must be >= 1");
}

}  // namespace

double domain_diameter(const Domain& domain) {
  if (domain.disk_geometry()) return 2.0 * domain.disk_geometry()->radius;
  return domain.grid().diameter();
}

std::vector<std::size_t> admissibility_violations(const MatrixField& u) {
  const Domain& d = u.domain();
  const double tol = kWarpToleranceFactor * domain_diameter(d);
  std::vector<std::size_t> bad;
  for (std::size_t k = 0; k < u.num_nodes(); ++k) {
    if (!d.node_in_closure(k)) continue;
    const Point p(u.values()[k * 2], u.values()[k * 2 + 1]);
    if (d.distance_outside(p) > tol) bad.push_back(k);
  }
  return bad;
}

ScalarImage warp(const ScalarImage& reference, const MatrixField& u, WarpMode mode, Exec exec) {
  if (u.dim() != 2) throw DomainError("warp needs a 2D deformation");
  if (mode == WarpMode::strict) {
    const std::vector<std::size_t> bad = admissibility_violations(u);
    if (!bad.empty()) {
      std::size_t worst = bad.front();
      double worst_dist = 0.0;
      for (std::size_t k : bad) {
        const double dist =
            u.domain().distance_outside(Point(u.values()[k * 2], u.values()[k * 2 + 1]));
        if (dist > worst_dist) {
          worst_dist = dist;
          worst = k;
        }
      }
      std::ostringstream msg;
      msg << bad.size() << " node(s) mapped outside the domain; worst is node " << worst
          << " at distance " << worst_dist;
      throw DomainViolationError(msg.str(), worst, worst_dist);
    }
  }
  std::vector<double> out(u.num_nodes());
  const kernels::FieldView v{u.domain(), u.dim(), u.values()};
  if (exec == Exec::serial) {
    kernels::serial::warp(reference, v, out);
  } else {
    kernels::omp::warp(reference, v, out);
  }
  return ScalarImage(u.grid(), std::move(out));
}

double data_term(const ScalarImage& ku, const ScalarImage& target, double q, const Domain& domain) {
  check_exponent(q);
  check_same_grid(ku.grid(), target.grid());
  check_same_grid(ku.grid(), domain.grid());
  const auto& w = domain.node_weights();
  std::vector<double> terms(w.size(), 0.0);
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (w[k] == 0.0) continue;
    const double r = std::abs(ku.samples()[k] - target.samples()[k]);
    terms[k] = w[k] * (q == 2.0 ? r * r : std::pow(r, q));
  }
  return pairwise_sum(terms);
}

double lq_distance(const ScalarImage& a, const ScalarImage& b, double q, const Domain& domain) {
  return std::pow(data_term(a, b, q, domain), 1.0 / q);
}

double data_term_and_gradient(const ScalarImage& reference, const ScalarImage& target, double q,
                              const MatrixField& u, std::span<double> grad, Exec exec) {
  check_exponent(q);
  const Domain& d = u.domain();
  check_same_grid(target.grid(), d.grid());
  const ScalarImage ku = warp(reference, u, WarpMode::clamp, exec);
  const auto& w = d.node_weights();
  std::fill(grad.begin(), grad.end(), 0.0);
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (w[k] == 0.0) continue;
    const Point p(u.values()[k * 2], u.values()[k * 2 + 1]);
    const double r = ku.samples()[k] - target.samples()[k];
    if (r == 0.0) continue;
    // d/dr |r|^q = q |r|^{q-2} r
    const double dr = q == 2.0 ? 2.0 * r : q * std::pow(std::abs(r), q - 2.0) * r;
    Eigen::Vector2d image_grad;
    reference.sample(d.project(p), image_grad);
    const Eigen::Vector2d g = w[k] * dr * (d.project_jacobian(p).transpose() * image_grad);
    grad[k * 2] = g.x();
    grad[k * 2 + 1] = g.y();
  }
  return data_term(ku, target, q, d);
}

MatrixField rotation_field(double theta, std::shared_ptr<const Domain> domain,
                           std::vector<std::string>* warnings) {
  Point center(0.0, 0.0);
  if (domain->disk_geometry()) {
    center = domain->disk_geometry()->center;
  } else if (warnings) {
    warnings->push_back(
        "rotation_field: domain is not a disk, so u_R(Omega) may leave Omega");
  }
  Eigen::Matrix2d rot;
  rot << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return MatrixField::from_function(std::move(domain), 2, [&](const Point& x) {
    return SmallVector(center + rot * (x - center));
  });
}

NoisySample add_noise(const ScalarImage& exact, double delta, double q, std::uint64_t seed,
                      const Domain& domain) {
  check_exponent(q);
  if (!(delta >= 0.0)) throw DomainError("noise level must be >= 0");
  check_same_grid(exact.grid(), domain.grid());
  if (delta == 0.0) return {exact, 0.0, seed};

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> noise(exact.samples().size(), 0.0);
  for (std::size_t k = 0; k < noise.size(); ++k) {
    if (domain.node_active(k)) noise[k] = normal(rng);
  }
  const ScalarImage zero = ScalarImage::constant(exact.grid(), 0.0);
  const double norm = lq_distance(ScalarImage(exact.grid(), noise), zero, q, domain);
  if (!(norm > 0.0)) throw DomainError("domain carries no data nodes");
  std::vector<double> noisy = exact.samples();
  for (std::size_t k = 0; k < noise.size(); ++k) noisy[k] += (delta / norm) * noise[k];
  return {ScalarImage(exact.grid(), std::move(noisy)), delta, seed};
}

}  // namespace polyreg
