#include <doctest.h>

#include <cmath>
#include <random>

#include "polyreg/bregman.hpp"
#include "polyreg/errors.hpp"
#include "polyreg/field_calculus.hpp"
#include "polyreg/registration.hpp"

using namespace polyreg;

namespace {

std::shared_ptr<const Domain> unit_square(int n) {
  return std::make_shared<const Domain>(Domain::full(Grid(0, 1, 0, 1, n, n)));
}

std::shared_ptr<const Domain> unit_disk(int n) {
  return std::make_shared<const Domain>(Domain::disk(Grid(-1, 1, -1, 1, n, n), Disk{}));
}

MatrixField perturbed(const MatrixField& u, std::uint64_t seed, double amp) {
  MatrixField v = u;
  const MatrixField bump = random_smooth_field(u.domain_ptr(), u.dim(), seed);
  for (std::size_t i = 0; i < v.values().size(); ++i) v.values()[i] += amp * bump.values()[i];
  return v;
}

// |A|^4 / 4: convex in A alone, so its certificates are classical.
Integrand quartic() {
  return Integrand(
      "quartic", MinorsLayout(2, 2), {},
      [](const SmallVector&, const SmallVector&, const MinorsVec& xi) {
        const double n2 = xi.head(4).squaredNorm();
        return 0.25 * n2 * n2;
      },
      [](const SmallVector&, const SmallVector&, const MinorsVec& xi, IntegrandGradient& g) {
        g.dxi.head(4) = xi.head(4).squaredNorm() * xi.head(4);
      });
}

// Cell determinants computed directly from the corner values.
std::vector<double> cell_dets(const MatrixField& u) {
  const Grid& g = u.grid();
  std::vector<double> out(g.num_cells());
  const auto v = u.values();
  for (int cj = 0; cj < g.cells_y(); ++cj) {
    for (int ci = 0; ci < g.cells_x(); ++ci) {
      const std::size_t a = g.node_index(ci, cj), b = g.node_index(ci + 1, cj),
                        c = g.node_index(ci, cj + 1), d = g.node_index(ci + 1, cj + 1);
      double j[2][2];
      for (int r = 0; r < 2; ++r) {
        j[r][0] = (v[2 * b + r] - v[2 * a + r] + v[2 * d + r] - v[2 * c + r]) / (2 * g.hx());
        j[r][1] = (v[2 * c + r] - v[2 * a + r] + v[2 * d + r] - v[2 * b + r]) / (2 * g.hy());
      }
      out[g.cell_index(ci, cj)] = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    }
  }
  return out;
}

}  // namespace

TEST_SUITE("bregman") {
  TEST_CASE("certificate at the identity: detsq") {
    const auto d = unit_square(6);
    const PolySubgradient w = poly_subgradient(detsq_energy(), MatrixField::identity(d));
    for (double x : w.u0) CHECK(x == 0.0);
    for (double x : w.u1) CHECK(x == 0.0);
    REQUIRE(w.v2.size() == d->grid().num_cells());
    for (double x : w.v2) CHECK(x == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(w.base_energy == doctest::Approx(1.0));
    CHECK_FALSE(w.classical());
  }

  TEST_CASE("certificate at the identity: pq") {
    const auto d = unit_square(6);
    const PolySubgradient w = poly_subgradient(pq_energy(4.0, 2.0), MatrixField::identity(d));
    for (std::size_t c = 0; c < d->grid().num_cells(); ++c) {
      CHECK(w.u1[4 * c + 0] == doctest::Approx(2.0).epsilon(1e-14));
      CHECK(w.u1[4 * c + 1] == doctest::Approx(0.0).scale(1.0));
      CHECK(w.u1[4 * c + 2] == doctest::Approx(0.0).scale(1.0));
      CHECK(w.u1[4 * c + 3] == doctest::Approx(2.0).epsilon(1e-14));
      CHECK(w.v2[c] == doctest::Approx(1.0).epsilon(1e-14));
    }
  }

  TEST_CASE("inactive cells carry no certificate") {
    const auto d = unit_disk(12);
    const PolySubgradient w = poly_subgradient(detsq_energy(), MatrixField::identity(d));
    for (std::size_t c = 0; c < d->grid().num_cells(); ++c) {
      if (!d->cell_active(c)) CHECK(w.v2[c] == 0.0);
    }
  }

  TEST_CASE("Bregman distance vanishes on the diagonal") {
    const auto d = unit_disk(14);
    for (const Integrand& f : {rotation_energy(4.0), pq_energy(4.0, 2.0), detsq_energy()}) {
      const MatrixField u = perturbed(MatrixField::identity(d), 11, 0.1);
      const PolySubgradient w = poly_subgradient(f, u);
      CHECK(std::abs(bregman_poly(f, u, u, w)) <= 1e-12);
    }
  }

  TEST_CASE("detsq closed form") {
    const auto d = unit_disk(15);
    const Integrand f = detsq_energy();
    for (std::uint64_t s = 0; s < 10; ++s) {
      const MatrixField u = perturbed(MatrixField::identity(d), 20 + s, 0.2);
      const MatrixField v = perturbed(MatrixField::identity(d), 40 + s, 0.3);
      const auto du = cell_dets(u), dv = cell_dets(v);
      double expect = 0.0;
      for (std::size_t c = 0; c < du.size(); ++c) {
        if (d->cell_active(c)) expect += d->grid().cell_area() * (dv[c] - du[c]) * (dv[c] - du[c]);
      }
      const double got = bregman_poly(f, v, u, poly_subgradient(f, u));
      CHECK(std::abs(got - expect) <= 1e-10 * expect);
    }
  }

  TEST_CASE("rebasing a certificate onto another point") {
    const auto d = unit_square(8);
    const Integrand f = detsq_energy();
    const MatrixField u = perturbed(MatrixField::identity(d), 1, 0.1);
    const MatrixField v = perturbed(MatrixField::identity(d), 2, 0.1);
    const PolySubgradient w = poly_subgradient(f, u);
    // D_w(v; u) computed from the certificate's own base and from an explicit u agree.
    CHECK(bregman_poly(f, v, w.base_point, w) == doctest::Approx(bregman_poly(f, v, u, w)));
  }

  TEST_CASE("zero certificate at a rotation") {
    const auto d = unit_disk(14);
    const Integrand f = rotation_energy(4.0);
    const MatrixField ur = rotation_field(M_PI / 6, d);
    const double r = energy(ur, f).value;
    const PolySubgradient w = PolySubgradient::zero(ur, r);
    CHECK(w.classical());
    for (std::uint64_t s = 0; s < 20; ++s) {
      const MatrixField v = perturbed(ur, 60 + s, 0.05 * (s + 1));
      const double dist = bregman_poly(f, v, ur, w);
      CHECK(dist == doctest::Approx(energy(v, f).value - r).epsilon(1e-12));
      CHECK(dist >= 0.0);
      CHECK(bregman_classical(f, v, ur, w) == doctest::Approx(dist).epsilon(1e-12));
    }
  }

  TEST_CASE("classical Bregman distance") {
    const auto d = unit_square(8);
    const Integrand f = quartic();
    const MatrixField u = perturbed(MatrixField::identity(d), 5, 0.2);
    const PolySubgradient w = poly_subgradient(f, u);
    CHECK(w.classical());
    CHECK(bregman_classical(f, u, u, w) == doctest::Approx(0.0).scale(1.0));
    for (std::uint64_t s = 0; s < 100; ++s) {
      const MatrixField v = perturbed(u, 200 + s, 0.01 * (1 + s % 10));
      CHECK(bregman_classical(f, v, u, w) >= -1e-8);
    }
    const PolySubgradient wd = poly_subgradient(detsq_energy(), u);
    CHECK_THROWS_AS(bregman_classical(detsq_energy(), u, u, wd), ContractError);
  }

  TEST_CASE("subgradient verification") {
    const auto d = unit_disk(12);
    const MatrixField u = perturbed(MatrixField::identity(d), 7, 0.05);
    for (const Integrand& f : {rotation_energy(4.0), pq_energy(4.0, 2.0), detsq_energy()}) {
      const PolySubgradient w = poly_subgradient(f, u);
      const SubgradientReport r = verify_subgradient(f, w, 200, 3, 0.1);
      CHECK(r.trials == 200);
      CHECK(r.violations == 0);
      CHECK(r.worst_gap >= -kSubgradientTolerance);

      PolySubgradient broken = w;
      broken.v2[d->grid().cell_index(5, 5)] += 1.0;
      CHECK(verify_subgradient(f, broken, 200, 3, 0.1).violations > 0);
    }
    const SubgradientReport empty = verify_subgradient(detsq_energy(),
                                                       poly_subgradient(detsq_energy(), u), 0, 1, 0.1);
    CHECK(empty.trials == 0);
    CHECK(empty.violations == 0);
  }

  TEST_CASE("undefined certificates") {
    const auto d = unit_square(4);
    const Integrand barrier(
        "barrier", MinorsLayout(2, 2), {},
        [](const SmallVector&, const SmallVector&, const MinorsVec& xi) {
          return xi[4] > 0.0 ? 1.0 / xi[4] : std::numeric_limits<double>::infinity();
        },
        [](const SmallVector&, const SmallVector&, const MinorsVec& xi, IntegrandGradient& g) {
          g.dxi[4] = -1.0 / (xi[4] * xi[4]);
        });
    const MatrixField flipped = MatrixField::from_function(
        d, 2, [](const Point& x) { return SmallVector(Eigen::Vector2d(-x.x(), x.y())); });
    CHECK_THROWS_AS(poly_subgradient(barrier, flipped), UndefinedGradientError);
    const MatrixField flat = MatrixField::from_function(
        d, 2, [](const Point& x) { return SmallVector(Eigen::Vector2d(x.x(), 1e-200 * x.y())); });
    CHECK_THROWS_AS(poly_subgradient(barrier, flat), IntegrabilityError);
  }

  TEST_CASE("source condition with the zero certificate") {
    const auto d = unit_disk(16);
    const Integrand f = rotation_energy(4.0);
    const MatrixField ur = rotation_field(M_PI / 6, d);
    const double r = energy(ur, f).value;
    const ScalarImage i2 = render_blobs(d->grid(), {{{0.3, 0.1}, 1.0, 0.3}});
    const ForwardModel model{i2, warp(i2, ur, WarpMode::clamp), 2.0};
    const PolySubgradient w = PolySubgradient::zero(ur, r);
    SourceConditionParams params{0.5, 1.0, 10.0 * r, 1.0};
    params.validate(r);
    CHECK(source_condition_residual(f, model, w, ur, ur, params) == 0.0);
    for (std::uint64_t s = 0; s < 20; ++s) {
      const MatrixField u = perturbed(ur, 300 + s, 0.02);
      CHECK(in_sublevel_set(f, model, u, params));
      CHECK(source_condition_residual(f, model, w, ur, u, params) <= 0.0);
    }
    SourceConditionParams bad = params;
    bad.rho = 0.5 * r;
    CHECK_THROWS_AS(bad.validate(r), ConfigError);
    bad = params;
    bad.beta1 = 1.0;
    CHECK_THROWS_AS(bad.validate(r), ConfigError);
  }
}
