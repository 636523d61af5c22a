#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oracles/finite_diff.hpp"
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

MatrixField perturbed_identity(std::shared_ptr<const Domain> d, std::uint64_t seed, double amp) {
  MatrixField u = MatrixField::identity(d);
  const MatrixField bump = random_smooth_field(d, 2, seed);
  for (std::size_t i = 0; i < u.values().size(); ++i) u.values()[i] += amp * bump.values()[i];
  return u;
}

std::vector<double> fd_energy_gradient(const MatrixField& u, const Integrand& f, double h) {
  return oracle::central_gradient(
      [&](const std::vector<double>& x) {
        return energy(MatrixField(u.domain_ptr(), u.dim(), x), f).value;
      },
      std::vector<double>(u.values().begin(), u.values().end()), h);
}

// F = d^2 where det > 0, +inf otherwise.
Integrand barrier() {
  return Integrand(
      "barrier", MinorsLayout(2, 2), {},
      [](const SmallVector&, const SmallVector&, const MinorsVec& xi) {
        return xi[4] > 0.0 ? xi[4] * xi[4] : std::numeric_limits<double>::infinity();
      },
      [](const SmallVector&, const SmallVector&, const MinorsVec& xi, IntegrandGradient& g) {
        g.dxi[4] = 2.0 * xi[4];
      });
}

}  // namespace

TEST_SUITE("field_calculus") {
  TEST_CASE("Jacobians of affine fields are exact") {
    const auto d = unit_disk(12);
    for (const SmallMatrix& j : discrete_jacobian(MatrixField::identity(d))) {
      CHECK((j - SmallMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);
    }
    const double t = M_PI / 4;
    const MatrixField rot = rotation_field(t, d);
    SmallMatrix r(2, 2);
    r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
    for (const SmallMatrix& j : discrete_jacobian(rot)) {
      CHECK((j - r).cwiseAbs().maxCoeff() < 1e-13);
    }
  }

  TEST_CASE("Jacobian of a quadratic converges at second order") {
    double previous = 0.0;
    for (int n : {9, 17, 33}) {
      const auto d = unit_square(n);
      const MatrixField u = MatrixField::from_function(d, 2, [](const Point& x) {
        return SmallVector(Eigen::Vector2d(x.x() * x.x() + x.y() * x.y() * x.y(), 0.0));
      });
      const auto jac = discrete_jacobian(u);
      double err = 0.0;
      for (std::size_t c = 0; c < jac.size(); ++c) {
        const Point x = d->grid().cell_center(c);
        err = std::max(err, std::abs(jac[c](0, 0) - 2.0 * x.x()));
        err = std::max(err, std::abs(jac[c](0, 1) - 3.0 * x.y() * x.y()));
      }
      if (previous > 0.0) CHECK(previous / err == doctest::Approx(4.0).epsilon(0.15));
      previous = err;
    }
  }

  TEST_CASE("energy examples") {
    const auto sq = unit_square(9);
    CHECK(energy(MatrixField::identity(sq), detsq_energy()).value == doctest::Approx(1.0).epsilon(1e-14));
    const MatrixField stretch = MatrixField::from_function(
        sq, 2, [](const Point& x) { return SmallVector(Eigen::Vector2d(2.0 * x.x(), x.y())); });
    CHECK(energy(stretch, detsq_energy()).value == doctest::Approx(4.0).epsilon(1e-14));

    const auto disk = unit_disk(20);
    const double area = disk->area();
    CHECK(energy(rotation_field(0.4, disk), rotation_energy(4.0)).value ==
          doctest::Approx(6.0 * area).epsilon(1e-13));
    CHECK(energy(MatrixField::identity(disk), rotation_energy(4.0)).value ==
          doctest::Approx(6.0 * area).epsilon(1e-13));
  }

  TEST_CASE("masked cells contribute nothing") {
    const Grid g(0, 1, 0, 1, 5, 5);
    std::vector<std::uint8_t> mask(g.num_cells(), 1);
    mask[0] = 0;
    mask[5] = 0;
    const auto d = std::make_shared<const Domain>(Domain::masked(g, mask));
    MatrixField u = MatrixField::identity(d);
    CHECK(energy(u, detsq_energy()).value == doctest::Approx(14.0 / 16.0).epsilon(1e-14));
    // Moving the node only inactive cells touch changes nothing.
    const auto before = energy(u, detsq_energy()).value;
    u.values()[0] += 0.3;
    CHECK(energy(u, detsq_energy()).value == before);
    CHECK(energy_gradient(u, detsq_energy())[0] == 0.0);
  }

  TEST_CASE("detsq gradient at the identity on a 3x3 grid") {
    const auto d = unit_square(3);
    const auto g = energy_gradient(MatrixField::identity(d), detsq_energy());
    // Interior node 4 cancels; boundary nodes carry the constant cofactor flux.
    CHECK(std::abs(g[8]) < 1e-15);
    CHECK(std::abs(g[9]) < 1e-15);
    // Hand assembly: corner node 0 gets -|c| (2d) (1/2h)(1, 1) from cell 0.
    const double h = 0.5, area = h * h;
    CHECK(g[0] == doctest::Approx(-area * 2.0 * 0.5 / h));
    CHECK(g[1] == doctest::Approx(-area * 2.0 * 0.5 / h));
  }

  TEST_CASE("rotation field is a discrete critical point") {
    const auto d = unit_disk(16);
    const MatrixField u = rotation_field(0.7, d);
    const auto g = energy_gradient(u, rotation_energy(4.0));
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> un(-1.0, 1.0);
    for (int t = 0; t < 10; ++t) {
      double pair = 0.0;
      for (double gi : g) pair += gi * un(rng);
      CHECK(std::abs(pair) < 1e-8);
    }
  }

  TEST_CASE("energy gradient matches central differences") {
    const auto d = unit_square(8);
    const auto disk = unit_disk(10);
    for (const Integrand& f : {rotation_energy(4.0), pq_energy(4.0, 2.0), detsq_energy()}) {
      for (std::uint64_t s = 0; s < 3; ++s) {
        for (const auto& dom : {d, disk}) {
          const MatrixField u = perturbed_identity(dom, 100 + s, 0.2);
          const auto an = energy_gradient(u, f);
          CHECK(oracle::relative_sup_error(an, fd_energy_gradient(u, f, 1e-5)) < 1e-6);
        }
      }
    }
  }

  TEST_CASE("infinite energy") {
    const auto d = unit_square(4);
    MatrixField u = MatrixField::from_function(
        d, 2, [](const Point& x) { return SmallVector(Eigen::Vector2d(-x.x(), x.y())); });
    const EnergyValue e = energy(u, barrier());
    CHECK_FALSE(e.finite());
    CHECK(std::isinf(e.value));
    CHECK_THROWS_AS(energy_gradient(u, barrier()), UndefinedGradientError);
    CHECK(energy(MatrixField::identity(d), barrier()).finite());
  }

  TEST_CASE("layout mismatch") {
    const auto d = unit_square(4);
    const MatrixField u3(d, 3);
    CHECK_THROWS_AS(energy(u3, detsq_energy()), DomainError);
    CHECK_THROWS_AS(MatrixField(d, 4), DomainError);
  }

  TEST_CASE("pairing examples") {
    const auto d = unit_square(9);
    const MatrixField id = MatrixField::identity(d);
    PolySubgradient w = PolySubgradient::zero(id, 0.0);
    CHECK(pairing(w, perturbed_identity(d, 3, 0.5)) == 0.0);
    std::fill(w.v2.begin(), w.v2.end(), 2.0);
    CHECK(pairing(w, id) == doctest::Approx(2.0).epsilon(1e-14));
    PolySubgradient w0 = PolySubgradient::zero(id, 0.0);
    for (std::size_t k = 0; k < id.num_nodes(); ++k) w0.u0[2 * k] = 1.0;
    CHECK(pairing(w0, id) == doctest::Approx(0.5).epsilon(1e-14));

    const MatrixField other = MatrixField::identity(unit_square(5));
    CHECK_THROWS_AS(pairing(w, other), DomainError);
  }

  TEST_CASE("Sobolev norm of the identity") {
    const auto d = unit_square(5);
    // |u|^2 + |J|^2 with p = 2: int (x^2 + y^2) + 2 over the unit square.
    const double midpoint = [] {
      double s = 0.0;
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
          const double x = (i + 0.5) / 4, y = (j + 0.5) / 4;
          s += (x * x + y * y + 2.0) / 16.0;
        }
      }
      return s;
    }();
    CHECK(sobolev_norm(MatrixField::identity(d), 2.0) == doctest::Approx(std::sqrt(midpoint)));
  }
}
