#include "polyreg/svd2.hpp"

#include <cmath>

namespace polyreg {

namespace {

Eigen::Matrix2d rotation(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Eigen::Matrix2d r;
  r << c, -s, s, c;
  return r;
}

}  // namespace

Svd2 svd2(const Eigen::Matrix2d& a) {
  // A = Rot(phi) diag(Q + R, Q - R) Rot(theta), from the decomposition of A
  // into a conformal part (E, H) and an anticonformal part (F, G).
  const double e = 0.5 * (a(0, 0) + a(1, 1));
  const double f = 0.5 * (a(0, 0) - a(1, 1));
  const double g = 0.5 * (a(1, 0) + a(0, 1));
  const double h = 0.5 * (a(1, 0) - a(0, 1));
  const double q = std::hypot(e, h);
  const double r = std::hypot(f, g);
  const double a1 = std::atan2(g, f);
  const double a2 = std::atan2(h, e);
  const double theta = 0.5 * (a2 - a1);
  const double phi = 0.5 * (a2 + a1);

  Svd2 out;
  out.s1 = q + r;
  out.s2 = q - r;
  out.u = rotation(phi);
  out.v = rotation(-theta);
  return out;
}

SignedSingularValues signed_svd(const Eigen::Matrix2d& a) {
  const Svd2 d = svd2(a);
  // s2 already carries the sign of det A.
  const double sign = d.s2 < 0.0 ? -1.0 : 1.0;
  return {sign * d.s1, std::abs(d.s2)};
}

}  // namespace polyreg
