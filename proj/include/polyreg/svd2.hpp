#pragma once

#include <Eigen/Core>

namespace polyreg {

// Closed-form SVD of a real 2x2 matrix, A = U diag(s1, s2) V^T, with U and V
// proper rotations, s1 >= |s2| and sign(s2) = sign(det A).
struct Svd2 {
  Eigen::Matrix2d u;
  Eigen::Matrix2d v;
  double s1 = 0.0;
  double s2 = 0.0;
};

Svd2 svd2(const Eigen::Matrix2d& a);

// mu1 = sgn(det A) lambda1, mu2 = lambda2, where lambda1 >= lambda2 >= 0 are
// the singular values. mu1 * mu2 = det A; sgn(0) is taken as +1.
struct SignedSingularValues {
  double mu1 = 0.0;
  double mu2 = 0.0;
};

SignedSingularValues signed_svd(const Eigen::Matrix2d& a);

}  // namespace polyreg
