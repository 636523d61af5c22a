#pragma once

// All s x s minors of small matrices, their concatenation and its Jacobian.
//
// Slot layout of the minors vector of an N x n matrix A:
//
//   [ order-1 block | order-2 block | ... | order-min(N,n) block ]
//
// The order-1 block is A itself, flattened row-major. Inside the order-s
// block, entry (I, J) is det A[I, J] where I (resp. J) runs over the
// s-element row (resp. column) index subsets in lexicographic order, with
// I as the slow index. For square A the last slot is det A.

#include <array>
#include <span>

#include <Eigen/Core>

namespace polyreg {

inline constexpr int kMaxDim = 3;
inline constexpr int kMaxTau = 19;  // tau(3, 3) = 9 + 9 + 1

using SmallMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor,
                                  kMaxDim, kMaxDim>;
using SmallVector = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using MinorsVec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxTau, 1>;
// Rows are minor slots, columns are the row-major entries of A.
using MinorsJacobian = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor,
                                     kMaxTau, kMaxDim * kMaxDim>;

// Index subset of {0, 1, 2} with at most kMaxDim elements.
struct IndexSubset {
  std::array<int, kMaxDim> idx{};
  int size = 0;
};

// Lexicographically ordered s-subsets of {0, ..., dim-1}; 1 <= s <= dim <= 3.
std::span<const IndexSubset> index_subsets(int dim, int s);

int binomial(int n, int k);

class MinorsLayout {
 public:
  // Throws DomainError unless 1 <= rows, cols <= kMaxDim.
  MinorsLayout(int rows, int cols);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  int max_order() const noexcept { return rows_ < cols_ ? rows_ : cols_; }

  // Number of minors of order s: C(N,s) C(n,s). Zero outside 1..max_order().
  int sigma(int s) const noexcept;
  int tau() const noexcept { return tau_; }
  int tau2() const noexcept { return tau_ - rows_ * cols_; }
  // First slot of the order-s block.
  int offset(int s) const noexcept;

  bool operator==(const MinorsLayout&) const = default;

 private:
  int rows_;
  int cols_;
  int tau_;
};

struct MinorsVector {
  MinorsLayout layout;
  MinorsVec slots;
};

// Determinant of A[rows, cols] by cofactor expansion along the first row.
double sub_determinant(const SmallMatrix& a, const IndexSubset& rows, const IndexSubset& cols);

// Vector of all s x s minors of A. Throws DomainError for s outside
// 1..min(N, n) or unsupported dimensions.
MinorsVec minors_of_order(const SmallMatrix& a, int s);

// Concatenation of all minors of orders 1..min(N, n).
MinorsVector all_minors(const SmallMatrix& a);

// Same as all_minors().slots, written into `out` (resized to layout.tau()).
void all_minors_into(const MinorsLayout& layout, const SmallMatrix& a, MinorsVec& out);

// Minors of order >= 2 only; empty when min(N, n) == 1.
MinorsVec higher_minors(const SmallMatrix& a);

// Jacobian of all_minors at A, tau x (N n). The row of the det slot of a
// square matrix is its cofactor matrix, flattened row-major.
MinorsJacobian minors_jacobian(const SmallMatrix& a);
void minors_jacobian_into(const MinorsLayout& layout, const SmallMatrix& a, MinorsJacobian& out);

// Pulls a covector on minor slots back to a covector on the entries of A:
// returns g^T dT(A) reshaped as an N x n matrix.
SmallMatrix pull_back_minors_covector(const MinorsLayout& layout, const SmallMatrix& a,
                                      const MinorsVec& g);

}  // namespace polyreg
