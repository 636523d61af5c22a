#pragma once

// Brute-force minors: every k x k submatrix, rows outer and columns inner,
// each in lexicographic order, with determinants summed over all k!
// permutations. Shares no code with the library.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace oracle {

struct Minor {
  double value = 0.0;
  double magnitude = 0.0;  // sum of |permutation terms|, the scale of the rounding error
};

// Sorted index lists of size k drawn from 0..n-1, in lexicographic order.
inline std::vector<std::vector<int>> subsets(int n, int k) {
  std::vector<std::vector<int>> out;
  for (int mask = 0; mask < (1 << n); ++mask) {
    if (__builtin_popcount(mask) != k) continue;
    std::vector<int> s;
    for (int i = 0; i < n; ++i) {
      if (mask & (1 << i)) s.push_back(i);
    }
    out.push_back(s);
  }
  std::sort(out.begin(), out.end());
  return out;
}

template <class Matrix>
Minor leibniz(const Matrix& a, const std::vector<int>& rows, const std::vector<int>& cols) {
  const int k = static_cast<int>(rows.size());
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  Minor m;
  do {
    int inversions = 0;
    for (int i = 0; i < k; ++i) {
      for (int j = i + 1; j < k; ++j) inversions += perm[i] > perm[j];
    }
    double term = inversions % 2 ? -1.0 : 1.0;
    for (int i = 0; i < k; ++i) term *= a(rows[i], cols[perm[i]]);
    m.value += term;
    m.magnitude += std::abs(term);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return m;
}

template <class Matrix>
std::vector<Minor> minors_of_order(const Matrix& a, int k) {
  std::vector<Minor> out;
  const int n_rows = static_cast<int>(a.rows());
  const int n_cols = static_cast<int>(a.cols());
  for (const auto& r : subsets(n_rows, k)) {
    for (const auto& c : subsets(n_cols, k)) out.push_back(leibniz(a, r, c));
  }
  return out;
}

// The full minors vector, orders 1..min(N, n) concatenated.
template <class Matrix>
std::vector<Minor> all_minors(const Matrix& a) {
  std::vector<Minor> out;
  const int m = static_cast<int>(std::min(a.rows(), a.cols()));
  for (int k = 1; k <= m; ++k) {
    const auto block = minors_of_order(a, k);
    out.insert(out.end(), block.begin(), block.end());
  }
  return out;
}

}  // namespace oracle
