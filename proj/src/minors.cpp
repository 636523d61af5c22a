#include "polyreg/minors.hpp"

#include <string>

#include "polyreg/errors.hpp"

namespace polyreg {

namespace {

constexpr IndexSubset S(int a) { return {{a, 0, 0}, 1}; }
constexpr IndexSubset S(int a, int b) { return {{a, b, 0}, 2}; }
constexpr IndexSubset S(int a, int b, int c) { return {{a, b, c}, 3}; }

constexpr std::array<IndexSubset, 1> kDim1Order1{S(0)};
constexpr std::array<IndexSubset, 2> kDim2Order1{S(0), S(1)};
constexpr std::array<IndexSubset, 1> kDim2Order2{S(0, 1)};
constexpr std::array<IndexSubset, 3> kDim3Order1{S(0), S(1), S(2)};
constexpr std::array<IndexSubset, 3> kDim3Order2{S(0, 1), S(0, 2), S(1, 2)};
constexpr std::array<IndexSubset, 1> kDim3Order3{S(0, 1, 2)};

void check_layout_matches(const MinorsLayout& layout, const SmallMatrix& a) {
  if (a.rows() != layout.rows() || a.cols() != layout.cols()) {
    throw DomainError("matrix is " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                      ", layout expects " + std::to_string(layout.rows()) + "x" +
                      std::to_string(layout.cols()));
  }
}

// Subset with position `skip` removed.
IndexSubset drop(const IndexSubset& s, int skip) {
  IndexSubset out;
  for (int k = 0; k < s.size; ++k) {
    if (k != skip) out.idx[out.size++] = s.idx[k];
  }
  return out;
}

}  // namespace

std::span<const IndexSubset> index_subsets(int dim, int s) {
  switch (dim * 4 + s) {
    case 1 * 4 + 1: return kDim1Order1;
    case 2 * 4 + 1: return kDim2Order1;
    case 2 * 4 + 2: return kDim2Order2;
    case 3 * 4 + 1: return kDim3Order1;
    case 3 * 4 + 2: return kDim3Order2;
    case 3 * 4 + 3: return kDim3Order3;
    default:
      throw DomainError("no " + std::to_string(s) + "-subsets of a " + std::to_string(dim) +
                        "-element index set are tabulated");
  }
}

int binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  int r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

MinorsLayout::MinorsLayout(int rows, int cols) : rows_(rows), cols_(cols), tau_(0) {
  if (rows < 1 || cols < 1 || rows > kMaxDim || cols > kMaxDim) {
    throw DomainError("minors are supported for 1 <= N, n <= 3, got " + std::to_string(rows) +
                      "x" + std::to_string(cols));
  }
  for (int s = 1; s <= max_order(); ++s) tau_ += sigma(s);
}

int MinorsLayout::sigma(int s) const noexcept {
  if (s < 1 || s > max_order()) return 0;
  return binomial(rows_, s) * binomial(cols_, s);
}

int MinorsLayout::offset(int s) const noexcept {
  int off = 0;
  for (int k = 1; k < s; ++k) off += sigma(k);
  return off;
}

double sub_determinant(const SmallMatrix& a, const IndexSubset& r, const IndexSubset& c) {
  const auto& i = r.idx;
  const auto& j = c.idx;
  switch (r.size) {
    case 1:
      return a(i[0], j[0]);
    case 2:
      return a(i[0], j[0]) * a(i[1], j[1]) - a(i[0], j[1]) * a(i[1], j[0]);
    case 3:
      return a(i[0], j[0]) * (a(i[1], j[1]) * a(i[2], j[2]) - a(i[1], j[2]) * a(i[2], j[1])) -
             a(i[0], j[1]) * (a(i[1], j[0]) * a(i[2], j[2]) - a(i[1], j[2]) * a(i[2], j[0])) +
             a(i[0], j[2]) * (a(i[1], j[0]) * a(i[2], j[1]) - a(i[1], j[1]) * a(i[2], j[0]));
    default:
      return 1.0;  // empty minor
  }
}

MinorsVec minors_of_order(const SmallMatrix& a, int s) {
  const MinorsLayout layout(static_cast<int>(a.rows()), static_cast<int>(a.cols()));
  if (s < 1 || s > layout.max_order()) {
    throw DomainError("minor order " + std::to_string(s) + " outside 1.." +
                      std::to_string(layout.max_order()));
  }
  MinorsVec out(layout.sigma(s));
  int k = 0;
  for (const auto& rows : index_subsets(layout.rows(), s)) {
    for (const auto& cols : index_subsets(layout.cols(), s)) {
      out[k++] = sub_determinant(a, rows, cols);
    }
  }
  return out;
}

void all_minors_into(const MinorsLayout& layout, const SmallMatrix& a, MinorsVec& out) {
  check_layout_matches(layout, a);
  out.resize(layout.tau());
  int k = 0;
  for (int s = 1; s <= layout.max_order(); ++s) {
    for (const auto& rows : index_subsets(layout.rows(), s)) {
      for (const auto& cols : index_subsets(layout.cols(), s)) {
        out[k++] = sub_determinant(a, rows, cols);
      }
    }
  }
}

MinorsVector all_minors(const SmallMatrix& a) {
  MinorsVector v{MinorsLayout(static_cast<int>(a.rows()), static_cast<int>(a.cols())), {}};
  all_minors_into(v.layout, a, v.slots);
  return v;
}

MinorsVec higher_minors(const SmallMatrix& a) {
  const MinorsVector v = all_minors(a);
  const int first = v.layout.rows() * v.layout.cols();
  return v.slots.tail(v.layout.tau() - first);
}

void minors_jacobian_into(const MinorsLayout& layout, const SmallMatrix& a, MinorsJacobian& out) {
  check_layout_matches(layout, a);
  const int n = layout.cols();
  out.setZero(layout.tau(), layout.rows() * n);
  int k = 0;
  for (int s = 1; s <= layout.max_order(); ++s) {
    for (const auto& rows : index_subsets(layout.rows(), s)) {
      for (const auto& cols : index_subsets(n, s)) {
        for (int p = 0; p < s; ++p) {
          const IndexSubset rr = drop(rows, p);
          for (int q = 0; q < s; ++q) {
            const double sign = ((p + q) % 2 == 0) ? 1.0 : -1.0;
            out(k, rows.idx[p] * n + cols.idx[q]) = sign * sub_determinant(a, rr, drop(cols, q));
          }
        }
        ++k;
      }
    }
  }
}

MinorsJacobian minors_jacobian(const SmallMatrix& a) {
  const MinorsLayout layout(static_cast<int>(a.rows()), static_cast<int>(a.cols()));
  MinorsJacobian j;
  minors_jacobian_into(layout, a, j);
  return j;
}

SmallMatrix pull_back_minors_covector(const MinorsLayout& layout, const SmallMatrix& a,
                                      const MinorsVec& g) {
  check_layout_matches(layout, a);
  SmallMatrix out = SmallMatrix::Zero(layout.rows(), layout.cols());
  int k = 0;
  for (int s = 1; s <= layout.max_order(); ++s) {
    for (const auto& rows : index_subsets(layout.rows(), s)) {
      for (const auto& cols : index_subsets(layout.cols(), s)) {
        const double gk = g[k++];
        if (gk == 0.0) continue;
        for (int p = 0; p < s; ++p) {
          const IndexSubset rr = drop(rows, p);
          for (int q = 0; q < s; ++q) {
            const double sign = ((p + q) % 2 == 0) ? 1.0 : -1.0;
            out(rows.idx[p], cols.idx[q]) += gk * sign * sub_determinant(a, rr, drop(cols, q));
          }
        }
      }
    }
  }
  return out;
}

}  // namespace polyreg
