#pragma once

#include <vector>

#include "gridjac/common.hpp"
#include "gridjac/netcase.hpp"
#include "gridjac/sparse.hpp"

namespace gridjac {

/// Row-major dense matrix, used only for reference computations and tests.
template <typename T>
struct DenseMatrix {
  index_t n_rows = 0;
  index_t n_cols = 0;
  std::vector<T> vals;

  DenseMatrix() = default;
  DenseMatrix(index_t rows, index_t cols)
      : n_rows(rows), n_cols(cols), vals(static_cast<size_t>(rows) * cols, T{}) {}

  T& operator()(index_t r, index_t c) { return vals[static_cast<size_t>(r) * n_cols + c]; }
  const T& operator()(index_t r, index_t c) const {
    return vals[static_cast<size_t>(r) * n_cols + c];
  }
};

template <typename T>
DenseMatrix<T> to_dense(const CscMatrix<T>& a) {
  DenseMatrix<T> d(a.n_rows, a.n_cols);
  for (index_t c = 0; c < a.n_cols; ++c)
    for (index_t k = a.col_start[c]; k < a.col_start[c + 1]; ++k) d(a.row_idx[k], c) += a.nzval[k];
  return d;
}

inline constexpr index_t kDefaultOracleCap = 5000;

/// Bus power injections from a dense admittance matrix, O(n_b^2).
/// Refuses systems larger than `cap` buses.
std::vector<cplx> dense_power_oracle(const IndexedNetwork& net, const std::vector<double>& vm,
                                     const std::vector<double>& va,
                                     index_t cap = kDefaultOracleCap);

/// Central-difference Jacobian of [Re S; Im S] w.r.t. [theta; V_m], columns
/// ordered theta first. Built entirely on the dense oracle.
DenseMatrix<double> finite_difference_jacobian(const IndexedNetwork& net,
                                               const std::vector<double>& vm,
                                               const std::vector<double>& va, double h = 1e-6,
                                               index_t cap = kDefaultOracleCap);

struct MismatchReport {
  double max_abs = 0.0;
  double max_rel = 0.0;
  index_t row = -1;  // position of the worst absolute mismatch
  index_t col = -1;
  bool pass = true;  // every |s - d| <= max(rel_tol*|d|, abs_floor)
};

/// Compares every position of the densified sparse matrix against D,
/// structural zeros included.
MismatchReport compare_sparse_dense(const CscMatrix<double>& j, const DenseMatrix<double>& d,
                                    double rel_tol, double abs_floor);

}  // namespace gridjac
