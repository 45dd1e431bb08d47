#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "gridjac/common.hpp"

namespace gridjac {

/// Compressed-sparse-column matrix. col_start has n_cols+1 entries; row
/// indices are strictly increasing within each column. Explicit zeros are
/// legal and preserved: frozen sparsity patterns rely on them.
template <typename T>
struct CscMatrix {
  index_t n_rows = 0;
  index_t n_cols = 0;
  std::vector<index_t> col_start;  // offsets into row_idx/nzval
  std::vector<index_t> row_idx;
  std::vector<T> nzval;

  CscMatrix() = default;
  CscMatrix(index_t rows, index_t cols)
      : n_rows(rows), n_cols(cols), col_start(static_cast<size_t>(cols) + 1, 0) {}

  index_t nnz() const { return static_cast<index_t>(nzval.size()); }

  /// Position of (r, c) in nzval, or -1 if structurally absent.
  index_t find(index_t r, index_t c) const {
    for (index_t k = col_start[c]; k < col_start[c + 1]; ++k) {
      if (row_idx[k] == r) return k;
    }
    return -1;
  }

  T at(index_t r, index_t c) const {
    index_t k = find(r, c);
    return k < 0 ? T{} : nzval[k];
  }

  bool same_pattern(const CscMatrix& other) const {
    return n_rows == other.n_rows && n_cols == other.n_cols &&
           col_start == other.col_start && row_idx == other.row_idx;
  }

  /// Throws std::logic_error if the CSC invariants are violated.
  void check_valid() const {
    if (col_start.size() != static_cast<size_t>(n_cols) + 1)
      throw std::logic_error("csc: col_start length mismatch");
    if (col_start.front() != 0) throw std::logic_error("csc: col_start[0] != 0");
    if (col_start.back() != nnz()) throw std::logic_error("csc: col_start[n] != nnz");
    if (row_idx.size() != nzval.size()) throw std::logic_error("csc: row/value length mismatch");
    for (index_t c = 0; c < n_cols; ++c) {
      if (col_start[c] > col_start[c + 1]) throw std::logic_error("csc: col_start decreasing");
      for (index_t k = col_start[c]; k < col_start[c + 1]; ++k) {
        if (row_idx[k] < 0 || row_idx[k] >= n_rows) throw std::logic_error("csc: row out of range");
        if (k > col_start[c] && row_idx[k - 1] >= row_idx[k])
          throw std::logic_error("csc: rows not strictly increasing");
      }
    }
  }
};

/// Coordinate-format staging list for CSC construction.
template <typename T>
struct TripletList {
  index_t n_rows = 0;
  index_t n_cols = 0;
  std::vector<index_t> rows;
  std::vector<index_t> cols;
  std::vector<T> vals;

  TripletList() = default;
  TripletList(index_t nr, index_t nc) : n_rows(nr), n_cols(nc) {}

  void add(index_t r, index_t c, T v) {
    rows.push_back(r);
    cols.push_back(c);
    vals.push_back(v);
  }

  size_t size() const { return vals.size(); }

  void reserve(size_t n) {
    rows.reserve(n);
    cols.reserve(n);
    vals.reserve(n);
  }
};

/// Builds a CSC matrix from triplets. Duplicate coordinates are summed in
/// insertion order; columns come out sorted. Out-of-range coordinates throw.
template <typename T>
CscMatrix<T> csc_from_triplets(const TripletList<T>& t) {
  const size_t m = t.size();
  if (t.rows.size() != m || t.cols.size() != m)
    throw std::invalid_argument("triplets: array length mismatch");
  for (size_t i = 0; i < m; ++i) {
    if (t.rows[i] < 0 || t.rows[i] >= t.n_rows || t.cols[i] < 0 || t.cols[i] >= t.n_cols)
      throw std::out_of_range("triplets: coordinate out of range");
  }

  CscMatrix<T> a(t.n_rows, t.n_cols);
  // counting pass, then a stable scatter by column
  std::vector<index_t> count(static_cast<size_t>(t.n_cols), 0);
  for (size_t i = 0; i < m; ++i) count[t.cols[i]]++;
  std::vector<index_t> offset(static_cast<size_t>(t.n_cols) + 1, 0);
  for (index_t c = 0; c < t.n_cols; ++c) offset[c + 1] = offset[c] + count[c];

  std::vector<index_t> order(m);
  {
    std::vector<index_t> next(offset.begin(), offset.end() - 1);
    for (size_t i = 0; i < m; ++i) order[next[t.cols[i]]++] = static_cast<index_t>(i);
  }

  // per column: stable sort by row, then merge duplicates left to right
  std::vector<index_t> scratch;
  for (index_t c = 0; c < t.n_cols; ++c) {
    scratch.assign(order.begin() + offset[c], order.begin() + offset[c + 1]);
    std::stable_sort(scratch.begin(), scratch.end(),
                     [&](index_t x, index_t y) { return t.rows[x] < t.rows[y]; });
    for (size_t p = 0; p < scratch.size();) {
      const index_t r = t.rows[scratch[p]];
      T sum = t.vals[scratch[p]];
      ++p;
      while (p < scratch.size() && t.rows[scratch[p]] == r) {
        sum += t.vals[scratch[p]];
        ++p;
      }
      a.row_idx.push_back(r);
      a.nzval.push_back(sum);
    }
    a.col_start[c + 1] = a.nnz();
  }
  return a;
}

/// y += nothing; y is overwritten. Accumulation runs column-major over the
/// nonzeros, so results are deterministic for a fixed matrix.
inline void spmv_complex_into(const CscMatrix<cplx>& a, const std::vector<cplx>& x,
                              std::vector<cplx>& y) {
  if (static_cast<index_t>(x.size()) != a.n_cols)
    throw std::domain_error("spmv: dimension mismatch");
  y.assign(static_cast<size_t>(a.n_rows), cplx{0.0, 0.0});
  for (index_t j = 0; j < a.n_cols; ++j) {
    const cplx xj = x[j];
    for (index_t k = a.col_start[j]; k < a.col_start[j + 1]; ++k) {
      y[a.row_idx[k]] += a.nzval[k] * xj;
    }
  }
}

inline std::vector<cplx> spmv_complex(const CscMatrix<cplx>& a, const std::vector<cplx>& x) {
  std::vector<cplx> y;
  spmv_complex_into(a, x, y);
  return y;
}

/// Block matrix [[a11, a12], [a21, a22]] in valid CSC form.
template <typename T>
CscMatrix<T> concat4(const CscMatrix<T>& a11, const CscMatrix<T>& a12, const CscMatrix<T>& a21,
                     const CscMatrix<T>& a22) {
  if (a11.n_rows != a12.n_rows || a21.n_rows != a22.n_rows || a11.n_cols != a21.n_cols ||
      a12.n_cols != a22.n_cols)
    throw std::domain_error("concat4: non-conformable blocks");

  const index_t top = a11.n_rows;
  CscMatrix<T> out(a11.n_rows + a21.n_rows, a11.n_cols + a12.n_cols);
  out.row_idx.reserve(a11.nnz() + a12.nnz() + a21.nnz() + a22.nnz());
  out.nzval.reserve(out.row_idx.capacity());

  auto emit_column = [&](const CscMatrix<T>& upper, const CscMatrix<T>& lower, index_t c,
                         index_t out_c) {
    for (index_t k = upper.col_start[c]; k < upper.col_start[c + 1]; ++k) {
      out.row_idx.push_back(upper.row_idx[k]);
      out.nzval.push_back(upper.nzval[k]);
    }
    for (index_t k = lower.col_start[c]; k < lower.col_start[c + 1]; ++k) {
      out.row_idx.push_back(lower.row_idx[k] + top);
      out.nzval.push_back(lower.nzval[k]);
    }
    out.col_start[out_c + 1] = out.nnz();
  };

  for (index_t c = 0; c < a11.n_cols; ++c) emit_column(a11, a21, c, c);
  for (index_t c = 0; c < a12.n_cols; ++c) emit_column(a12, a22, c, a11.n_cols + c);
  return out;
}

/// Same structure as `a`, every value set to `fill`. The structural arrays
/// are copied verbatim so frozen patterns can be reused for in-place updates.
template <typename T>
CscMatrix<T> pattern_clone_with_values(const CscMatrix<T>& a, T fill) {
  CscMatrix<T> out;
  out.n_rows = a.n_rows;
  out.n_cols = a.n_cols;
  out.col_start = a.col_start;
  out.row_idx = a.row_idx;
  out.nzval.assign(a.nzval.size(), fill);
  return out;
}

inline CscMatrix<double> real_part(const CscMatrix<cplx>& a) {
  CscMatrix<double> out;
  out.n_rows = a.n_rows;
  out.n_cols = a.n_cols;
  out.col_start = a.col_start;
  out.row_idx = a.row_idx;
  out.nzval.resize(a.nzval.size());
  for (size_t k = 0; k < a.nzval.size(); ++k) out.nzval[k] = a.nzval[k].real();
  return out;
}

inline CscMatrix<double> imag_part(const CscMatrix<cplx>& a) {
  CscMatrix<double> out;
  out.n_rows = a.n_rows;
  out.n_cols = a.n_cols;
  out.col_start = a.col_start;
  out.row_idx = a.row_idx;
  out.nzval.resize(a.nzval.size());
  for (size_t k = 0; k < a.nzval.size(); ++k) out.nzval[k] = a.nzval[k].imag();
  return out;
}

}  // namespace gridjac
