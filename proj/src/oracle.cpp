#include "gridjac/oracle.hpp"

#include <cmath>

namespace gridjac {

namespace {

// Dense admittance matrix stamped directly from branch parameters. Kept
// separate from the sparse build path on purpose: this is the reference.
DenseMatrix<cplx> dense_ybus(const IndexedNetwork& net) {
  DenseMatrix<cplx> y(net.n_b, net.n_b);
  for (index_t e = 0; e < net.n_l; ++e) {
    const index_t h = net.from_idx[e];
    const index_t k = net.to_idx[e];
    const cplx yhk = net.y_series[e];
    const double m = net.tap_m[e];
    const cplx shifter{std::cos(net.tap_phi[e]), std::sin(net.tap_phi[e])};
    y(h, h) += (net.y_sh_from[e] + yhk) / (m * m);
    y(h, k) += -(yhk / m) * shifter;
    y(k, h) += -(yhk / m) * std::conj(shifter);
    y(k, k) += net.y_sh_to[e] + yhk;
  }
  for (index_t i = 0; i < net.n_b; ++i) y(i, i) += net.bus_shunt[i];
  return y;
}

}  // namespace

std::vector<cplx> dense_power_oracle(const IndexedNetwork& net, const std::vector<double>& vm,
                                     const std::vector<double>& va, index_t cap) {
  if (net.n_b > cap)
    throw OracleCapError("dense oracle refused: " + std::to_string(net.n_b) +
                         " buses exceeds cap " + std::to_string(cap));
  if (static_cast<index_t>(vm.size()) != net.n_b || static_cast<index_t>(va.size()) != net.n_b)
    throw std::domain_error("dense oracle: state dimension mismatch");

  const DenseMatrix<cplx> y = dense_ybus(net);
  std::vector<cplx> v(net.n_b);
  for (index_t i = 0; i < net.n_b; ++i) v[i] = vm[i] * cplx{std::cos(va[i]), std::sin(va[i])};

  std::vector<cplx> s(net.n_b);
  for (index_t i = 0; i < net.n_b; ++i) {
    cplx current{0.0, 0.0};
    for (index_t j = 0; j < net.n_b; ++j) current += y(i, j) * v[j];
    s[i] = v[i] * std::conj(current);
  }
  return s;
}

DenseMatrix<double> finite_difference_jacobian(const IndexedNetwork& net,
                                               const std::vector<double>& vm,
                                               const std::vector<double>& va, double h,
                                               index_t cap) {
  if (h <= 0.0) throw std::domain_error("finite differences: step must be positive");
  if (net.n_b > cap)
    throw OracleCapError("finite-difference oracle refused: " + std::to_string(net.n_b) +
                         " buses exceeds cap " + std::to_string(cap));

  const index_t n = net.n_b;
  DenseMatrix<double> jac(2 * n, 2 * n);
  std::vector<double> vm_w = vm;
  std::vector<double> va_w = va;

  auto fill_column = [&](index_t col) {
    const bool is_theta = col < n;
    std::vector<double>& target = is_theta ? va_w : vm_w;
    const index_t i = is_theta ? col : col - n;
    const double saved = target[i];

    target[i] = saved + h;
    const std::vector<cplx> plus = dense_power_oracle(net, vm_w, va_w, cap);
    target[i] = saved - h;
    const std::vector<cplx> minus = dense_power_oracle(net, vm_w, va_w, cap);
    target[i] = saved;

    const double scale = 0.5 / h;
    for (index_t r = 0; r < n; ++r) {
      jac(r, col) = (plus[r].real() - minus[r].real()) * scale;
      jac(r + n, col) = (plus[r].imag() - minus[r].imag()) * scale;
    }
  };

  for (index_t col = 0; col < 2 * n; ++col) fill_column(col);
  return jac;
}

MismatchReport compare_sparse_dense(const CscMatrix<double>& j, const DenseMatrix<double>& d,
                                    double rel_tol, double abs_floor) {
  if (j.n_rows != d.n_rows || j.n_cols != d.n_cols)
    throw std::domain_error("compare_sparse_dense: dimension mismatch");

  const DenseMatrix<double> jd = to_dense(j);
  MismatchReport rep;
  for (index_t r = 0; r < d.n_rows; ++r) {
    for (index_t c = 0; c < d.n_cols; ++c) {
      const double ref = d(r, c);
      const double abs_err = std::abs(jd(r, c) - ref);
      const double rel_err = abs_err / std::max(std::abs(ref), abs_floor);
      if (abs_err > rep.max_abs) {
        rep.max_abs = abs_err;
        rep.row = r;
        rep.col = c;
      }
      rep.max_rel = std::max(rep.max_rel, rel_err);
      if (abs_err > std::max(rel_tol * std::abs(ref), abs_floor)) rep.pass = false;
    }
  }
  return rep;
}

}  // namespace gridjac
