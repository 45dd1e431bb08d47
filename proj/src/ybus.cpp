#include "gridjac/ybus.hpp"

#include <algorithm>
#include <cmath>

namespace gridjac {

namespace {

// --- small sparse helpers for the matrix-multiplication baseline ---------

CscMatrix<cplx> csc_diag(const std::vector<cplx>& d) {
  const index_t n = static_cast<index_t>(d.size());
  CscMatrix<cplx> a(n, n);
  a.row_idx.resize(n);
  a.nzval = d;
  for (index_t i = 0; i < n; ++i) {
    a.row_idx[i] = i;
    a.col_start[i + 1] = i + 1;
  }
  return a;
}

CscMatrix<cplx> csc_conj(CscMatrix<cplx> a) {
  for (auto& v : a.nzval) v = std::conj(v);
  return a;
}

CscMatrix<cplx> csc_scale(CscMatrix<cplx> a, cplx factor) {
  for (auto& v : a.nzval) v *= factor;
  return a;
}

// Gustavson-style product, structural (touched positions stay, zero values
// and all). Output columns sorted, so results are deterministic.
CscMatrix<cplx> spgemm(const CscMatrix<cplx>& a, const CscMatrix<cplx>& b) {
  if (a.n_cols != b.n_rows) throw std::domain_error("spgemm: dimension mismatch");
  CscMatrix<cplx> out(a.n_rows, b.n_cols);
  std::vector<cplx> acc(a.n_rows, cplx{0.0, 0.0});
  std::vector<char> mark(a.n_rows, 0);
  std::vector<index_t> touched;

  for (index_t j = 0; j < b.n_cols; ++j) {
    touched.clear();
    for (index_t kb = b.col_start[j]; kb < b.col_start[j + 1]; ++kb) {
      const index_t col_a = b.row_idx[kb];
      const cplx bv = b.nzval[kb];
      for (index_t ka = a.col_start[col_a]; ka < a.col_start[col_a + 1]; ++ka) {
        const index_t r = a.row_idx[ka];
        if (!mark[r]) {
          mark[r] = 1;
          touched.push_back(r);
          acc[r] = cplx{0.0, 0.0};
        }
        acc[r] += a.nzval[ka] * bv;
      }
    }
    std::sort(touched.begin(), touched.end());
    for (index_t r : touched) {
      out.row_idx.push_back(r);
      out.nzval.push_back(acc[r]);
      mark[r] = 0;
    }
    out.col_start[j + 1] = out.nnz();
  }
  return out;
}

// Pattern-merging sum a + factor*b.
CscMatrix<cplx> csc_axpy(const CscMatrix<cplx>& a, const CscMatrix<cplx>& b, double factor) {
  if (a.n_rows != b.n_rows || a.n_cols != b.n_cols)
    throw std::domain_error("csc add: dimension mismatch");
  CscMatrix<cplx> out(a.n_rows, a.n_cols);
  for (index_t j = 0; j < a.n_cols; ++j) {
    index_t ka = a.col_start[j], kb = b.col_start[j];
    const index_t ea = a.col_start[j + 1], eb = b.col_start[j + 1];
    while (ka < ea || kb < eb) {
      index_t ra = ka < ea ? a.row_idx[ka] : a.n_rows;
      index_t rb = kb < eb ? b.row_idx[kb] : a.n_rows;
      if (ra < rb) {
        out.row_idx.push_back(ra);
        out.nzval.push_back(a.nzval[ka++]);
      } else if (rb < ra) {
        out.row_idx.push_back(rb);
        out.nzval.push_back(factor * b.nzval[kb++]);
      } else {
        out.row_idx.push_back(ra);
        out.nzval.push_back(a.nzval[ka++] + factor * b.nzval[kb++]);
      }
    }
    out.col_start[j + 1] = out.nnz();
  }
  return out;
}

}  // namespace

CscMatrix<cplx> build_ybus(const IndexedNetwork& net) {
  TripletList<cplx> t(net.n_b, net.n_b);
  t.reserve(static_cast<size_t>(net.n_l) * 4 + net.n_b);

  for (index_t e = 0; e < net.n_l; ++e) {
    const index_t h = net.from_idx[e];
    const index_t k = net.to_idx[e];
    const cplx yhk = net.y_series[e];
    const double m = net.tap_m[e];
    const cplx shifter{std::cos(net.tap_phi[e]), std::sin(net.tap_phi[e])};
    t.add(h, h, (net.y_sh_from[e] + yhk) / (m * m));
    t.add(h, k, -(yhk / m) * shifter);
    t.add(k, h, -(yhk / m) * std::conj(shifter));
    t.add(k, k, net.y_sh_to[e] + yhk);
  }
  // diagonal entries are kept structurally present for every bus
  for (index_t i = 0; i < net.n_b; ++i) t.add(i, i, net.bus_shunt[i]);
  return csc_from_triplets(t);
}

YbusModel make_ybus_model(const IndexedNetwork& net, StorageMode mode) {
  YbusModel m;
  m.ybus = build_ybus(net);
  m.storage_mode = mode;
  m.vm = net.vm0;
  m.va = net.va0;
  const size_t n = static_cast<size_t>(net.n_b);
  m.u.assign(n, cplx{});
  m.v.assign(n, cplx{});
  m.i_bus.assign(n, cplx{});
  m.s.assign(n, cplx{});
  m.u_re.assign(n, 0.0);
  m.u_im.assign(n, 0.0);
  m.v_re.assign(n, 0.0);
  m.v_im.assign(n, 0.0);
  update_phasors(m);
  return m;
}

void update_phasors(YbusModel& m) {
  const size_t n = m.vm.size();
  if (m.storage_mode == StorageMode::interleaved) {
    for (size_t i = 0; i < n; ++i) {
      const cplx ui{std::cos(m.va[i]), std::sin(m.va[i])};
      m.u[i] = ui;
      m.v[i] = m.vm[i] * ui;
    }
    return;
  }
  // separate storage: update four contiguous real arrays, then convert to
  // the interleaved layout the sparse product wants. The conversion copy
  // belongs to this step.
  for (size_t i = 0; i < n; ++i) {
    m.u_re[i] = std::cos(m.va[i]);
    m.u_im[i] = std::sin(m.va[i]);
  }
  for (size_t i = 0; i < n; ++i) {
    m.v_re[i] = m.vm[i] * m.u_re[i];
    m.v_im[i] = m.vm[i] * m.u_im[i];
  }
  for (size_t i = 0; i < n; ++i) {
    m.u[i] = cplx{m.u_re[i], m.u_im[i]};
    m.v[i] = cplx{m.v_re[i], m.v_im[i]};
  }
}

const std::vector<cplx>& power_injection_ybus(YbusModel& m) {
  spmv_complex_into(m.ybus, m.v, m.i_bus);
  const size_t n = m.v.size();
  for (size_t i = 0; i < n; ++i) m.s[i] = m.v[i] * std::conj(m.i_bus[i]);
  return m.s;
}

CscMatrix<double> jacobian_pattern_from_ybus(const CscMatrix<cplx>& ybus) {
  const index_t n = ybus.n_cols;
  TripletList<double> t(2 * n, 2 * n);
  t.reserve(static_cast<size_t>(ybus.nnz()) * 4);
  for (index_t c = 0; c < n; ++c) {
    for (index_t k = ybus.col_start[c]; k < ybus.col_start[c + 1]; ++k) {
      const index_t r = ybus.row_idx[k];
      t.add(r, c, 0.0);
      t.add(r + n, c, 0.0);
      t.add(r, c + n, 0.0);
      t.add(r + n, c + n, 0.0);
    }
  }
  return csc_from_triplets(t);
}

JacobianPlanYbus build_jacobian_plan(const CscMatrix<cplx>& ybus) {
  const index_t n = ybus.n_cols;
  for (index_t i = 0; i < n; ++i) {
    if (ybus.find(i, i) < 0)
      throw PatternError("jacobian plan: ybus diagonal is structurally incomplete at bus " +
                         std::to_string(i));
  }

  JacobianPlanYbus plan;
  plan.j_pattern = jacobian_pattern_from_ybus(ybus);
  plan.ds_dtheta = pattern_clone_with_values(ybus, cplx{0.0, 0.0});
  plan.ds_dvm = pattern_clone_with_values(ybus, cplx{0.0, 0.0});

  // coordinate form of the ybus nonzeros
  const index_t nnz = ybus.nnz();
  std::vector<index_t> y_row(ybus.row_idx);
  std::vector<index_t> y_col(nnz);
  for (index_t c = 0; c < n; ++c)
    for (index_t k = ybus.col_start[c]; k < ybus.col_start[c + 1]; ++k) y_col[k] = c;

  auto block_positions = [&](int x, int y) {
    std::vector<index_t> p(nnz);
    const index_t row_off = (x - 1) * n;
    const index_t col_off = (y - 1) * n;
    for (index_t i = 0; i < nnz; ++i) {
      const index_t row = y_row[i] + row_off;
      const index_t col = y_col[i] + col_off;
      index_t found = -1;
      for (index_t k = plan.j_pattern.col_start[col]; k < plan.j_pattern.col_start[col + 1]; ++k) {
        if (plan.j_pattern.row_idx[k] == row) {
          found = k;
          break;  // first match wins
        }
      }
      if (found < 0)
        throw PatternError("jacobian plan: block (" + std::to_string(x) + "," + std::to_string(y) +
                           ") entry missing from pattern");
      p[i] = found;
    }
    return p;
  };

  plan.p11 = block_positions(1, 1);
  plan.p12 = block_positions(1, 2);
  plan.p21 = block_positions(2, 1);
  plan.p22 = block_positions(2, 2);
  return plan;
}

void derivatives_two_pass(YbusModel& m, JacobianPlanYbus& plan) {
  if (!plan.ds_dtheta.same_pattern(m.ybus))
    throw PlanStaleError("two-pass derivatives: plan does not match the model's ybus pattern");

  const auto& yp = m.ybus.col_start;
  const auto& yi = m.ybus.row_idx;
  const auto& yv = m.ybus.nzval;
  auto& dt = plan.ds_dtheta.nzval;
  auto& dv = plan.ds_dvm.nzval;
  const index_t n = m.ybus.n_cols;

  std::copy(yv.begin(), yv.end(), dt.begin());
  std::copy(yv.begin(), yv.end(), dv.begin());
  std::fill(m.i_bus.begin(), m.i_bus.end(), cplx{0.0, 0.0});

  // pass 1: column scaling and the admittance-vector product
  for (index_t j = 0; j < n; ++j) {
    const cplx vj = m.v[j];
    const cplx uj = m.u[j];
    for (index_t k = yp[j]; k < yp[j + 1]; ++k) {
      m.i_bus[yi[k]] += yv[k] * vj;
      dt[k] *= vj;
      dv[k] *= uj;
    }
  }

  // pass 2: conjugations and diagonal corrections
  for (index_t j = 0; j < n; ++j) {
    for (index_t k = yp[j]; k < yp[j + 1]; ++k) {
      const index_t i = yi[k];
      dv[k] = m.v[i] * std::conj(dv[k]);
      if (i == j) {
        dt[k] -= m.i_bus[j];
        dv[k] += std::conj(m.i_bus[j]) * m.u[j];
      }
      // the -j factor is the sign that matches finite differences of
      // [Re S; Im S] w.r.t. theta (see the derivative tests)
      dt[k] = cplx{0.0, -1.0} * std::conj(dt[k]) * m.v[i];
    }
  }
}

std::pair<CscMatrix<cplx>, CscMatrix<cplx>> derivatives_matmul(const YbusModel& m) {
  const index_t n = m.ybus.n_cols;
  std::vector<cplx> i_c = spmv_complex(m.ybus, m.v);

  std::vector<cplx> i_conj(n), icu(n);
  for (index_t i = 0; i < n; ++i) {
    i_conj[i] = std::conj(i_c[i]);
    icu[i] = std::conj(i_c[i]) * m.u[i];
  }
  const CscMatrix<cplx> diag_v = csc_diag(m.v);
  const CscMatrix<cplx> diag_u = csc_diag(m.u);

  // dS/dtheta = j * diag(V) * (diag(conj(I)) - conj(Y * diag(V)))
  CscMatrix<cplx> inner = csc_axpy(csc_diag(i_conj), csc_conj(spgemm(m.ybus, diag_v)), -1.0);
  CscMatrix<cplx> ds_dtheta = csc_scale(spgemm(diag_v, inner), cplx{0.0, 1.0});

  // dS/dVm = diag(conj(I) .* U) + diag(V) * conj(Y * diag(U))
  CscMatrix<cplx> ds_dvm =
      csc_axpy(csc_diag(icu), spgemm(diag_v, csc_conj(spgemm(m.ybus, diag_u))), 1.0);

  return {std::move(ds_dtheta), std::move(ds_dvm)};
}

const CscMatrix<double>& assemble_jacobian_inplace(JacobianPlanYbus& plan) {
  const index_t nnz = plan.ds_dtheta.nnz();
  if (static_cast<index_t>(plan.p11.size()) != nnz)
    throw PlanStaleError("jacobian assembly: index arrays do not match the derivative matrices");

  const auto& dt = plan.ds_dtheta.nzval;
  const auto& dv = plan.ds_dvm.nzval;
  auto& jv = plan.j_pattern.nzval;
  for (index_t i = 0; i < nnz; ++i) jv[plan.p11[i]] = dt[i].real();
  for (index_t i = 0; i < nnz; ++i) jv[plan.p12[i]] = dv[i].real();
  for (index_t i = 0; i < nnz; ++i) jv[plan.p21[i]] = dt[i].imag();
  for (index_t i = 0; i < nnz; ++i) jv[plan.p22[i]] = dv[i].imag();
  return plan.j_pattern;
}

CscMatrix<double> assemble_jacobian_concat(const CscMatrix<cplx>& ds_dtheta,
                                           const CscMatrix<cplx>& ds_dvm) {
  return concat4(real_part(ds_dtheta), real_part(ds_dvm), imag_part(ds_dtheta),
                 imag_part(ds_dvm));
}

}  // namespace gridjac
