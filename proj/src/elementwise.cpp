#include "gridjac/elementwise.hpp"

#include <cmath>

#include "gridjac/ybus.hpp"

namespace gridjac {

BranchSoA build_branch_soa(const IndexedNetwork& net) {
  BranchSoA soa;
  soa.n_l = net.n_l;
  soa.n_b = net.n_b;
  const size_t nl = static_cast<size_t>(net.n_l);
  soa.from_idx = net.from_idx;
  soa.to_idx = net.to_idx;
  soa.a_hh_g.resize(nl);
  soa.a_hh_b.resize(nl);
  soa.a_hk_g.resize(nl);
  soa.a_hk_b.resize(nl);
  soa.a_kk_g.resize(nl);
  soa.a_kk_b.resize(nl);
  soa.phi = net.tap_phi;

  for (size_t e = 0; e < nl; ++e) {
    const double m = net.tap_m[e];
    const cplx a_hh = (net.y_sh_from[e] + net.y_series[e]) / (m * m);
    const cplx a_hk = net.y_series[e] / m;
    const cplx a_kk = net.y_sh_to[e] + net.y_series[e];
    soa.a_hh_g[e] = a_hh.real();
    soa.a_hh_b[e] = a_hh.imag();
    soa.a_hk_g[e] = a_hk.real();
    soa.a_hk_b[e] = a_hk.imag();
    soa.a_kk_g[e] = a_kk.real();
    soa.a_kk_b[e] = a_kk.imag();
  }

  soa.shunt_g.resize(net.n_b);
  soa.shunt_b.resize(net.n_b);
  for (index_t i = 0; i < net.n_b; ++i) {
    soa.shunt_g[i] = net.bus_shunt[i].real();
    soa.shunt_b[i] = net.bus_shunt[i].imag();
  }
  return soa;
}

ElemWorkspace make_elem_workspace(const IndexedNetwork& net) {
  ElemWorkspace ws;
  ws.n_l = net.n_l;
  ws.n_b = net.n_b;
  const size_t nl = static_cast<size_t>(net.n_l);
  ws.vh.resize(nl);
  ws.vk.resize(nl);
  ws.th.resize(nl);
  ws.tk.resize(nl);
  ws.ph.resize(nl);
  ws.qh.resize(nl);
  ws.pk.resize(nl);
  ws.qk.resize(nl);
  ws.partials.assign(16 * nl + 2 * static_cast<size_t>(net.n_b), 0.0);
  return ws;
}

void eval_powers(const BranchSoA& soa, ElemWorkspace& ws, const std::vector<double>& vm,
                 const std::vector<double>& va) {
  const index_t nl = soa.n_l;
  for (index_t e = 0; e < nl; ++e) {
    ws.vh[e] = vm[soa.from_idx[e]];
    ws.vk[e] = vm[soa.to_idx[e]];
    ws.th[e] = va[soa.from_idx[e]];
    ws.tk[e] = va[soa.to_idx[e]];
  }
  for (index_t e = 0; e < nl; ++e) {
    const double d = ws.th[e] - ws.tk[e] - soa.phi[e];
    const double cd = std::cos(d);
    const double sd = std::sin(d);
    const double t1 = soa.a_hk_g[e] * cd + soa.a_hk_b[e] * sd;
    const double t2 = soa.a_hk_g[e] * sd - soa.a_hk_b[e] * cd;
    const double t3 = soa.a_hk_g[e] * cd - soa.a_hk_b[e] * sd;
    const double t4 = soa.a_hk_g[e] * sd + soa.a_hk_b[e] * cd;
    const double vh = ws.vh[e];
    const double vk = ws.vk[e];
    const double vhvk = vh * vk;
    ws.ph[e] = vh * vh * soa.a_hh_g[e] - vhvk * t1;
    ws.qh[e] = -vh * vh * soa.a_hh_b[e] - vhvk * t2;
    ws.pk[e] = vk * vk * soa.a_kk_g[e] - vhvk * t3;
    ws.qk[e] = -vk * vk * soa.a_kk_b[e] + vhvk * t4;
  }
}

void reduce_powers(const ElemWorkspace& ws, const BranchSoA& soa, const std::vector<double>& vm,
                   std::vector<double>& p, std::vector<double>& q) {
  const index_t nb = soa.n_b;
  const index_t nl = soa.n_l;
  p.resize(nb);
  q.resize(nb);
  for (index_t i = 0; i < nb; ++i) {
    const double v2 = vm[i] * vm[i];
    p[i] = v2 * soa.shunt_g[i];
    q[i] = -v2 * soa.shunt_b[i];
  }
  for (index_t e = 0; e < nl; ++e) {
    const index_t h = soa.from_idx[e];
    const index_t k = soa.to_idx[e];
    p[h] += ws.ph[e];
    q[h] += ws.qh[e];
    p[k] += ws.pk[e];
    q[k] += ws.qk[e];
  }
}

void eval_jacobian_elements(const BranchSoA& soa, ElemWorkspace& ws, const std::vector<double>& vm,
                            const std::vector<double>& va) {
  const index_t nl = soa.n_l;
  for (index_t e = 0; e < nl; ++e) {
    ws.vh[e] = vm[soa.from_idx[e]];
    ws.vk[e] = vm[soa.to_idx[e]];
    ws.th[e] = va[soa.from_idx[e]];
    ws.tk[e] = va[soa.to_idx[e]];
  }

  double* dph_dth = ws.part(kdPh_dth);
  double* dph_dtk = ws.part(kdPh_dtk);
  double* dpk_dth = ws.part(kdPk_dth);
  double* dpk_dtk = ws.part(kdPk_dtk);
  double* dph_dvh = ws.part(kdPh_dvh);
  double* dph_dvk = ws.part(kdPh_dvk);
  double* dpk_dvh = ws.part(kdPk_dvh);
  double* dpk_dvk = ws.part(kdPk_dvk);
  double* dqh_dth = ws.part(kdQh_dth);
  double* dqh_dtk = ws.part(kdQh_dtk);
  double* dqk_dth = ws.part(kdQk_dth);
  double* dqk_dtk = ws.part(kdQk_dtk);
  double* dqh_dvh = ws.part(kdQh_dvh);
  double* dqh_dvk = ws.part(kdQh_dvk);
  double* dqk_dvh = ws.part(kdQk_dvh);
  double* dqk_dvk = ws.part(kdQk_dvk);

  for (index_t e = 0; e < nl; ++e) {
    const double d = ws.th[e] - ws.tk[e] - soa.phi[e];
    const double cd = std::cos(d);
    const double sd = std::sin(d);
    const double t1 = soa.a_hk_g[e] * cd + soa.a_hk_b[e] * sd;
    const double t2 = soa.a_hk_g[e] * sd - soa.a_hk_b[e] * cd;
    const double t3 = soa.a_hk_g[e] * cd - soa.a_hk_b[e] * sd;
    const double t4 = soa.a_hk_g[e] * sd + soa.a_hk_b[e] * cd;
    const double vh = ws.vh[e];
    const double vk = ws.vk[e];
    const double vhvk = vh * vk;

    dph_dth[e] = vhvk * t2;
    dph_dtk[e] = -vhvk * t2;
    dpk_dth[e] = vhvk * t4;
    dpk_dtk[e] = -vhvk * t4;

    dph_dvh[e] = 2.0 * vh * soa.a_hh_g[e] - vk * t1;
    dph_dvk[e] = -vh * t1;
    dpk_dvh[e] = -vk * t3;
    dpk_dvk[e] = 2.0 * vk * soa.a_kk_g[e] - vh * t3;

    dqh_dth[e] = -vhvk * t1;
    dqh_dtk[e] = vhvk * t1;
    dqk_dth[e] = vhvk * t3;
    dqk_dtk[e] = -vhvk * t3;

    dqh_dvh[e] = -2.0 * vh * soa.a_hh_b[e] - vk * t2;
    dqh_dvk[e] = -vh * t2;
    dqk_dvh[e] = vk * t4;
    dqk_dvk[e] = -2.0 * vk * soa.a_kk_b[e] + vh * t4;
  }

  double* dpsh_dv = ws.part(kdPsh_dv);
  double* dqsh_dv = ws.part(kdQsh_dv);
  const index_t nb = soa.n_b;
  for (index_t i = 0; i < nb; ++i) {
    dpsh_dv[i] = 2.0 * vm[i] * soa.shunt_g[i];
    dqsh_dv[i] = -2.0 * vm[i] * soa.shunt_b[i];
  }
}

namespace {

// Destination coordinate of element e of source array `id` in the 2n x 2n
// Jacobian: rows select P (top) or Q (bottom), columns theta (left) or v
// (right), offset by the terminal bus index.
struct DestMap {
  const IndexedNetwork& net;
  index_t n;

  std::pair<index_t, index_t> operator()(int id, index_t e) const {
    if (id >= kNumBranchPartials) {
      // shunt arrays: dP/dv at (i, n+i), dQ/dv at (n+i, n+i)
      return id == kdPsh_dv ? std::pair{e, static_cast<index_t>(n + e)}
                            : std::pair{static_cast<index_t>(n + e), static_cast<index_t>(n + e)};
    }
    const index_t h = net.from_idx[e];
    const index_t k = net.to_idx[e];
    const bool q_row = id >= kdQh_dth;              // lower half
    const bool v_col = (id & 4) != 0;               // right half
    const int pos = id & 3;                         // which of the four partials
    const index_t row_bus = (pos == 0 || pos == 1) ? h : k;
    const index_t col_bus = (pos == 0 || pos == 2) ? h : k;
    return {row_bus + (q_row ? n : 0), col_bus + (v_col ? n : 0)};
  }
};

}  // namespace

ScatterPlan build_scatter_plan(const IndexedNetwork& net) {
  ScatterPlan plan;
  plan.j_pattern = jacobian_pattern_from_ybus(build_ybus(net));

  const index_t n = net.n_b;
  const DestMap dest{net, n};

  plan.positions.resize(kNumPartialArrays);
  std::vector<char> visited(plan.j_pattern.nzval.size(), 0);

  index_t src = 0;  // flat source index, follows the enumeration order
  for (int id = 0; id < kNumPartialArrays; ++id) {
    const index_t count = id < kNumBranchPartials ? net.n_l : net.n_b;
    auto& pos = plan.positions[id];
    pos.resize(count);
    for (index_t e = 0; e < count; ++e, ++src) {
      const auto [row, col] = dest(id, e);
      const index_t k = plan.j_pattern.find(row, col);
      if (k < 0)
        throw PatternError("scatter plan: destination (" + std::to_string(row) + "," +
                           std::to_string(col) + ") absent from pattern");
      pos[e] = k;
      plan.flat_pos.push_back(k);
      if (!visited[k]) {
        visited[k] = 1;
        plan.copy_src.push_back(src);
        plan.copy_dst.push_back(k);
      } else {
        plan.add_src.push_back(src);
        plan.add_dst.push_back(k);
      }
    }
  }
  for (size_t k = 0; k < visited.size(); ++k) {
    if (!visited[k]) plan.zero_fill.push_back(static_cast<index_t>(k));
  }
  return plan;
}

const CscMatrix<double>& reduce_jacobian_two_step(ScatterPlan& plan, const ElemWorkspace& ws) {
  if (plan.flat_pos.size() != ws.partials.size())
    throw PlanStaleError("two-step reduction: plan/workspace mismatch");

  const double* src = ws.partials.data();
  double* nz = plan.j_pattern.nzval.data();
  const size_t nc = plan.copy_dst.size();
  const size_t na = plan.add_dst.size();
  for (index_t k : plan.zero_fill) nz[k] = 0.0;
  for (size_t i = 0; i < nc; ++i) nz[plan.copy_dst[i]] = src[plan.copy_src[i]];
  for (size_t i = 0; i < na; ++i) nz[plan.add_dst[i]] += src[plan.add_src[i]];
  return plan.j_pattern;
}

const CscMatrix<double>& reduce_jacobian_copy_add(ScatterPlan& plan, const ElemWorkspace& ws) {
  if (plan.flat_pos.size() != ws.partials.size())
    throw PlanStaleError("copy-add reduction: plan/workspace mismatch");

  const double* src = ws.partials.data();
  double* nz = plan.j_pattern.nzval.data();
  std::fill(plan.j_pattern.nzval.begin(), plan.j_pattern.nzval.end(), 0.0);
  const size_t total = plan.flat_pos.size();
  for (size_t i = 0; i < total; ++i) nz[plan.flat_pos[i]] += src[i];
  return plan.j_pattern;
}

CscMatrix<double> reduce_jacobian_new_matrix(const IndexedNetwork& net, const ElemWorkspace& ws) {
  const index_t n = net.n_b;
  TripletList<double> t(2 * n, 2 * n);
  t.reserve(16 * static_cast<size_t>(net.n_l) + 2 * static_cast<size_t>(net.n_b));
  const DestMap dest{net, n};
  for (int id = 0; id < kNumPartialArrays; ++id) {
    const index_t count = id < kNumBranchPartials ? net.n_l : net.n_b;
    const double* src = ws.part(id);
    for (index_t e = 0; e < count; ++e) {
      const auto [row, col] = dest(id, e);
      t.add(row, col, src[e]);
    }
  }
  return csc_from_triplets(t);
}

}  // namespace gridjac
