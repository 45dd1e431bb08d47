#pragma once

#include <vector>

#include "gridjac/common.hpp"
#include "gridjac/netcase.hpp"
#include "gridjac/sparse.hpp"

namespace gridjac {

/// Per-branch constants in structure-of-arrays layout, complex values split
/// into separate real arrays so the evaluation loops stay homogeneous and
/// branch-free. Bus shunts ride along as degenerate one-terminal elements.
struct BranchSoA {
  index_t n_l = 0;
  std::vector<index_t> from_idx, to_idx;
  std::vector<double> a_hh_g, a_hh_b;  // (y_h + y_hk) / m^2
  std::vector<double> a_hk_g, a_hk_b;  // y_hk / m
  std::vector<double> a_kk_g, a_kk_b;  // y_k + y_hk
  std::vector<double> phi;             // rad

  index_t n_b = 0;
  std::vector<double> shunt_g, shunt_b;  // per-bus shunt admittance
};

/// Identifiers for the sixteen branch partial arrays plus the two shunt
/// partial arrays. The enumeration order is also the first-visit order of
/// the scatter plan.
enum PartialId : int {
  kdPh_dth = 0, kdPh_dtk, kdPk_dth, kdPk_dtk,   // dP/dtheta
  kdPh_dvh, kdPh_dvk, kdPk_dvh, kdPk_dvk,       // dP/dv
  kdQh_dth, kdQh_dtk, kdQk_dth, kdQk_dtk,       // dQ/dtheta
  kdQh_dvh, kdQh_dvk, kdQk_dvh, kdQk_dvk,       // dQ/dv
  kNumBranchPartials = 16,
  kdPsh_dv = 16, kdQsh_dv = 17,
  kNumPartialArrays = 18
};

/// Gathered terminal state, evaluated injections, and the partial arrays.
/// The partial arrays live in one contiguous buffer (branch arrays first,
/// then the two per-bus shunt arrays) so reductions can address every source
/// element with a single flat index.
struct ElemWorkspace {
  index_t n_l = 0;
  index_t n_b = 0;
  std::vector<double> vh, vk, th, tk;
  std::vector<double> ph, qh, pk, qk;
  std::vector<double> partials;  // 16*n_l + 2*n_b

  double* part(int id) {
    return partials.data() + (id < kNumBranchPartials
                                  ? static_cast<size_t>(id) * n_l
                                  : 16 * static_cast<size_t>(n_l) +
                                        static_cast<size_t>(id - kNumBranchPartials) * n_b);
  }
  const double* part(int id) const { return const_cast<ElemWorkspace*>(this)->part(id); }
};

BranchSoA build_branch_soa(const IndexedNetwork& net);
ElemWorkspace make_elem_workspace(const IndexedNetwork& net);

/// Gathers terminal voltages/angles and evaluates the four branch power
/// injections. The evaluation loop is homogeneous across branches with no
/// data-dependent control flow.
void eval_powers(const BranchSoA& soa, ElemWorkspace& ws, const std::vector<double>& vm,
                 const std::vector<double>& va);

/// Sums branch injections into per-bus P and Q (plus the shunt terms).
/// Accumulation runs in branch-index order, so results are deterministic.
void reduce_powers(const ElemWorkspace& ws, const BranchSoA& soa, const std::vector<double>& vm,
                   std::vector<double>& p, std::vector<double>& q);

/// Evaluates the sixteen analytic partials of the branch injections plus the
/// two shunt partial arrays. Same loop discipline as eval_powers.
void eval_jacobian_elements(const BranchSoA& soa, ElemWorkspace& ws,
                            const std::vector<double>& vm, const std::vector<double>& va);

/// Precomputed destinations mapping every partial-array element into the
/// frozen Jacobian pattern, split into first-visit copies and subsequent
/// adds. Destinations no source writes to are listed in zero_fill.
/// Structure is immutable after construction; the j_pattern value buffer
/// makes a plan instance single-writer.
struct ScatterPlan {
  CscMatrix<double> j_pattern;
  std::vector<std::vector<index_t>> positions;  // one index array per source array
  std::vector<index_t> flat_pos;                // positions concatenated in source order
  std::vector<index_t> copy_src, copy_dst;      // first writer per destination
  std::vector<index_t> add_src, add_dst;        // everything after the first
  std::vector<index_t> zero_fill;               // destinations with no writer
};

/// Plan over the same pattern the admittance-matrix path uses, so the two
/// methods' Jacobians compare positionally.
ScatterPlan build_scatter_plan(const IndexedNetwork& net);

/// Step 1 copies first-visit sources (and zero-fills writer-less slots),
/// step 2 copy-adds the rest. No allocation.
const CscMatrix<double>& reduce_jacobian_two_step(ScatterPlan& plan, const ElemWorkspace& ws);

/// Baseline: zero-fill then add every source element at its destination.
const CscMatrix<double>& reduce_jacobian_copy_add(ScatterPlan& plan, const ElemWorkspace& ws);

/// Baseline: rebuilds coordinate triplets and a fresh sparse matrix on every
/// call. Only generated entries appear, so the result pattern can be a
/// subset of the plan pattern.
CscMatrix<double> reduce_jacobian_new_matrix(const IndexedNetwork& net, const ElemWorkspace& ws);

}  // namespace gridjac
