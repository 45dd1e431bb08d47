#pragma once

#include <utility>
#include <vector>

#include "gridjac/common.hpp"
#include "gridjac/netcase.hpp"
#include "gridjac/sparse.hpp"

namespace gridjac {

/// Layout of the complex voltage arrays during the phasor update.
/// `interleaved` computes u and v directly as complex pairs; `separate`
/// updates four contiguous real arrays and then copies into the interleaved
/// buffers the sparse product consumes (the copy is part of the phasor step).
enum class StorageMode { interleaved, separate };

/// Mutable evaluation state for the admittance-matrix method. Single-writer;
/// distinct instances may be used concurrently.
struct YbusModel {
  CscMatrix<cplx> ybus;
  StorageMode storage_mode = StorageMode::interleaved;

  std::vector<double> vm;  // voltage magnitudes, pu
  std::vector<double> va;  // voltage angles, rad
  std::vector<cplx> u;     // e^{j*va}
  std::vector<cplx> v;     // vm * u
  std::vector<cplx> i_bus; // bus current injections, kept for Jacobian reuse
  std::vector<cplx> s;     // bus power injections

  // separate-mode staging arrays
  std::vector<double> u_re, u_im, v_re, v_im;
};

CscMatrix<cplx> build_ybus(const IndexedNetwork& net);

/// Model preloaded with the case state; all buffers sized so the per-step
/// operations allocate nothing.
YbusModel make_ybus_model(const IndexedNetwork& net,
                          StorageMode mode = StorageMode::interleaved);

void update_phasors(YbusModel& m);

/// S = V .* conj(Ybus V). Fills m.i_bus and m.s, returns m.s.
const std::vector<cplx>& power_injection_ybus(YbusModel& m);

/// Frozen 2n x 2n Jacobian pattern plus the index arrays that map every
/// admittance-matrix nonzero into it, and pattern-sharing derivative
/// matrices. The structure is immutable after construction; the value
/// buffers make a plan instance single-writer.
struct JacobianPlanYbus {
  CscMatrix<double> j_pattern;
  std::vector<index_t> p11, p12, p21, p22;
  CscMatrix<cplx> ds_dtheta;  // same pattern as ybus
  CscMatrix<cplx> ds_dvm;
};

/// Four-block union of the admittance pattern: each block of the 2n x 2n
/// Jacobian reuses the Ybus sparsity (values zeroed).
CscMatrix<double> jacobian_pattern_from_ybus(const CscMatrix<cplx>& ybus);

/// Builds the pattern and the four write-index arrays by scanning each
/// column segment for the matching row. Ybus must carry a structurally
/// complete diagonal. One-time setup, off the timed path.
JacobianPlanYbus build_jacobian_plan(const CscMatrix<cplx>& ybus);

/// Two-pass computation of dS/dtheta and dS/dVm on the Ybus pattern.
/// Writes into plan.ds_dtheta / plan.ds_dvm and refreshes m.i_bus; no
/// allocation. Throws PlanStaleError if the plan does not match m.ybus.
void derivatives_two_pass(YbusModel& m, JacobianPlanYbus& plan);

/// Literal evaluation of the derivative matrices through diagonal-matrix
/// products and sparse-sparse multiplication. Allocates intermediates on
/// every call; kept as the slow baseline for benchmarking.
std::pair<CscMatrix<cplx>, CscMatrix<cplx>> derivatives_matmul(const YbusModel& m);

/// Scatters Re/Im of the derivative nonzeros through the precomputed index
/// arrays. Returns plan.j_pattern; no other nzval entries are touched.
const CscMatrix<double>& assemble_jacobian_inplace(JacobianPlanYbus& plan);

/// Concatenation baseline: splits the derivative matrices into real and
/// imaginary blocks and builds a fresh 2n x 2n matrix. Allocates every call.
CscMatrix<double> assemble_jacobian_concat(const CscMatrix<cplx>& ds_dtheta,
                                           const CscMatrix<cplx>& ds_dvm);

}  // namespace gridjac
