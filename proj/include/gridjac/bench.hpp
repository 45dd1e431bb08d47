#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gridjac/common.hpp"
#include "gridjac/elementwise.hpp"
#include "gridjac/ybus.hpp"

namespace gridjac {

enum class DerivativeVariant { two_pass, matmul };
enum class AssemblyVariant { inplace, concat };
enum class ReductionVariant { two_step, copy_add, new_matrix };
enum class ReportFormat { csv, markdown };

struct BenchConfig {
  std::string case_path;
  int replicate_k = 1;
  int reps = 100;    // timed repetitions, aggregated by minimum
  int warmup = 10;   // untimed repetitions
  bool run_ybus = true;
  bool run_elementwise = true;
  StorageMode storage = StorageMode::separate;
  DerivativeVariant derivatives = DerivativeVariant::two_pass;
  AssemblyVariant assembly = AssemblyVariant::inplace;
  ReductionVariant reduction = ReductionVariant::two_step;
  bool verify = false;
  double perturb = 0.0;  // deterministic state perturbation amplitude
  // Test hook: flips the sign of one Jacobian partial array during
  // verification so the failure path can be exercised end to end.
  bool inject_sign_error = false;
};

/// Minimum-of-reps wall-clock time for each step, in nanoseconds. Steps of a
/// method that was not run are absent.
struct StepTimings {
  std::string case_name;
  index_t n_b = 0;
  index_t n_l = 0;
  std::optional<std::uint64_t> ybus_phasor, ybus_power, ybus_jcalc, ybus_jred;
  std::optional<std::uint64_t> ew_power, ew_pred, ew_jcalc, ew_jred;
  int reps = 0;
  int warmup = 0;
  /// Informational: element-wise power_calc+power_red beat ybus power_calc.
  std::optional<bool> ew_power_faster;
};

/// Parses, indexes, optionally replicates and perturbs, builds all plans and
/// workspaces (untimed), optionally verifies cross-method equivalence
/// (untimed; VerificationError on mismatch), then times the per-step kernels.
StepTimings run_bench(const BenchConfig& cfg);

struct RatioRow {
  std::string case_name;
  index_t n_b = 0;
  // per-step (time/n_b) divided by the reference case's (time/n_b),
  // in the report column order
  std::array<std::optional<double>, 8> ratio;
};

struct RatioTable {
  std::string reference_case;
  std::vector<RatioRow> rows;
};

/// Per-bus step time of each case relative to the reference case; the
/// reference row is 1.0 in every step. Missing reference throws
/// std::domain_error.
RatioTable time_cost_ratio(const std::vector<StepTimings>& timings,
                           const std::string& reference_case);

/// CSV (fixed 11-column header, nanosecond integers) or a markdown table
/// with one column block per method. Cells of a disabled method render as
/// empty (csv) or "-" (markdown).
std::string emit_report(const std::vector<StepTimings>& timings, ReportFormat format);

std::string emit_ratio_report(const RatioTable& table, ReportFormat format);

}  // namespace gridjac
