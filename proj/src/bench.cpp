#include "gridjac/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

namespace gridjac {

namespace {

using bench_clock = std::chrono::steady_clock;

std::string case_name_from_path(const std::string& path, int k) {
  std::string name = std::filesystem::path(path).stem().string();
  if (k > 1) name += "x" + std::to_string(k);
  return name;
}

// Deterministic state perturbation. Raw mt19937 draws are mapped by hand;
// the standard distribution classes are not bit-portable across libraries.
void perturb_state(std::vector<double>& vm, std::vector<double>& va, double eps) {
  std::mt19937 rng(42);
  auto uniform = [&rng]() { return static_cast<double>(rng()) * (2.0 / 4294967296.0) - 1.0; };
  for (auto& v : va) v += eps * uniform();
  for (auto& v : vm) v += eps * uniform();
}

template <typename F>
std::uint64_t time_once(F&& f) {
  const auto t0 = bench_clock::now();
  f();
  const auto t1 = bench_clock::now();
  const auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count();
  return ns > 0 ? static_cast<std::uint64_t>(ns) : 1u;  // clamp at clock resolution
}

void min_into(std::optional<std::uint64_t>& slot, std::uint64_t sample) {
  if (!slot || sample < *slot) slot = sample;
}

// Max nzval difference between a matrix and a structural subset of it.
double max_subset_diff(const CscMatrix<double>& full, const CscMatrix<double>& subset) {
  double worst = 0.0;
  for (index_t c = 0; c < subset.n_cols; ++c) {
    index_t kf = full.col_start[c];
    for (index_t ks = subset.col_start[c]; ks < subset.col_start[c + 1]; ++ks) {
      while (kf < full.col_start[c + 1] && full.row_idx[kf] < subset.row_idx[ks]) ++kf;
      if (kf >= full.col_start[c + 1] || full.row_idx[kf] != subset.row_idx[ks])
        throw PatternError("verification: entry outside the shared pattern");
      worst = std::max(worst, std::abs(full.nzval[kf] - subset.nzval[ks]));
    }
  }
  return worst;
}

}  // namespace

StepTimings run_bench(const BenchConfig& cfg) {
  if (cfg.reps < 1) throw std::domain_error("bench: reps must be >= 1");
  if (cfg.warmup < 0) throw std::domain_error("bench: warmup must be >= 0");
  if (cfg.replicate_k < 1) throw std::domain_error("bench: replicate_k must be >= 1");

  IndexedNetwork net = index_network(parse_matpower_file(cfg.case_path));
  if (cfg.replicate_k > 1) net = replicate_case(net, cfg.replicate_k);

  std::vector<double> vm = net.vm0;
  std::vector<double> va = net.va0;
  if (cfg.perturb != 0.0) perturb_state(vm, va, cfg.perturb);

  // One-time setup stays off the timed path: matrices, plans, and
  // workspaces are sized here so the per-step kernels allocate nothing.
  YbusModel model = make_ybus_model(net, cfg.storage);
  model.vm = vm;
  model.va = va;
  update_phasors(model);
  JacobianPlanYbus yplan = build_jacobian_plan(model.ybus);
  BranchSoA soa = build_branch_soa(net);
  ElemWorkspace ws = make_elem_workspace(net);
  ScatterPlan splan = build_scatter_plan(net);
  std::vector<double> p(net.n_b), q(net.n_b);
  CscMatrix<double> concat_result;
  CscMatrix<double> newmat_result;

  auto yb_phasor = [&] { update_phasors(model); };
  auto yb_power = [&] { power_injection_ybus(model); };
  auto yb_jcalc = [&] {
    if (cfg.derivatives == DerivativeVariant::two_pass) {
      derivatives_two_pass(model, yplan);
    } else {
      auto [dt, dv] = derivatives_matmul(model);
      yplan.ds_dtheta = std::move(dt);
      yplan.ds_dvm = std::move(dv);
    }
  };
  auto yb_jred = [&] {
    if (cfg.assembly == AssemblyVariant::inplace) {
      assemble_jacobian_inplace(yplan);
    } else {
      concat_result = assemble_jacobian_concat(yplan.ds_dtheta, yplan.ds_dvm);
    }
  };
  auto ybus_jacobian = [&]() -> const CscMatrix<double>& {
    return cfg.assembly == AssemblyVariant::inplace ? yplan.j_pattern : concat_result;
  };

  auto ew_power = [&] { eval_powers(soa, ws, vm, va); };
  auto ew_pred = [&] { reduce_powers(ws, soa, vm, p, q); };
  auto ew_jcalc = [&] { eval_jacobian_elements(soa, ws, vm, va); };
  auto ew_jred = [&] {
    switch (cfg.reduction) {
      case ReductionVariant::two_step: reduce_jacobian_two_step(splan, ws); break;
      case ReductionVariant::copy_add: reduce_jacobian_copy_add(splan, ws); break;
      case ReductionVariant::new_matrix: newmat_result = reduce_jacobian_new_matrix(net, ws); break;
    }
  };

  if (cfg.verify) {
    // runs once, untimed, before any timing is reported
    yb_phasor();
    const std::vector<cplx> s_ybus = power_injection_ybus(model);
    ew_power();
    ew_pred();
    double s_max = 0.0;
    for (index_t i = 0; i < net.n_b; ++i)
      s_max = std::max(s_max, std::abs(s_ybus[i] - cplx{p[i], q[i]}));

    yb_jcalc();
    yb_jred();
    ew_jcalc();
    if (cfg.inject_sign_error) {
      double* arr = ws.part(kdPh_dth);
      for (index_t e = 0; e < ws.n_l; ++e) arr[e] = -arr[e];
    }
    ew_jred();

    double j_max = 0.0;
    if (cfg.reduction == ReductionVariant::new_matrix) {
      j_max = max_subset_diff(ybus_jacobian(), newmat_result);
    } else {
      const auto& jy = ybus_jacobian().nzval;
      const auto& je = splan.j_pattern.nzval;
      for (size_t k = 0; k < jy.size(); ++k) j_max = std::max(j_max, std::abs(jy[k] - je[k]));
    }

    constexpr double tol = 1e-9;
    if (s_max > tol || j_max > tol) {
      std::ostringstream msg;
      msg << "cross-method verification failed: max |dS| = " << s_max << " pu, max |dJ| = "
          << j_max << " (tolerance " << tol << ")";
      throw VerificationError(msg.str());
    }
  }

  StepTimings out;
  out.case_name = case_name_from_path(cfg.case_path, cfg.replicate_k);
  out.n_b = net.n_b;
  out.n_l = net.n_l;
  out.reps = cfg.reps;
  out.warmup = cfg.warmup;

  for (int w = 0; w < cfg.warmup; ++w) {
    if (cfg.run_ybus) {
      yb_phasor();
      yb_power();
      yb_jcalc();
      yb_jred();
    }
    if (cfg.run_elementwise) {
      ew_power();
      ew_pred();
      ew_jcalc();
      ew_jred();
    }
  }

  for (int rep = 0; rep < cfg.reps; ++rep) {
    if (cfg.run_ybus) {
      min_into(out.ybus_phasor, time_once(yb_phasor));
      min_into(out.ybus_power, time_once(yb_power));
      min_into(out.ybus_jcalc, time_once(yb_jcalc));
      min_into(out.ybus_jred, time_once(yb_jred));
    }
    if (cfg.run_elementwise) {
      min_into(out.ew_power, time_once(ew_power));
      min_into(out.ew_pred, time_once(ew_pred));
      min_into(out.ew_jcalc, time_once(ew_jcalc));
      min_into(out.ew_jred, time_once(ew_jred));
    }
  }

  if (cfg.run_ybus && cfg.run_elementwise)
    out.ew_power_faster = (*out.ew_power + *out.ew_pred) < *out.ybus_power;
  return out;
}

RatioTable time_cost_ratio(const std::vector<StepTimings>& timings,
                           const std::string& reference_case) {
  const StepTimings* ref = nullptr;
  for (const auto& t : timings) {
    if (t.case_name == reference_case) {
      ref = &t;
      break;
    }
  }
  if (!ref) throw std::domain_error("time_cost_ratio: reference case '" + reference_case +
                                    "' not in the timing list");

  auto steps = [](const StepTimings& t) {
    return std::array<std::optional<std::uint64_t>, 8>{t.ybus_phasor, t.ybus_power, t.ybus_jcalc,
                                                       t.ybus_jred,   t.ew_power,   t.ew_pred,
                                                       t.ew_jcalc,    t.ew_jred};
  };
  const auto ref_steps = steps(*ref);

  RatioTable table;
  table.reference_case = reference_case;
  for (const auto& t : timings) {
    RatioRow row;
    row.case_name = t.case_name;
    row.n_b = t.n_b;
    const auto s = steps(t);
    for (size_t i = 0; i < s.size(); ++i) {
      if (s[i] && ref_steps[i]) {
        const double per_bus = static_cast<double>(*s[i]) / t.n_b;
        const double ref_per_bus = static_cast<double>(*ref_steps[i]) / ref->n_b;
        row.ratio[i] = per_bus / ref_per_bus;
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string emit_report(const std::vector<StepTimings>& timings, ReportFormat format) {
  if (timings.empty()) throw std::domain_error("emit_report: no timing records");
  std::ostringstream out;

  if (format == ReportFormat::csv) {
    out << "case,n_b,n_l,ybus_phasor,ybus_power,ybus_jcalc,ybus_jred,"
           "ew_power,ew_pred,ew_jcalc,ew_jred\n";
    auto cell = [&](const std::optional<std::uint64_t>& v) {
      out << ',';
      if (v) out << *v;
    };
    for (const auto& t : timings) {
      out << t.case_name << ',' << t.n_b << ',' << t.n_l;
      cell(t.ybus_phasor);
      cell(t.ybus_power);
      cell(t.ybus_jcalc);
      cell(t.ybus_jred);
      cell(t.ew_power);
      cell(t.ew_pred);
      cell(t.ew_jcalc);
      cell(t.ew_jred);
      out << '\n';
    }
    return out.str();
  }

  out << "Step times in nanoseconds, minimum over " << timings.front().reps << " reps after "
      << timings.front().warmup << " warmup runs.\n";
  out << "Columns 4-7: admittance-matrix method; columns 8-11: element-wise method.\n";
  out << "Separate phasor storage folds the interleave conversion copy into Phasor Calc.\n\n";
  out << "| Case | n_b | n_l | Phasor Calc. | Power Calc. | J Calc. | J Red. "
         "| Power Calc. | Power Red. | J Calc. | J Red. |\n";
  out << "|---|---|---|---|---|---|---|---|---|---|---|\n";
  auto cell = [&](const std::optional<std::uint64_t>& v) {
    out << ' ';
    if (v)
      out << *v;
    else
      out << '-';
    out << " |";
  };
  for (const auto& t : timings) {
    out << "| " << t.case_name << " | " << t.n_b << " | " << t.n_l << " |";
    cell(t.ybus_phasor);
    cell(t.ybus_power);
    cell(t.ybus_jcalc);
    cell(t.ybus_jred);
    cell(t.ew_power);
    cell(t.ew_pred);
    cell(t.ew_jcalc);
    cell(t.ew_jred);
    out << '\n';
  }
  for (const auto& t : timings) {
    if (t.ew_power_faster)
      out << "\nElement-wise power total (calc + reduction) faster than admittance power step on "
          << t.case_name << ": " << (*t.ew_power_faster ? "yes" : "no");
  }
  if (!timings.empty()) out << '\n';
  return out.str();
}

std::string emit_ratio_report(const RatioTable& table, ReportFormat format) {
  std::ostringstream out;
  const char* names[8] = {"ybus_phasor", "ybus_power", "ybus_jcalc", "ybus_jred",
                          "ew_power",    "ew_pred",    "ew_jcalc",   "ew_jred"};
  if (format == ReportFormat::csv) {
    out << "case,n_b";
    for (const char* n : names) out << ',' << n;
    out << '\n';
    for (const auto& row : table.rows) {
      out << row.case_name << ',' << row.n_b;
      for (const auto& r : row.ratio) {
        out << ',';
        if (r) out << *r;
      }
      out << '\n';
    }
    return out.str();
  }

  out << "Per-bus step time relative to " << table.reference_case << " (ratio > 1 scales worse).\n\n";
  out << "| Case | n_b |";
  for (const char* n : names) out << ' ' << n << " |";
  out << "\n|---|---|";
  for (int i = 0; i < 8; ++i) out << "---|";
  out << '\n';
  out.setf(std::ios::fixed);
  out.precision(3);
  for (const auto& row : table.rows) {
    out << "| " << row.case_name << " | " << row.n_b << " |";
    for (const auto& r : row.ratio) {
      out << ' ';
      if (r)
        out << *r;
      else
        out << '-';
      out << " |";
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace gridjac
