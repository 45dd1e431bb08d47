#include <CLI11.hpp>
#include <iostream>
#include <string>
#include <vector>

#include "gridjac/bench.hpp"

namespace {

bool parse_methods(const std::string& list, bool& ybus, bool& elementwise) {
  ybus = false;
  elementwise = false;
  size_t start = 0;
  while (start <= list.size()) {
    size_t comma = list.find(',', start);
    std::string item = list.substr(start, comma == std::string::npos ? comma : comma - start);
    if (item == "ybus")
      ybus = true;
    else if (item == "elementwise")
      elementwise = true;
    else if (!item.empty())
      return false;
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return ybus || elementwise;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Per-step timing of bus power injection and Jacobian kernels"};

  std::vector<std::string> case_paths;
  int replicate = 1, reps = 100, warmup = 10;
  std::string methods = "ybus,elementwise";
  std::string storage = "separate", reduction = "two_step", derivatives = "two_pass",
              assembly = "inplace", out_format = "csv", ratio_ref;
  bool verify = false, inject_sign_error = false;
  double perturb = 0.0;

  app.add_option("--case", case_paths, "MATPOWER case file (repeatable)")->required();
  app.add_option("--replicate", replicate, "Tile the network K times")->check(CLI::PositiveNumber);
  app.add_option("--reps", reps, "Timed repetitions (reported value is the minimum)")
      ->check(CLI::PositiveNumber);
  app.add_option("--warmup", warmup, "Untimed warmup repetitions")->check(CLI::NonNegativeNumber);
  app.add_option("--methods", methods, "Comma list of: ybus, elementwise");
  app.add_option("--storage", storage, "Phasor array layout")
      ->check(CLI::IsMember({"interleaved", "separate"}));
  app.add_option("--reduction", reduction, "Element-wise Jacobian reduction variant")
      ->check(CLI::IsMember({"two_step", "copy_add", "new_matrix"}));
  app.add_option("--derivatives", derivatives, "Admittance-path derivative variant")
      ->check(CLI::IsMember({"two_pass", "matmul"}));
  app.add_option("--assembly", assembly, "Admittance-path assembly variant")
      ->check(CLI::IsMember({"inplace", "concat"}));
  app.add_option("--out", out_format, "Report format")->check(CLI::IsMember({"csv", "md"}));
  app.add_flag("--verify", verify, "Check cross-method equivalence before timing");
  app.add_option("--perturb", perturb, "Deterministic random state perturbation amplitude");
  app.add_option("--ratio-ref", ratio_ref, "Also emit per-bus time ratios against this case");
  app.add_flag("--inject-sign-error", inject_sign_error)->group("");  // test hook, hidden

  CLI11_PARSE(app, argc, argv);

  gridjac::BenchConfig cfg;
  if (!parse_methods(methods, cfg.run_ybus, cfg.run_elementwise)) {
    std::cerr << "error: --methods expects a comma list of 'ybus' and 'elementwise'\n";
    return 1;
  }
  cfg.replicate_k = replicate;
  cfg.reps = reps;
  cfg.warmup = warmup;
  cfg.storage = storage == "separate" ? gridjac::StorageMode::separate
                                      : gridjac::StorageMode::interleaved;
  cfg.reduction = reduction == "two_step"   ? gridjac::ReductionVariant::two_step
                  : reduction == "copy_add" ? gridjac::ReductionVariant::copy_add
                                            : gridjac::ReductionVariant::new_matrix;
  cfg.derivatives = derivatives == "two_pass" ? gridjac::DerivativeVariant::two_pass
                                              : gridjac::DerivativeVariant::matmul;
  cfg.assembly = assembly == "inplace" ? gridjac::AssemblyVariant::inplace
                                       : gridjac::AssemblyVariant::concat;
  cfg.verify = verify;
  cfg.perturb = perturb;
  cfg.inject_sign_error = inject_sign_error;

  const auto format =
      out_format == "md" ? gridjac::ReportFormat::markdown : gridjac::ReportFormat::csv;

  std::vector<gridjac::StepTimings> results;
  try {
    for (const auto& path : case_paths) {
      cfg.case_path = path;
      results.push_back(gridjac::run_bench(cfg));
    }

    std::cout << gridjac::emit_report(results, format);
    if (!ratio_ref.empty())
      std::cout << '\n' << gridjac::emit_ratio_report(gridjac::time_cost_ratio(results, ratio_ref),
                                                      format);
  } catch (const gridjac::VerificationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  if (format == gridjac::ReportFormat::csv) {
    for (const auto& t : results) {
      if (t.ew_power_faster)
        std::cerr << "note: element-wise power total faster than admittance power step on "
                  << t.case_name << ": " << (*t.ew_power_faster ? "yes" : "no") << '\n';
    }
    std::cerr << "note: times are ns minima over " << reps << " reps after " << warmup
              << " warmup runs; separate storage folds the conversion copy into the phasor step\n";
  }
  std::cerr << "note: hardware counter collection is out of scope; run under an external "
               "profiler (e.g. perf stat) for cache and branch statistics\n";
  return 0;
}
