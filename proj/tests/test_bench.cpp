#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <charconv>
#include <sstream>

#include "gridjac/bench.hpp"
#include "helpers.hpp"

using namespace gridjac;

namespace {

BenchConfig quick_config(const std::string& name) {
  BenchConfig cfg;
  cfg.case_path = testutil::case_path(name);
  cfg.reps = 5;
  cfg.warmup = 2;
  return cfg;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    size_t start = 0;
    while (true) {
      size_t comma = line.find(',', start);
      fields.push_back(line.substr(start, comma == std::string::npos ? comma : comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace

TEST_CASE("run_bench produces positive step times and passes verification") {
  BenchConfig cfg = quick_config("case14.m");
  cfg.verify = true;
  StepTimings t = run_bench(cfg);

  CHECK(t.case_name == "case14");
  CHECK(t.n_b == 14);
  CHECK(t.n_l == 20);
  for (const auto& v : {t.ybus_phasor, t.ybus_power, t.ybus_jcalc, t.ybus_jred, t.ew_power,
                        t.ew_pred, t.ew_jcalc, t.ew_jred}) {
    REQUIRE(v.has_value());
    CHECK(*v > 0);
  }
}

TEST_CASE("run_bench verifies every variant combination") {
  for (auto storage : {StorageMode::interleaved, StorageMode::separate}) {
    for (auto deriv : {DerivativeVariant::two_pass, DerivativeVariant::matmul}) {
      for (auto assembly : {AssemblyVariant::inplace, AssemblyVariant::concat}) {
        for (auto red : {ReductionVariant::two_step, ReductionVariant::copy_add,
                         ReductionVariant::new_matrix}) {
          BenchConfig cfg = quick_config("case14.m");
          cfg.reps = 1;
          cfg.warmup = 0;
          cfg.verify = true;
          cfg.storage = storage;
          cfg.derivatives = deriv;
          cfg.assembly = assembly;
          cfg.reduction = red;
          CHECK_NOTHROW(run_bench(cfg));
        }
      }
    }
  }
}

TEST_CASE("run_bench replicates the network") {
  BenchConfig cfg = quick_config("case14.m");
  cfg.replicate_k = 5;
  StepTimings t = run_bench(cfg);
  CHECK(t.case_name == "case14x5");
  CHECK(t.n_b == 70);
  CHECK(t.n_l == 100);
}

TEST_CASE("run_bench respects the method filter") {
  BenchConfig cfg = quick_config("case14.m");
  cfg.run_elementwise = false;
  StepTimings t = run_bench(cfg);
  CHECK(t.ybus_phasor.has_value());
  CHECK_FALSE(t.ew_power.has_value());
  CHECK_FALSE(t.ew_jred.has_value());
  CHECK_FALSE(t.ew_power_faster.has_value());
}

TEST_CASE("run_bench with a perturbed state still verifies") {
  BenchConfig cfg = quick_config("case118.m");
  cfg.verify = true;
  cfg.perturb = 0.02;
  CHECK_NOTHROW(run_bench(cfg));
}

TEST_CASE("an injected sign error fails verification") {
  BenchConfig cfg = quick_config("case14.m");
  cfg.verify = true;
  cfg.inject_sign_error = true;
  CHECK_THROWS_AS(run_bench(cfg), VerificationError);
}

TEST_CASE("run_bench propagates case errors") {
  BenchConfig cfg;
  cfg.case_path = testutil::case_path("does_not_exist.m");
  CHECK_THROWS_AS(run_bench(cfg), CaseError);
  cfg.case_path = testutil::case_path("case14.m");
  cfg.reps = 0;
  CHECK_THROWS_AS(run_bench(cfg), std::domain_error);
}

TEST_CASE("csv report has the fixed header and round-trips") {
  BenchConfig cfg = quick_config("case14.m");
  StepTimings t = run_bench(cfg);
  const std::string csv = emit_report({t}, ReportFormat::csv);

  auto rows = parse_csv(csv);
  REQUIRE(rows.size() == 2);  // header + one record
  REQUIRE(rows[0].size() == 11);
  CHECK(rows[0][0] == "case");
  CHECK(rows[0][3] == "ybus_phasor");
  CHECK(rows[0][10] == "ew_jred");

  REQUIRE(rows[1].size() == 11);
  CHECK(rows[1][0] == t.case_name);
  CHECK(rows[1][1] == std::to_string(t.n_b));
  CHECK(rows[1][2] == std::to_string(t.n_l));
  // numeric cells parse back to the original values
  const std::uint64_t expect[8] = {*t.ybus_phasor, *t.ybus_power, *t.ybus_jcalc, *t.ybus_jred,
                                   *t.ew_power,    *t.ew_pred,    *t.ew_jcalc,   *t.ew_jred};
  for (int i = 0; i < 8; ++i) {
    std::uint64_t v = 0;
    const auto& cell = rows[1][3 + i];
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    REQUIRE(ec == std::errc{});
    REQUIRE(ptr == cell.data() + cell.size());
    CHECK(v == expect[i]);
  }
}

TEST_CASE("markdown report renders dashes for a disabled method") {
  BenchConfig cfg = quick_config("case14.m");
  cfg.run_ybus = false;
  StepTimings t = run_bench(cfg);
  const std::string md = emit_report({t}, ReportFormat::markdown);
  CHECK(md.find("| - | - | - | - |") != std::string::npos);
  CHECK(md.find("case14") != std::string::npos);
}

TEST_CASE("time_cost_ratio is exactly one against itself") {
  StepTimings t;
  t.case_name = "ref";
  t.n_b = 100;
  t.ybus_phasor = 1000;
  t.ybus_power = 2000;
  t.ybus_jcalc = 3000;
  t.ybus_jred = 400;
  t.ew_power = 500;
  t.ew_pred = 600;
  t.ew_jcalc = 700;
  t.ew_jred = 800;

  RatioTable table = time_cost_ratio({t}, "ref");
  REQUIRE(table.rows.size() == 1);
  for (const auto& r : table.rows[0].ratio) {
    REQUIRE(r.has_value());
    CHECK(*r == doctest::Approx(1.0));
  }
}

TEST_CASE("time_cost_ratio scales per bus") {
  StepTimings ref;
  ref.case_name = "ref";
  ref.n_b = 100;
  ref.ybus_phasor = 1000;

  StepTimings big;  // 10x buses, 20x time -> per-bus ratio of 2
  big.case_name = "big";
  big.n_b = 1000;
  big.ybus_phasor = 20000;

  RatioTable table = time_cost_ratio({ref, big}, "ref");
  REQUIRE(table.rows.size() == 2);
  REQUIRE(table.rows[1].ratio[0].has_value());
  CHECK(*table.rows[1].ratio[0] == doctest::Approx(2.0));
  CHECK_FALSE(table.rows[1].ratio[1].has_value());  // steps missing from both
}

TEST_CASE("time_cost_ratio requires the reference case") {
  StepTimings t;
  t.case_name = "a";
  t.n_b = 10;
  CHECK_THROWS_AS(time_cost_ratio({t}, "missing"), std::domain_error);
}

TEST_CASE("ratio report emits csv") {
  StepTimings t;
  t.case_name = "ref";
  t.n_b = 10;
  t.ybus_phasor = 100;
  RatioTable table = time_cost_ratio({t}, "ref");
  const std::string csv = emit_ratio_report(table, ReportFormat::csv);
  auto rows = parse_csv(csv);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0][0] == "case");
  CHECK(rows[1][0] == "ref");
  CHECK(rows[1][2] == "1");
}

TEST_CASE("minimum over more reps does not grow (informational)") {
  BenchConfig cfg = quick_config("case118.m");
  cfg.reps = 3;
  StepTimings small = run_bench(cfg);
  cfg.reps = 12;
  StepTimings large = run_bench(cfg);
  // noise can break monotonicity on a busy machine; report, don't fail
  if (*large.ybus_power > *small.ybus_power) {
    MESSAGE("min-of-reps not monotone here: ", *small.ybus_power, " -> ", *large.ybus_power);
  }
}

TEST_CASE("repeated minima are stable (informational)") {
  // the timed kernels allocate nothing after warmup, so run-to-run minima
  // should sit close together on a quiet machine
  BenchConfig cfg = quick_config("case118.m");
  cfg.reps = 30;
  cfg.warmup = 10;
  StepTimings a = run_bench(cfg);
  StepTimings b = run_bench(cfg);
  const double lo = static_cast<double>(std::min(*a.ew_jred, *b.ew_jred));
  const double hi = static_cast<double>(std::max(*a.ew_jred, *b.ew_jred));
  if (hi > 1.2 * lo) {
    MESSAGE("run-to-run minima spread above 20% here: ", lo, " vs ", hi);
  }
}
