// tomolift: run, sweep and compare adaptive tomography experiments.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "tomolift/bench.hpp"
#include "tomolift/config.hpp"
#include "tomolift/estimator.hpp"
#include "tomolift/pipeline.hpp"

namespace fs = std::filesystem;
using namespace tomolift;

namespace {

constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

struct Options {
  std::string config;
  std::string out = ".";
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  int jobs = 0;
  bool plot = false;
  bool oracle = false;
  bool eq10_alt = false;
  bool dump_counts = false;
  bool dump_selection = false;
  bool verbose = false;
};

ExperimentConfig load(const Options& o) {
  auto cfg = parse_config(o.config);
  if (o.seed) cfg.plan.seed = *o.seed;
  if (o.trials) cfg.sweep.trials = *o.trials;
  if (o.oracle) cfg.plan.oracle = true;
  if (o.eq10_alt) cfg.plan.eq10_alt = true;
  if (o.verbose) cfg.plan.solver.record_trace = true;
  validate_sweep(cfg.plan, cfg.sweep);
  return cfg;
}

void print_rows(const std::vector<AggregateRow>& rows) {
  int failures = 0;
  for (const auto& r : rows) {
    std::printf("%-4s %-10.6g %-10s mean_mse=%.6e stderr=%.3e trials=%d iterations=%.1f%s\n",
                sweep_variable_name(r.variable).c_str(), r.value, method_name(r.method).c_str(), r.mean_mse,
                r.stderr_mse, r.trials, r.mean_iterations, r.single_trial ? " (single trial)" : "");
    failures += r.failures;
  }
  if (failures > 0) std::fprintf(stderr, "warning: %d trial(s) failed and were excluded from the means\n", failures);
}

int cmd_run(const Options& o) {
  const auto cfg = load(o);
  const auto truth = cfg.plan.state.build(cfg.plan.qubit_count());
  const auto result = run_plan(cfg.plan, truth, 0);
  const fs::path dir(o.out);
  write_run_directory(dir, cfg.plan, truth, result);

  if (o.dump_counts) {
    std::ofstream out(dir / "counts.csv");
    write_counts_csv_header(out);
    for (const auto& r : result.rounds) write_counts_csv(out, result.trial, r.round, r.counts);
  }
  if (o.dump_selection) {
    for (const auto& s : result.selections) {
      for (const auto& r : result.rounds) {
        if (r.round != s.round) continue;
        std::ofstream out(dir / ("selection_round" + std::to_string(s.round) + ".csv"));
        write_selection_csv(out, s.masses, s.weights, r.allocation);
      }
    }
  }
  if (o.verbose) {
    for (const auto& st : result.stages) {
      std::ofstream out(dir / ("diagnostics_" + st.name + ".csv"));
      write_diagnostics_csv(out, st.diagnostics);
    }
  }
  for (const auto& st : result.stages) {
    std::printf("%-7s mse=%.6e frobenius^2=%.6e iterations=%d%s\n", st.name.c_str(), st.mse, st.frobenius_squared,
                st.diagnostics.iterations, st.diagnostics.converged ? "" : " (not converged)");
  }
  std::printf("copies consumed: %lld of %lld\n", result.copies_consumed, cfg.plan.total_copies);
  return 0;
}

int cmd_sweep(const Options& o, bool compare) {
  auto cfg = load(o);
  if (compare) {
    cfg.sweep.variable = SweepVariable::None;
    cfg.sweep.values.clear();
    cfg.sweep.methods = {Method::Fixed, Method::TwoStep, Method::ThreeStep};
    validate_sweep(cfg.plan, cfg.sweep);
  }
  const auto rows = run_sweep(cfg, o.jobs);
  print_rows(rows);
  const auto files = emit_outputs(rows, o.out, OutputOptions{o.plot, compare ? "compare" : "sweep"});
  for (const auto& f : files) std::printf("wrote %s\n", f.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive quantum state tomography simulator"};
  app.require_subcommand(1);
  Options o;
  o.jobs = default_jobs();

  auto common = [&o](CLI::App* sub) {
    sub->add_option("--config", o.config, "experiment config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--seed", o.seed, "override the base seed");
    sub->add_flag("--oracle", o.oracle, "use exact Born probabilities instead of sampling");
    sub->add_flag("--eq10-alt", o.eq10_alt, "three-step: combine round-2 data and skip round 3");
  };
  auto* run = app.add_subcommand("run", "run one trial of the configured plan");
  common(run);
  run->add_flag("--dump-counts", o.dump_counts, "write counts.csv");
  run->add_flag("--dump-selection", o.dump_selection, "write per-round selection CSVs");
  run->add_flag("--verbose", o.verbose, "write solver diagnostics CSVs");

  auto batch = [&o, &common](CLI::App* sub) {
    common(sub);
    sub->add_option("--trials", o.trials, "override sweep.trials")->check(CLI::PositiveNumber);
    sub->add_option("--jobs", o.jobs, "worker threads (default TOMOLIFT_JOBS or core count)")
        ->check(CLI::PositiveNumber);
    sub->add_flag("--plot", o.plot, "also write an SVG plot");
  };
  auto* sweep = app.add_subcommand("sweep", "run the configured sweep");
  batch(sweep);
  auto* compare = app.add_subcommand("compare", "fixed vs two_step vs three_step on the configured plan");
  batch(compare);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (run->parsed()) return cmd_run(o);
    return cmd_sweep(o, compare->parsed());
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const PlanError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kRuntimeError;
  }
}
