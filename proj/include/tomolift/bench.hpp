#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "tomolift/config.hpp"

namespace tomolift {

/// Aggregate over the trials of one (sweep point, method) pair.
struct AggregateRow {
  SweepVariable variable = SweepVariable::None;
  double value = 0.0;
  Method method = Method::Fixed;
  double mean_mse = 0.0;
  double stderr_mse = 0.0;
  int trials = 0;    // successful trials the means are taken over
  int failures = 0;  // trials that threw; excluded from the means
  double mean_iterations = 0.0;
  double mean_frobenius_squared = 0.0;
  bool single_trial = false;  // stderr is 0 by convention
  std::vector<double> mse_values;  // per successful trial, in trial order
};

/// Seed of sweep point `point`; trials then index SeedStream::trial.
std::uint64_t point_seed(std::uint64_t base_seed, std::size_t point);

/// Number of worker threads from TOMOLIFT_JOBS, else the hardware count.
int default_jobs();

/// Runs every (point, method, trial) of the sweep on up to `jobs` threads.
/// Rows come back ordered by point then by the order of sweep.methods. The
/// result does not depend on `jobs`.
std::vector<AggregateRow> run_sweep(const ExperimentConfig& config, int jobs = 1);

/// "sweep_variable,sweep_value,method,mean_mse,stderr_mse,trials,mean_iterations"
void write_aggregate_csv(std::ostream& os, const std::vector<AggregateRow>& rows);

/// Static SVG of mean MSE per method against the sweep value. The y axis is
/// logarithmic; the x axis is logarithmic for N sweeps.
void write_sweep_svg(std::ostream& os, const std::vector<AggregateRow>& rows);

struct OutputOptions {
  bool plot = false;
  std::string stem = "sweep";
};

/// Writes <stem>.csv (and <stem>.svg when requested) into `dir`. Returns the
/// paths written.
std::vector<std::filesystem::path> emit_outputs(const std::vector<AggregateRow>& rows,
                                                const std::filesystem::path& dir, const OutputOptions& options = {});

}  // namespace tomolift
