#include "tomolift/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "tomolift/measurement.hpp"

namespace tomolift {

namespace {

// Neumaier summation, fed in trial order.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    comp_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct TrialOutcome {
  bool ok = false;
  double mse = 0.0;
  double frobenius_squared = 0.0;
  int iterations = 0;
};

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::uint64_t point_seed(std::uint64_t base_seed, std::size_t point) { return derive_seed(base_seed, point); }

int default_jobs() {
  if (const char* env = std::getenv("TOMOLIFT_JOBS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<int>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::vector<AggregateRow> run_sweep(const ExperimentConfig& config, int jobs) {
  const SweepSpec& sweep = config.sweep;
  validate_sweep(config.plan, sweep);
  if (jobs < 1) throw std::invalid_argument("jobs must be at least 1");

  const DensityMatrix truth = config.plan.state.build(config.plan.qubit_count());
  const std::size_t points = sweep.points();
  const std::size_t methods = sweep.methods.size();
  const auto trials = static_cast<std::size_t>(sweep.trials);

  std::vector<ExperimentPlan> plans;
  for (std::size_t p = 0; p < points; ++p) {
    for (Method m : sweep.methods) {
      auto plan = apply_sweep_point(config.plan, sweep.variable, sweep.value(p), m);
      plan.seed = point_seed(config.plan.seed, p);
      plans.push_back(std::move(plan));
    }
  }

  // Each task writes only its own slot; aggregation reads them in order.
  std::vector<TrialOutcome> slots(plans.size() * trials);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t task = next++; task < slots.size(); task = next++) {
      const auto& plan = plans[task / trials];
      TrialOutcome& out = slots[task];
      try {
        const auto result = run_plan(plan, truth, task % trials);
        out.mse = result.final_stage().mse;
        out.frobenius_squared = result.final_stage().frobenius_squared;
        out.iterations = result.total_iterations();
        out.ok = true;
      } catch (const std::exception&) {
        out.ok = false;
      }
    }
  };
  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(jobs), slots.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  std::vector<AggregateRow> rows;
  for (std::size_t k = 0; k < plans.size(); ++k) {
    AggregateRow row;
    row.variable = sweep.variable;
    row.value = sweep.value(k / methods);
    row.method = sweep.methods[k % methods];
    CompensatedSum mse, fro, iters;
    for (std::size_t t = 0; t < trials; ++t) {
      const auto& s = slots[k * trials + t];
      if (!s.ok) {
        ++row.failures;
        continue;
      }
      ++row.trials;
      row.mse_values.push_back(s.mse);
      mse.add(s.mse);
      fro.add(s.frobenius_squared);
      iters.add(s.iterations);
    }
    if (row.trials > 0) {
      const double count = row.trials;
      row.mean_mse = mse.value() / count;
      row.mean_frobenius_squared = fro.value() / count;
      row.mean_iterations = iters.value() / count;
    } else {
      row.mean_mse = row.mean_frobenius_squared = row.mean_iterations = std::nan("");
    }
    row.single_trial = row.trials <= 1;
    if (!row.single_trial) {
      CompensatedSum dev;
      for (double x : row.mse_values) dev.add((x - row.mean_mse) * (x - row.mean_mse));
      row.stderr_mse = std::sqrt(dev.value() / (row.trials - 1)) / std::sqrt(static_cast<double>(row.trials));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_aggregate_csv(std::ostream& os, const std::vector<AggregateRow>& rows) {
  os << "sweep_variable,sweep_value,method,mean_mse,stderr_mse,trials,mean_iterations\n";
  for (const auto& r : rows) {
    os << sweep_variable_name(r.variable) << ',' << format_double(r.value) << ',' << method_name(r.method) << ','
       << format_double(r.mean_mse) << ',' << format_double(r.stderr_mse) << ',' << r.trials << ','
       << format_double(r.mean_iterations) << '\n';
  }
}

std::vector<std::filesystem::path> emit_outputs(const std::vector<AggregateRow>& rows,
                                                const std::filesystem::path& dir, const OutputOptions& options) {
  if (rows.empty()) throw std::invalid_argument("no rows to write");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());

  std::vector<std::filesystem::path> written;
  const auto csv = dir / (options.stem + ".csv");
  {
    std::ofstream out(csv, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + csv.string());
    write_aggregate_csv(out, rows);
    if (!out) throw std::runtime_error("write failed for " + csv.string());
  }
  written.push_back(csv);
  if (options.plot) {
    const auto svg = dir / (options.stem + ".svg");
    std::ofstream out(svg, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + svg.string());
    write_sweep_svg(out, rows);
    written.push_back(svg);
  }
  return written;
}

}  // namespace tomolift
