#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tomolift/estimator.hpp"
#include "tomolift/measurement.hpp"
#include "tomolift/quantum_core.hpp"
#include "tomolift/selection.hpp"

namespace tomolift {

enum class Method { Fixed, TwoStep, ThreeStep };

std::string method_name(Method m);
Method parse_method(std::string_view name);

/// Invalid experiment description; the message names the offending field.
class PlanError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Which true state to simulate. `kind` is one of cat, noon, w, random,
/// mixed (maximally mixed) or file.
struct StateSpec {
  std::string kind = "cat";
  int rank = 1;
  std::uint64_t seed = 1;
  std::filesystem::path file;

  DensityMatrix build(QubitCount n) const;
  std::string describe() const;
};

struct ExperimentPlan {
  int qubits = 2;
  StateSpec state;
  long long total_copies = 90000;  // N
  double first_ratio = 0.5;        // R
  double third_ratio = 0.0;        // R2, three-step only
  std::uint64_t seed = 1;
  Method method = Method::TwoStep;
  bool oracle = false;    // exact Born probabilities instead of sampling
  bool eq10_alt = false;  // alternative pairing of the three-step combination
  SolverConfig solver;
  SelectionConfig selection;

  QubitCount qubit_count() const { return QubitCount(qubits); }
  void validate() const;

  long long first_budget() const;
  long long third_budget() const;
  long long second_budget() const;
};

struct StageResult {
  std::string name;  // rho_E0, rho_E1 or rho_E
  DensityMatrix rho;
  SolverDiagnostics diagnostics;
  double mse = 0.0;
  double frobenius_squared = 0.0;
};

struct RoundRecord {
  int round = 0;
  AllocationVector allocation;
  CountTable counts;
  FrequencyTable frequencies;
};

struct SelectionRecord {
  int round = 0;  // the round whose allocation it produced
  std::vector<double> masses;
  std::vector<double> weights;
  double l1_norm = 0.0;
  double residual = 0.0;
};

struct RunResult {
  Method method = Method::Fixed;
  std::uint64_t trial = 0;
  std::vector<StageResult> stages;
  std::vector<RoundRecord> rounds;
  std::vector<FrequencyTable> combined;  // f3 / f4 / f5 as produced
  std::vector<SelectionRecord> selections;
  long long copies_consumed = 0;
  double wall_seconds = 0.0;

  const StageResult& final_stage() const { return stages.back(); }
  int total_iterations() const;
};

/// f3 = R f1 + (1 - R) f2 * 3^n N_mu / sum N. A zero allocation total gives a
/// boost factor of 1.
FrequencyTable combine_two_step(const FrequencyTable& f1, const FrequencyTable& f2, double first_ratio,
                                const AllocationVector& allocation);

/// f5 = R f1 + R2 f2 b_mu + (1 - R - R2) f4 b_mu with b_mu = 3^n N_mu / sum N
/// from `allocation` (boost 1 when the allocation is empty).
FrequencyTable combine_three_step(const FrequencyTable& f1, const FrequencyTable& f2, const FrequencyTable& f4,
                                  double first_ratio, double third_ratio, const AllocationVector& allocation);

/// Uniform single-round tomography.
RunResult run_fixed(const ExperimentPlan& plan, const DensityMatrix& truth, std::uint64_t trial = 0);
/// Uniform round, L1 setting selection, boosted second round.
RunResult run_two_step(const ExperimentPlan& plan, const DensityMatrix& truth, std::uint64_t trial = 0);
/// Two-step flow followed by a second selection from rho_E1 and a third round.
RunResult run_three_step(const ExperimentPlan& plan, const DensityMatrix& truth, std::uint64_t trial = 0);
/// Dispatches on plan.method.
RunResult run_plan(const ExperimentPlan& plan, const DensityMatrix& truth, std::uint64_t trial = 0);

/// Key-value summary of a run: plan echo, per-stage error, allocations and
/// solver diagnostics. One "key = value" per line; lists are comma separated.
void write_run_summary(std::ostream& os, const ExperimentPlan& plan, const DensityMatrix& truth,
                       const RunResult& result);

/// Writes run_result.txt plus rho_true.txt and one matrix file per stage.
void write_run_directory(const std::filesystem::path& dir, const ExperimentPlan& plan, const DensityMatrix& truth,
                         const RunResult& result);

}  // namespace tomolift
