#include "tomolift/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "tomolift/matrix_io.hpp"
#include "tomolift/metrics.hpp"

namespace tomolift {

namespace {

using Clock = std::chrono::steady_clock;

long long ratio_budget(long long total, double ratio) {
  // The small offset keeps N * 2/3 style products from flooring one copy low.
  return static_cast<long long>(std::floor(static_cast<double>(total) * ratio + 1e-9));
}

double boost_factor(const AllocationVector& allocation, std::size_t setting) {
  const long long total = allocation.total();
  if (total == 0) return 1.0;
  return static_cast<double>(allocation.size()) * static_cast<double>(allocation.copies[setting]) /
         static_cast<double>(total);
}

void require_same_shape(const FrequencyTable& a, const FrequencyTable& b) {
  if (a.outcomes != b.outcomes || a.values.size() != b.values.size()) {
    throw std::invalid_argument("frequency tables have different shapes");
  }
}

class RunContext {
 public:
  RunContext(const ExperimentPlan& plan, const DensityMatrix& truth, std::uint64_t trial)
      : plan_(plan), truth_(truth), n_(plan.qubit_count()), trial_(trial), start_(Clock::now()) {
    plan.validate();
    if (truth.qubits() != n_) throw PlanError("true state qubit count differs from plan n");
    result_.method = plan.method;
    result_.trial = trial;
  }

  const RoundRecord& measure(int round, AllocationVector allocation) {
    RoundMeasurement m = plan_.oracle ? measure_round_exact(truth_, allocation)
                                      : measure_round(truth_, allocation, SeedStream{plan_.seed, trial_, static_cast<std::uint64_t>(round)});
    m.frequencies.variant = round == 1 ? FrequencyVariant::F1 : FrequencyVariant::F2;
    result_.copies_consumed += allocation.total();
    result_.rounds.push_back(RoundRecord{round, std::move(allocation), std::move(m.counts), std::move(m.frequencies)});
    return result_.rounds.back();
  }

  const StageResult& estimate(std::string name, const FrequencyTable& f) {
    auto est = estimate_density_matrix(EstimationProblem::from_table(n_, f), plan_.solver);
    const double e = mse(est.rho, truth_);
    const double fro = frobenius_squared_error(est.rho.matrix(), truth_.matrix());
    result_.stages.push_back(StageResult{std::move(name), std::move(est.rho), std::move(est.diagnostics), e, fro});
    return result_.stages.back();
  }

  AllocationVector select(int round, const DensityMatrix& rho, long long budget) {
    if (dictionary_.empty()) dictionary_ = pauli_dictionary(n_);
    const auto s = decompose_l1(rho, dictionary_, plan_.selection);
    SelectionRecord rec;
    rec.round = round;
    rec.masses = setting_masses(s, n_.dim());
    rec.weights = setting_weights(s, n_.dim());
    rec.l1_norm = s.l1_norm();
    rec.residual = s.residual;
    auto alloc = allocate_copies(rec.weights, budget);
    result_.selections.push_back(std::move(rec));
    return alloc;
  }

  const FrequencyTable& keep(FrequencyTable f) {
    result_.combined.push_back(std::move(f));
    return result_.combined.back();
  }

  RunResult finish() {
    result_.wall_seconds = std::chrono::duration<double>(Clock::now() - start_).count();
    return std::move(result_);
  }

  QubitCount qubits() const { return n_; }

 private:
  const ExperimentPlan& plan_;
  const DensityMatrix& truth_;
  QubitCount n_;
  std::uint64_t trial_;
  Clock::time_point start_;
  std::vector<ProjectorBasis> dictionary_;
  RunResult result_;
};

}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::Fixed:
      return "fixed";
    case Method::TwoStep:
      return "two_step";
    case Method::ThreeStep:
      return "three_step";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "fixed") return Method::Fixed;
  if (name == "two_step") return Method::TwoStep;
  if (name == "three_step") return Method::ThreeStep;
  throw PlanError("unknown method '" + std::string(name) + "' (expected fixed, two_step or three_step)");
}

DensityMatrix StateSpec::build(QubitCount n) const {
  if (kind == "cat") return make_cat_state(n);
  if (kind == "noon") return make_noon_state(n);
  if (kind == "w") return make_w_state(n);
  if (kind == "random") return random_density_matrix(n, rank, seed);
  if (kind == "mixed") return DensityMatrix::maximally_mixed(n);
  if (kind == "file") {
    auto rho = read_density_matrix_file(file);
    if (rho.dim() != n.dim()) throw PlanError("state file dimension does not match n");
    return rho;
  }
  throw PlanError("unknown state '" + kind + "' (expected cat, noon, w, random, mixed or file)");
}

std::string StateSpec::describe() const {
  if (kind == "random") return "random(rank=" + std::to_string(rank) + ",seed=" + std::to_string(seed) + ")";
  if (kind == "file") return "file(" + file.string() + ")";
  return kind;
}

void ExperimentPlan::validate() const {
  if (qubits < 1 || qubits > kMaxQubits) throw PlanError("n must be between 1 and 5");
  const auto settings = static_cast<long long>(qubit_count().num_settings());
  if (total_copies < settings) {
    throw PlanError("N = " + std::to_string(total_copies) + " is smaller than the " + std::to_string(settings) +
                    " Pauli settings");
  }
  if (!(first_ratio > 0.0 && first_ratio < 1.0)) throw PlanError("R must lie strictly between 0 and 1");
  if (!(third_ratio >= 0.0 && third_ratio < 1.0)) throw PlanError("R2 must lie in [0, 1)");
  if (!(first_ratio + third_ratio < 1.0)) throw PlanError("R + R2 must be below 1");
  // Fixed tomography ignores R, so the round-1 floor only binds adaptive runs.
  if (method != Method::Fixed && first_budget() < settings) {
    throw PlanError("R * N gives fewer than one copy per setting in the first round");
  }
  if (method == Method::TwoStep && total_copies - first_budget() < 1) {
    throw PlanError("R leaves no copies for the second round");
  }
  if (method == Method::ThreeStep && second_budget() < 1) {
    throw PlanError("R and R2 leave no copies for the second round");
  }
  solver.validate();
  selection.validate();
}

long long ExperimentPlan::first_budget() const { return ratio_budget(total_copies, first_ratio); }

long long ExperimentPlan::third_budget() const {
  return method == Method::ThreeStep ? ratio_budget(total_copies, third_ratio) : 0;
}

long long ExperimentPlan::second_budget() const {
  if (method == Method::Fixed) return 0;
  return total_copies - first_budget() - third_budget();
}

int RunResult::total_iterations() const {
  int s = 0;
  for (const auto& st : stages) s += st.diagnostics.iterations;
  return s;
}

FrequencyTable combine_two_step(const FrequencyTable& f1, const FrequencyTable& f2, double first_ratio,
                                const AllocationVector& allocation) {
  require_same_shape(f1, f2);
  if (allocation.size() != f1.settings()) throw std::invalid_argument("allocation does not match table");
  FrequencyTable f3 = f1;
  f3.variant = FrequencyVariant::F3;
  for (std::size_t mu = 0; mu < f1.settings(); ++mu) {
    const double boost = boost_factor(allocation, mu);
    for (std::size_t v = 0; v < f1.outcomes; ++v) {
      f3.at(mu, v) = first_ratio * f1.at(mu, v) + (1.0 - first_ratio) * f2.at(mu, v) * boost;
    }
  }
  return f3;
}

FrequencyTable combine_three_step(const FrequencyTable& f1, const FrequencyTable& f2, const FrequencyTable& f4,
                                  double first_ratio, double third_ratio, const AllocationVector& allocation) {
  if (!(first_ratio + third_ratio < 1.0)) throw std::invalid_argument("R + R2 must be below 1");
  require_same_shape(f1, f2);
  require_same_shape(f1, f4);
  if (allocation.size() != f1.settings()) throw std::invalid_argument("allocation does not match table");
  const double middle = 1.0 - first_ratio - third_ratio;
  FrequencyTable f5 = f1;
  f5.variant = FrequencyVariant::F5;
  for (std::size_t mu = 0; mu < f1.settings(); ++mu) {
    const double boost = boost_factor(allocation, mu);
    for (std::size_t v = 0; v < f1.outcomes; ++v) {
      f5.at(mu, v) = first_ratio * f1.at(mu, v) + third_ratio * f2.at(mu, v) * boost + middle * f4.at(mu, v) * boost;
    }
  }
  return f5;
}

RunResult run_fixed(const ExperimentPlan& plan, const DensityMatrix& truth, std::uint64_t trial) {
  RunContext ctx(plan, truth, trial);
  const auto& r1 = ctx.measure(1, uniform_allocation(ctx.qubits(), plan.total_copies));
  ctx.estimate("rho_E", r1.frequencies);
  return ctx.finish();
}

RunResult run_two_step(const ExperimentPlan& plan, const DensityMatrix& truth, std::uint64_t trial) {
  RunContext ctx(plan, truth, trial);
  const auto& r1 = ctx.measure(1, uniform_allocation(ctx.qubits(), plan.first_budget()));
  const FrequencyTable f1 = r1.frequencies;
  const DensityMatrix rho_e0 = ctx.estimate("rho_E0", f1).rho;

  const auto& r2 = ctx.measure(2, ctx.select(2, rho_e0, plan.second_budget()));
  const auto& f3 = ctx.keep(combine_two_step(f1, r2.frequencies, plan.first_ratio, r2.allocation));
  ctx.estimate("rho_E", f3);
  return ctx.finish();
}

RunResult run_three_step(const ExperimentPlan& plan, const DensityMatrix& truth, std::uint64_t trial) {
  RunContext ctx(plan, truth, trial);
  const double r = plan.first_ratio;
  const double r2 = plan.third_ratio;

  const auto& r1 = ctx.measure(1, uniform_allocation(ctx.qubits(), plan.first_budget()));
  const FrequencyTable f1 = r1.frequencies;
  const DensityMatrix rho_e0 = ctx.estimate("rho_E0", f1).rho;

  const RoundRecord round2 = ctx.measure(2, ctx.select(2, rho_e0, plan.second_budget()));
  // rho_E1 weighs round 1 by its share of the copies consumed so far.
  const double share = r / (1.0 - r2);
  const FrequencyTable f3 = ctx.keep(combine_two_step(f1, round2.frequencies, share, round2.allocation));
  const DensityMatrix rho_e1 = ctx.estimate("rho_E1", f3).rho;
  const FrequencyTable f4 = ctx.keep(exact_frequencies(rho_e1, FrequencyVariant::F4));

  if (plan.eq10_alt) {
    ctx.estimate("rho_E", ctx.keep(combine_three_step(f1, round2.frequencies, f4, r, r2, round2.allocation)));
    return ctx.finish();
  }

  const auto& r3 = ctx.measure(3, ctx.select(3, rho_e1, plan.third_budget()));
  ctx.estimate("rho_E", ctx.keep(combine_three_step(f1, r3.frequencies, f4, r, r2, r3.allocation)));
  return ctx.finish();
}

RunResult run_plan(const ExperimentPlan& plan, const DensityMatrix& truth, std::uint64_t trial) {
  switch (plan.method) {
    case Method::Fixed:
      return run_fixed(plan, truth, trial);
    case Method::TwoStep:
      return run_two_step(plan, truth, trial);
    case Method::ThreeStep:
      return run_three_step(plan, truth, trial);
  }
  throw PlanError("unknown method");
}

void write_run_summary(std::ostream& os, const ExperimentPlan& plan, const DensityMatrix& truth,
                       const RunResult& result) {
  const auto old = os.precision(17);
  auto list = [&os](const auto& v) {
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    os << '\n';
  };
  os << "# tomolift run result\n";
  os << "plan.n = " << plan.qubits << '\n';
  os << "plan.state = " << plan.state.describe() << '\n';
  os << "plan.N = " << plan.total_copies << '\n';
  os << "plan.R = " << plan.first_ratio << '\n';
  os << "plan.R2 = " << plan.third_ratio << '\n';
  os << "plan.seed = " << plan.seed << '\n';
  os << "plan.method = " << method_name(plan.method) << '\n';
  os << "plan.oracle = " << (plan.oracle ? "true" : "false") << '\n';
  os << "plan.eq10_alt = " << (plan.eq10_alt ? "true" : "false") << '\n';
  os << "trial = " << result.trial << '\n';
  os << "truth.purity = " << truth.purity() << '\n';
  os << "copies_consumed = " << result.copies_consumed << '\n';
  for (const auto& r : result.rounds) {
    os << "round." << r.round << ".allocation = ";
    list(r.allocation.copies);
  }
  for (const auto& s : result.selections) {
    os << "selection." << s.round << ".l1_norm = " << s.l1_norm << '\n';
    os << "selection." << s.round << ".residual = " << s.residual << '\n';
    os << "selection." << s.round << ".weights = ";
    list(s.weights);
  }
  for (const auto& st : result.stages) {
    os << "stage." << st.name << ".mse = " << st.mse << '\n';
    os << "stage." << st.name << ".frobenius_squared = " << st.frobenius_squared << '\n';
    os << "stage." << st.name << ".iterations = " << st.diagnostics.iterations << '\n';
    os << "stage." << st.name << ".objective = " << st.diagnostics.final_objective << '\n';
    os << "stage." << st.name << ".converged = " << (st.diagnostics.converged ? "true" : "false") << '\n';
  }
  os << "final.mse = " << result.final_stage().mse << '\n';
  os << "final.frobenius_squared = " << result.final_stage().frobenius_squared << '\n';
  os << "wall_seconds = " << result.wall_seconds << '\n';
  os.precision(old);
}

void write_run_directory(const std::filesystem::path& dir, const ExperimentPlan& plan, const DensityMatrix& truth,
                         const RunResult& result) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "run_result.txt");
  if (!out) throw std::runtime_error("cannot write " + (dir / "run_result.txt").string());
  write_run_summary(out, plan, truth, result);
  write_matrix_file(dir / "rho_true.txt", truth.matrix());
  for (const auto& st : result.stages) write_matrix_file(dir / (st.name + ".txt"), st.rho.matrix());
}

}  // namespace tomolift
