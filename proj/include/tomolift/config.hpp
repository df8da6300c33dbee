#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tomolift/pipeline.hpp"

namespace tomolift {

/// Malformed or invalid configuration. Messages carry the line number when
/// the problem is local to one line.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// What a sweep varies: nothing (single point), total copies, R or R2.
enum class SweepVariable { None, N, R, R2 };

std::string sweep_variable_name(SweepVariable v);
SweepVariable parse_sweep_variable(std::string_view name);

struct SweepSpec {
  SweepVariable variable = SweepVariable::None;
  std::vector<double> values;  // empty for SweepVariable::None
  int trials = 1;
  std::vector<Method> methods;  // defaults to the plan's method

  /// Number of sweep points; a None sweep has one.
  std::size_t points() const { return variable == SweepVariable::None ? 1 : values.size(); }
  /// Value of point i; 0 for a None sweep.
  double value(std::size_t i) const { return variable == SweepVariable::None ? 0.0 : values.at(i); }
};

struct ExperimentConfig {
  ExperimentPlan plan;
  SweepSpec sweep;
};

/// Copy of `plan` with the swept field set to `value` and the method replaced.
/// Throws PlanError when N is not a whole number.
ExperimentPlan apply_sweep_point(const ExperimentPlan& plan, SweepVariable variable, double value, Method method);

/// Checks the sweep against the plan: every (value, method) combination must
/// give a valid plan and trials must be positive.
void validate_sweep(const ExperimentPlan& plan, const SweepSpec& sweep);

/// Parses "key = value" lines. '#' starts a comment. Required keys: n, state, N.
/// A relative state.file is resolved against `base_dir`.
ExperimentConfig parse_config_text(std::string_view text, const std::filesystem::path& base_dir = {});
ExperimentConfig parse_config(const std::filesystem::path& path);

}  // namespace tomolift
