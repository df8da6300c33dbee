#include "tomolift/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace tomolift {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto next = s.find_first_of(", \t", pos);
    const auto token = s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos);
    if (!token.empty()) out.push_back(token);
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

struct Entry {
  std::string value;
  int line = 0;
};

class Reader {
 public:
  explicit Reader(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  const Entry& require(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError("missing required key '" + key + "'");
    return it->second;
  }

  template <class T>
  void number(const std::string& key, T& out) const {
    if (!has(key)) return;
    out = parse_number<T>(key, entries_.at(key));
  }

  void text(const std::string& key, std::string& out) const {
    if (has(key)) out = entries_.at(key).value;
  }

  void flag(const std::string& key, bool& out) const {
    if (!has(key)) return;
    const auto& e = entries_.at(key);
    if (e.value == "true" || e.value == "1" || e.value == "yes") {
      out = true;
    } else if (e.value == "false" || e.value == "0" || e.value == "no") {
      out = false;
    } else {
      throw error(key, e, "expected true or false");
    }
  }

  template <class T>
  std::vector<T> list(const std::string& key) const {
    std::vector<T> out;
    const auto& e = entries_.at(key);
    for (auto tok : split_list(e.value)) out.push_back(parse_number<T>(key, Entry{std::string(tok), e.line}));
    if (out.empty()) throw error(key, e, "empty list");
    return out;
  }

  static ConfigError error(const std::string& key, const Entry& e, const std::string& why) {
    return ConfigError("line " + std::to_string(e.line) + ": " + key + ": " + why);
  }

  template <class T>
  static T parse_number(const std::string& key, const Entry& e) {
    T v{};
    const char* first = e.value.data();
    const char* last = first + e.value.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) throw error(key, e, "cannot parse '" + e.value + "' as a number");
    if constexpr (std::is_floating_point_v<T>) {
      if (!std::isfinite(v)) throw error(key, e, "value must be finite");
    }
    return v;
  }

 private:
  std::map<std::string, Entry> entries_;
};

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "n",          "state",          "state.rank",           "state.seed",          "state.file",
      "N",          "R",              "R2",                   "seed",                "method",
      "oracle",     "eq10_alt",       "solver.max_iterations", "solver.tolerance",   "solver.step_size",
      "solver.penalty", "selection.epsilon", "selection.max_stages", "selection.max_iterations",
      "sweep.variable", "sweep.values", "sweep.grid",         "sweep.trials",        "sweep.methods"};
  return keys;
}

std::vector<double> grid_values(const Reader& in) {
  const auto g = in.list<double>("sweep.grid");
  const auto& e = in.require("sweep.grid");
  if (g.size() != 3) throw Reader::error("sweep.grid", e, "expected 'start stop count'");
  const double count = g[2];
  if (count < 1 || count != std::floor(count)) throw Reader::error("sweep.grid", e, "count must be a positive integer");
  const auto k = static_cast<int>(count);
  std::vector<double> out;
  for (int i = 0; i < k; ++i) out.push_back(k == 1 ? g[0] : g[0] + (g[1] - g[0]) * i / (k - 1));
  return out;
}

}  // namespace

std::string sweep_variable_name(SweepVariable v) {
  switch (v) {
    case SweepVariable::None:
      return "none";
    case SweepVariable::N:
      return "N";
    case SweepVariable::R:
      return "R";
    case SweepVariable::R2:
      return "R2";
  }
  return "none";
}

SweepVariable parse_sweep_variable(std::string_view name) {
  if (name == "none") return SweepVariable::None;
  if (name == "N") return SweepVariable::N;
  if (name == "R") return SweepVariable::R;
  if (name == "R2") return SweepVariable::R2;
  throw ConfigError("unknown sweep variable '" + std::string(name) + "' (expected none, N, R or R2)");
}

ExperimentPlan apply_sweep_point(const ExperimentPlan& plan, SweepVariable variable, double value, Method method) {
  ExperimentPlan p = plan;
  p.method = method;
  switch (variable) {
    case SweepVariable::None:
      break;
    case SweepVariable::N:
      if (value != std::floor(value) || value < 1 || value > 9e15) {
        throw PlanError("swept N must be a positive whole number");
      }
      p.total_copies = static_cast<long long>(value);
      break;
    case SweepVariable::R:
      p.first_ratio = value;
      break;
    case SweepVariable::R2:
      p.third_ratio = value;
      break;
  }
  return p;
}

void validate_sweep(const ExperimentPlan& plan, const SweepSpec& sweep) {
  if (sweep.trials < 1) throw ConfigError("sweep.trials must be at least 1");
  if (sweep.methods.empty()) throw ConfigError("sweep.methods is empty");
  if (sweep.variable != SweepVariable::None && sweep.values.empty()) {
    throw ConfigError("sweep over " + sweep_variable_name(sweep.variable) + " has no values");
  }
  for (std::size_t i = 0; i < sweep.points(); ++i) {
    for (Method m : sweep.methods) {
      try {
        apply_sweep_point(plan, sweep.variable, sweep.value(i), m).validate();
      } catch (const std::invalid_argument& e) {
        std::ostringstream os;
        os << "sweep point " << sweep_variable_name(sweep.variable) << " = " << sweep.value(i) << " with method "
           << method_name(m) << ": " << e.what();
        throw ConfigError(os.str());
      }
    }
  }
}

ExperimentConfig parse_config_text(std::string_view text, const std::filesystem::path& base_dir) {
  std::map<std::string, Entry> entries;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto end = text.find('\n', pos);
    std::string_view line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? text.size() : end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (!known_keys().count(key)) throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    if (value.empty()) throw ConfigError("line " + std::to_string(line_no) + ": key '" + key + "' has no value");
    if (!entries.emplace(key, Entry{value, line_no}).second) {
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
  }
  const Reader in(std::move(entries));

  ExperimentConfig cfg;
  ExperimentPlan& plan = cfg.plan;
  plan.qubits = Reader::parse_number<int>("n", in.require("n"));
  plan.state.kind = in.require("state").value;
  plan.total_copies = Reader::parse_number<long long>("N", in.require("N"));
  in.number("state.rank", plan.state.rank);
  in.number("state.seed", plan.state.seed);
  if (in.has("state.file")) {
    plan.state.file = in.require("state.file").value;
    if (plan.state.file.is_relative() && !base_dir.empty()) plan.state.file = base_dir / plan.state.file;
  }
  if (plan.state.kind == "file" && plan.state.file.empty()) throw ConfigError("state = file needs state.file");
  in.number("R", plan.first_ratio);
  in.number("R2", plan.third_ratio);
  in.number("seed", plan.seed);
  if (in.has("method")) {
    try {
      plan.method = parse_method(in.require("method").value);
    } catch (const PlanError& e) {
      throw Reader::error("method", in.require("method"), e.what());
    }
  }
  in.flag("oracle", plan.oracle);
  in.flag("eq10_alt", plan.eq10_alt);
  in.number("solver.max_iterations", plan.solver.max_iterations);
  in.number("solver.tolerance", plan.solver.convergence_tolerance);
  in.number("solver.step_size", plan.solver.step_size);
  in.number("solver.penalty", plan.solver.penalty_parameter);
  in.number("selection.epsilon", plan.selection.epsilon);
  in.number("selection.max_stages", plan.selection.max_stages);
  in.number("selection.max_iterations", plan.selection.max_iterations);

  SweepSpec& sweep = cfg.sweep;
  if (in.has("sweep.variable")) sweep.variable = parse_sweep_variable(in.require("sweep.variable").value);
  if (in.has("sweep.values") && in.has("sweep.grid")) throw ConfigError("give sweep.values or sweep.grid, not both");
  if (in.has("sweep.values")) sweep.values = in.list<double>("sweep.values");
  if (in.has("sweep.grid")) sweep.values = grid_values(in);
  if (sweep.variable == SweepVariable::None && !sweep.values.empty()) {
    throw ConfigError("sweep values given without sweep.variable");
  }
  in.number("sweep.trials", sweep.trials);
  if (in.has("sweep.methods")) {
    const auto& e = in.require("sweep.methods");
    for (auto tok : split_list(e.value)) {
      try {
        sweep.methods.push_back(parse_method(tok));
      } catch (const PlanError& err) {
        throw Reader::error("sweep.methods", e, err.what());
      }
    }
  } else {
    sweep.methods.push_back(plan.method);
  }

  try {
    // The state is built once here so unknown kinds and bad files fail early.
    (void)plan.state.build(plan.qubit_count());
    plan.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  validate_sweep(plan, sweep);
  return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.parent_path());
}

}  // namespace tomolift
