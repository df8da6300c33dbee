#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "tomolift/config.hpp"

using namespace tomolift;

TEST_CASE("valid cat config") {
  const auto cfg = parse_config_text(
      "# two-step on the cat state\n"
      "n = 2\nstate = cat\nN = 90000\nR = 0.5\nmethod = two_step\n");
  CHECK(cfg.plan.qubits == 2);
  CHECK(cfg.plan.state.kind == "cat");
  CHECK(cfg.plan.total_copies == 90000);
  CHECK(cfg.plan.first_ratio == 0.5);
  CHECK(cfg.plan.method == Method::TwoStep);
  CHECK(cfg.sweep.variable == SweepVariable::None);
  CHECK(cfg.sweep.points() == 1);
  CHECK(cfg.sweep.methods == std::vector<Method>{Method::TwoStep});
}

TEST_CASE("every key is read") {
  const auto cfg = parse_config_text(
      "n = 3\nstate = random   # inline comment\nstate.rank = 2\nstate.seed = 9\nN = 270000\n"
      "R = 0.6\nR2 = 0.1\nseed = 123\nmethod = three_step\noracle = true\neq10_alt = yes\n"
      "solver.max_iterations = 100\nsolver.tolerance = 1e-8\nsolver.step_size = 0.5\nsolver.penalty = 10\n"
      "selection.epsilon = 1e-4\nselection.max_stages = 20\nselection.max_iterations = 300\n"
      "sweep.variable = R2\nsweep.values = 0.05, 0.1 0.2\nsweep.trials = 3\nsweep.methods = two_step,three_step\n");
  const auto& p = cfg.plan;
  CHECK(p.state.rank == 2);
  CHECK(p.state.seed == 9);
  CHECK(p.third_ratio == 0.1);
  CHECK(p.seed == 123);
  CHECK(p.oracle);
  CHECK(p.eq10_alt);
  CHECK(p.solver.max_iterations == 100);
  CHECK(p.solver.convergence_tolerance == 1e-8);
  CHECK(p.solver.step_size == 0.5);
  CHECK(p.solver.penalty_parameter == 10.0);
  CHECK(p.selection.epsilon == 1e-4);
  CHECK(p.selection.max_stages == 20);
  CHECK(p.selection.max_iterations == 300);
  CHECK(cfg.sweep.variable == SweepVariable::R2);
  CHECK(cfg.sweep.values == std::vector<double>{0.05, 0.1, 0.2});
  CHECK(cfg.sweep.trials == 3);
  CHECK(cfg.sweep.methods == std::vector<Method>{Method::TwoStep, Method::ThreeStep});
}

TEST_CASE("grid sweeps") {
  const auto cfg = parse_config_text("n = 2\nstate = cat\nN = 90000\nsweep.variable = R\nsweep.grid = 0.1 0.9 9\n");
  REQUIRE(cfg.sweep.values.size() == 9);
  CHECK(cfg.sweep.values.front() == 0.1);
  CHECK(cfg.sweep.values.back() == doctest::Approx(0.9));
  CHECK(cfg.sweep.value(4) == doctest::Approx(0.5));
}

TEST_CASE("invariant violations are rejected") {
  CHECK_THROWS_AS(parse_config_text("n = 2\nstate = cat\nN = 90000\nR = 0.9\nR2 = 0.2\nmethod = three_step\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config_text("n = 2\nstate = cat\nN = 5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("n = 2\nstate = ghz\nN = 900\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("n = 7\nstate = cat\nN = 90000\n"), ConfigError);
  // A sweep point outside the domain is caught up front.
  CHECK_THROWS_AS(parse_config_text("n = 2\nstate = cat\nN = 900\nsweep.variable = R\nsweep.values = 0.5 1.0\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config_text("n = 2\nstate = cat\nN = 900\nsweep.variable = N\nsweep.values = 900.5\n"),
                  ConfigError);
}

TEST_CASE("syntax errors name the problem") {
  auto message = [](const char* text) {
    try {
      parse_config_text(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("state = cat\nN = 900\n").find("missing required key 'n'") != std::string::npos);
  CHECK(message("n = 2\nstate = cat\nN = 900\nfoo = 1\n").find("line 4: unknown key 'foo'") != std::string::npos);
  CHECK(message("n = 2\nn = 3\nstate = cat\nN = 900\n").find("duplicate key 'n'") != std::string::npos);
  CHECK(message("n = two\nstate = cat\nN = 900\n").find("line 1") != std::string::npos);
  CHECK(message("n = 2\nstate = cat\nN = 900\njust words\n").find("line 4") != std::string::npos);
  CHECK(message("n = 2\nstate = cat\nN = 900\noracle = maybe\n").find("true or false") != std::string::npos);
  CHECK(message("n = 2\nstate = cat\nN = 900\nmethod = best\n").find("unknown method") != std::string::npos);
  CHECK(message("n = 2\nstate = cat\nN = 900\nsweep.values = 1 2\n").find("sweep.variable") != std::string::npos);
  CHECK(message("n = 2\nstate = cat\nN = 900\nsweep.trials = 0\n").find("trials") != std::string::npos);
}

TEST_CASE("files and relative state paths") {
  const auto dir = std::filesystem::temp_directory_path() / "tomolift_config_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "state.txt") << "dim 2\n1+0i 0+0i\n0+0i 0+0i\n";
    std::ofstream(dir / "plan.conf") << "n = 1\nstate = file\nstate.file = state.txt\nN = 300\n";
  }
  const auto cfg = parse_config(dir / "plan.conf");
  CHECK(cfg.plan.state.file == dir / "state.txt");
  CHECK_THROWS_AS(parse_config(dir / "missing.conf"), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("sweep points") {
  ExperimentPlan p;
  CHECK(apply_sweep_point(p, SweepVariable::N, 9000, Method::Fixed).total_copies == 9000);
  CHECK(apply_sweep_point(p, SweepVariable::R, 0.3, Method::Fixed).first_ratio == 0.3);
  CHECK(apply_sweep_point(p, SweepVariable::R2, 0.3, Method::ThreeStep).third_ratio == 0.3);
  CHECK(apply_sweep_point(p, SweepVariable::None, 0.0, Method::ThreeStep).method == Method::ThreeStep);
  CHECK_THROWS_AS(apply_sweep_point(p, SweepVariable::N, 0.5, Method::Fixed), PlanError);
  CHECK(parse_sweep_variable("R2") == SweepVariable::R2);
  CHECK_THROWS_AS(parse_sweep_variable("Q"), ConfigError);
}
