#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "tomolift/metrics.hpp"
#include "tomolift/pipeline.hpp"

using namespace tomolift;

namespace {

FrequencyTable table(std::size_t outcomes, std::vector<double> values) {
  FrequencyTable f;
  f.outcomes = outcomes;
  f.values = std::move(values);
  return f;
}

ExperimentPlan small_plan(Method m) {
  ExperimentPlan p;
  p.qubits = 2;
  p.total_copies = 9000;
  p.first_ratio = 0.5;
  p.third_ratio = m == Method::ThreeStep ? 0.2 : 0.0;
  p.method = m;
  p.seed = 7;
  return p;
}

void check_all_valid(const RunResult& r) {
  for (const auto& st : r.stages) CHECK(check_density_invariants(st.rho.matrix()).empty());
}

}  // namespace

TEST_CASE("method names") {
  for (Method m : {Method::Fixed, Method::TwoStep, Method::ThreeStep}) CHECK(parse_method(method_name(m)) == m);
  CHECK_THROWS_AS(parse_method("four_step"), PlanError);
}

TEST_CASE("state specs") {
  StateSpec s;
  s.kind = "noon";
  CHECK(oracle::max_abs(s.build(QubitCount(2)).matrix() - make_noon_state(QubitCount(2)).matrix()) == 0.0);
  s.kind = "mixed";
  CHECK(s.build(QubitCount(1)).purity() == doctest::Approx(0.5));
  s.kind = "random";
  s.rank = 2;
  s.seed = 3;
  CHECK(s.describe() == "random(rank=2,seed=3)");
  s.kind = "ghz";
  CHECK_THROWS_AS(s.build(QubitCount(2)), PlanError);

  const auto path = std::filesystem::temp_directory_path() / "tomolift_state_spec.txt";
  {
    std::ofstream out(path);
    out << "dim 2\n0.5+0i 0.5+0i\n0.5+0i 0.5+0i\n";
  }
  s.kind = "file";
  s.file = path;
  CHECK(s.build(QubitCount(1)).purity() == doctest::Approx(1.0));
  CHECK_THROWS_AS(s.build(QubitCount(2)), PlanError);
  std::filesystem::remove(path);
}

TEST_CASE("plan validation") {
  ExperimentPlan p;
  CHECK_NOTHROW(p.validate());
  p.first_ratio = 0.9;
  p.third_ratio = 0.2;
  p.method = Method::ThreeStep;
  CHECK_THROWS_AS(p.validate(), PlanError);
  p = ExperimentPlan{};
  p.total_copies = 5;
  CHECK_THROWS_AS(p.validate(), PlanError);
  p = ExperimentPlan{};
  p.total_copies = 20;
  p.first_ratio = 0.4;  // 8 copies for 9 settings
  CHECK_THROWS_AS(p.validate(), PlanError);
  p.method = Method::Fixed;
  CHECK_NOTHROW(p.validate());
  p = ExperimentPlan{};
  p.first_ratio = 1.0;
  CHECK_THROWS_AS(p.validate(), PlanError);
  p.first_ratio = 0.0;
  CHECK_THROWS_AS(p.validate(), PlanError);
  p = ExperimentPlan{};
  p.qubits = 6;
  CHECK_THROWS_AS(p.validate(), PlanError);
}

TEST_CASE("budgets split as floor(N R), floor(N R2) and the rest") {
  ExperimentPlan p;
  p.total_copies = 90000;
  p.first_ratio = 2.0 / 3.0;
  p.third_ratio = 0.1;
  p.method = Method::ThreeStep;
  CHECK(p.first_budget() == 60000);
  CHECK(p.third_budget() == 9000);
  CHECK(p.second_budget() == 21000);
  p.method = Method::TwoStep;
  CHECK(p.third_budget() == 0);
  CHECK(p.second_budget() == 30000);
}

TEST_CASE("two-step combination") {
  const auto f1 = table(2, {0.5, 0.5, 0.3, 0.7, 0.9, 0.1});
  const auto f2 = table(2, {0.6, 0.4, 0.0, 0.0, 0.8, 0.2});
  SUBCASE("uniform allocation is a convex combination") {
    const auto f3 = combine_two_step(f1, f2, 0.25, AllocationVector{{10, 10, 10}});
    CHECK(f3.variant == FrequencyVariant::F3);
    for (std::size_t k = 0; k < 6; ++k) CHECK(f3.values[k] == doctest::Approx(0.25 * f1.values[k] + 0.75 * f2.values[k]));
  }
  SUBCASE("unmeasured setting keeps only the first-round share") {
    const auto f3 = combine_two_step(f1, f2, 0.5, AllocationVector{{20, 0, 10}});
    CHECK(f3.at(1, 0) == doctest::Approx(0.15));
    CHECK(f3.at(1, 1) == doctest::Approx(0.35));
  }
  SUBCASE("worked single-qubit row with boost 2") {
    const auto g1 = table(2, {0.5, 0.5, 0.5, 0.5, 0.5, 0.5});
    const auto g2 = table(2, {0.6, 0.4, 0.6, 0.4, 0.6, 0.4});
    const auto f3 = combine_two_step(g1, g2, 0.5, AllocationVector{{2, 1, 0}});
    CHECK(f3.at(0, 0) == doctest::Approx(0.85));
    CHECK(f3.at(0, 1) == doctest::Approx(0.65));
  }
  SUBCASE("empty allocation uses boost 1") {
    const auto f3 = combine_two_step(f1, f2, 0.5, AllocationVector{{0, 0, 0}});
    CHECK(f3.at(0, 0) == doctest::Approx(0.55));
  }
  CHECK_THROWS(combine_two_step(f1, table(2, {0.5, 0.5}), 0.5, AllocationVector{{1, 1, 1}}));
  CHECK_THROWS(combine_two_step(f1, f2, 0.5, AllocationVector{{1, 1}}));
}

TEST_CASE("three-step combination") {
  const auto f1 = table(2, {0.5, 0.5});
  const auto f2 = table(2, {0.6, 0.4});
  const auto f4 = table(2, {0.55, 0.45});
  const auto f5 = combine_three_step(f1, f2, f4, 0.5, 0.25, AllocationVector{{7}});
  CHECK(f5.variant == FrequencyVariant::F5);
  CHECK(f5.at(0, 0) == doctest::Approx(0.5375));
  CHECK(f5.at(0, 1) == doctest::Approx(0.4625));

  const auto g = combine_three_step(f1, f2, f4, 0.4, 0.0, AllocationVector{{3}});
  CHECK(g.at(0, 0) == doctest::Approx(0.4 * 0.5 + 0.6 * 0.55));
  CHECK_THROWS(combine_three_step(f1, f2, f4, 0.6, 0.4, AllocationVector{{3}}));
}

TEST_CASE("property: combinations match a scalar recomputation on random tables") {
  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<long long> copies(0, 1000);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t settings = trial % 2 ? 9 : 27;
    const std::size_t outcomes = trial % 2 ? 4 : 8;
    std::vector<double> a(settings * outcomes), b(a.size()), c(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      a[k] = u(gen);
      b[k] = u(gen);
      c[k] = u(gen);
    }
    AllocationVector alloc;
    long long total = 0;
    for (std::size_t mu = 0; mu < settings; ++mu) {
      alloc.copies.push_back(copies(gen));
      total += alloc.copies.back();
    }
    const double r = 0.05 + 0.5 * u(gen);
    const double r2 = 0.4 * u(gen);
    const auto f3 = combine_two_step(table(outcomes, a), table(outcomes, b), r, alloc);
    const auto f5 = combine_three_step(table(outcomes, a), table(outcomes, b), table(outcomes, c), r, r2, alloc);
    for (std::size_t mu = 0; mu < settings; ++mu) {
      const double boost = total == 0 ? 1.0 : double(settings) * double(alloc.copies[mu]) / double(total);
      for (std::size_t v = 0; v < outcomes; ++v) {
        const std::size_t k = mu * outcomes + v;
        CHECK(f3.values[k] == doctest::Approx(r * a[k] + (1 - r) * b[k] * boost).epsilon(1e-14));
        CHECK(f5.values[k] ==
              doctest::Approx(r * a[k] + r2 * b[k] * boost + (1 - r - r2) * c[k] * boost).epsilon(1e-14));
        CHECK(f3.values[k] >= 0.0);
      }
    }
    // Boost 1 keeps f3 between its inputs.
    const auto uniform = combine_two_step(table(outcomes, a), table(outcomes, b), r,
                                          AllocationVector{std::vector<long long>(settings, 5)});
    for (std::size_t k = 0; k < a.size(); ++k) {
      CHECK(uniform.values[k] >= std::min(a[k], b[k]) - 1e-15);
      CHECK(uniform.values[k] <= std::max(a[k], b[k]) + 1e-15);
    }
  }
}

TEST_CASE("fixed run") {
  auto plan = small_plan(Method::Fixed);
  plan.total_copies = 90000;
  const auto cat = make_cat_state(QubitCount(2));
  const auto r = run_fixed(plan, cat);
  REQUIRE(r.rounds.size() == 1);
  CHECK(r.rounds[0].allocation.copies == std::vector<long long>(9, 10000));
  REQUIRE(r.stages.size() == 1);
  CHECK(r.final_stage().name == "rho_E");
  CHECK(r.copies_consumed == 90000);
  CHECK(r.final_stage().mse == doctest::Approx(mse(r.final_stage().rho, cat)));
  check_all_valid(r);

  plan.oracle = true;
  CHECK(run_fixed(plan, cat).final_stage().mse <= 1e-8);
}

TEST_CASE("two-step run") {
  const auto cat = make_cat_state(QubitCount(2));
  auto plan = small_plan(Method::TwoStep);
  const auto r = run_two_step(plan, cat);
  REQUIRE(r.stages.size() == 2);
  CHECK(r.stages[0].name == "rho_E0");
  CHECK(r.stages[1].name == "rho_E");
  REQUIRE(r.rounds.size() == 2);
  CHECK(r.rounds[0].allocation.total() == 4500);
  CHECK(r.rounds[1].allocation.total() == 4500);
  CHECK(r.copies_consumed == plan.total_copies);
  REQUIRE(r.selections.size() == 1);
  CHECK(r.selections[0].residual <= plan.selection.epsilon);
  REQUIRE(r.combined.size() == 1);
  CHECK(r.combined[0].variant == FrequencyVariant::F3);
  check_all_valid(r);

  // Selection favours XX, YY and ZZ for the cat state.
  const auto& w = r.selections[0].weights;
  for (const char* label : {"XX", "YY", "ZZ"}) CHECK(w[PauliSetting::from_label(label).index] > 0.2);

  plan.oracle = true;
  CHECK(run_two_step(plan, cat).final_stage().mse <= 1e-8);
  CHECK_THROWS_AS(run_two_step(plan, make_cat_state(QubitCount(3))), PlanError);
}

TEST_CASE("three-step run") {
  const auto rho = random_density_matrix(QubitCount(2), 2, 5);
  auto plan = small_plan(Method::ThreeStep);
  const auto r = run_three_step(plan, rho);
  REQUIRE(r.stages.size() == 3);
  CHECK(r.stages[1].name == "rho_E1");
  REQUIRE(r.rounds.size() == 3);
  CHECK(r.rounds[0].allocation.total() == plan.first_budget());
  CHECK(r.rounds[1].allocation.total() == plan.second_budget());
  CHECK(r.rounds[2].allocation.total() == plan.third_budget());
  CHECK(r.copies_consumed == plan.total_copies);
  CHECK(r.selections.size() == 2);
  check_all_valid(r);

  SUBCASE("R2 = 0 is still valid") {
    plan.third_ratio = 0.0;
    const auto z = run_three_step(plan, rho);
    CHECK(z.copies_consumed == plan.total_copies);
    check_all_valid(z);
  }
  SUBCASE("alternative pairing skips round 3") {
    plan.eq10_alt = true;
    const auto alt = run_three_step(plan, rho);
    CHECK(alt.rounds.size() == 2);
    CHECK(alt.copies_consumed == plan.first_budget() + plan.second_budget());
    check_all_valid(alt);
  }
  SUBCASE("oracle mode") {
    plan.oracle = true;
    CHECK(run_three_step(plan, make_cat_state(QubitCount(2))).final_stage().mse <= 1e-8);
  }
}

TEST_CASE("property: runs are deterministic and trials differ") {
  const auto rho = make_w_state(QubitCount(2));
  for (Method m : {Method::Fixed, Method::TwoStep, Method::ThreeStep}) {
    const auto plan = small_plan(m);
    const auto a = run_plan(plan, rho, 3);
    const auto b = run_plan(plan, rho, 3);
    const auto c = run_plan(plan, rho, 4);
    CHECK(a.method == m);
    CHECK((a.final_stage().rho.matrix().array() == b.final_stage().rho.matrix().array()).all());
    for (std::size_t i = 0; i < a.rounds.size(); ++i) CHECK(a.rounds[i].counts.counts == b.rounds[i].counts.counts);
    CHECK(a.rounds[0].counts.counts != c.rounds[0].counts.counts);
  }
}

TEST_CASE("property: every method consumes exactly N copies") {
  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    ExperimentPlan p;
    p.qubits = 1 + trial % 2;
    p.state.kind = "random";
    p.state.seed = static_cast<std::uint64_t>(trial);
    p.total_copies = 30 + static_cast<long long>(u(gen) * 20000);
    p.first_ratio = 0.3 + 0.4 * u(gen);
    p.third_ratio = 0.25 * u(gen);
    p.method = static_cast<Method>(trial % 3);
    p.seed = static_cast<std::uint64_t>(trial);
    p.solver.max_iterations = 200;
    const auto r = run_plan(p, p.state.build(p.qubit_count()));
    CHECK(r.copies_consumed == p.total_copies);
    long long summed = 0;
    for (const auto& round : r.rounds) {
      for (auto c : round.allocation.copies) CHECK(c >= 0);
      summed += round.allocation.total();
    }
    CHECK(summed == p.total_copies);
    check_all_valid(r);
  }
}

TEST_CASE("run summary and directory") {
  const auto cat = make_cat_state(QubitCount(2));
  const auto plan = small_plan(Method::TwoStep);
  const auto r = run_plan(plan, cat);
  std::ostringstream os;
  write_run_summary(os, plan, cat, r);
  const auto text = os.str();
  CHECK(text.find("plan.method = two_step\n") != std::string::npos);
  CHECK(text.find("copies_consumed = 9000\n") != std::string::npos);
  CHECK(text.find("stage.rho_E.mse = ") != std::string::npos);
  CHECK(text.find("round.2.allocation = ") != std::string::npos);

  const auto dir = std::filesystem::temp_directory_path() / "tomolift_run_dir_test";
  std::filesystem::remove_all(dir);
  write_run_directory(dir, plan, cat, r);
  for (const char* f : {"run_result.txt", "rho_true.txt", "rho_E0.txt", "rho_E.txt"}) {
    CHECK(std::filesystem::exists(dir / f));
  }
  std::filesystem::remove_all(dir);
}
