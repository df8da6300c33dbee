#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <random>
#include <sstream>

#include "tomolift/measurement.hpp"

using namespace tomolift;

TEST_CASE("uniform allocation") {
  CHECK(uniform_allocation(QubitCount(2), 90000).copies == std::vector<long long>(9, 10000));
  CHECK(uniform_allocation(QubitCount(1), 10).copies == std::vector<long long>{4, 3, 3});
  CHECK(uniform_allocation(QubitCount(1), 0).total() == 0);
  CHECK_THROWS(uniform_allocation(QubitCount(1), -1));
}

TEST_CASE("seed derivation") {
  CHECK(mix64(0) != mix64(1));
  CHECK(derive_seed(1, 2) != derive_seed(2, 1));
  const SeedStream a{1, 2, 3};
  CHECK(a.substream(4) == derive_seed(derive_seed(derive_seed(1, 2), 3), 4));
  CHECK(a.substream(0) != SeedStream({1, 3, 2}).substream(0));
  // splitmix64 reference output for input 0.
  CHECK(mix64(0) == 0xe220a8397b1dcdafULL);
}

TEST_CASE("simulate_counts examples") {
  const auto cat = make_cat_state(QubitCount(2));
  const auto c = simulate_counts(cat, PauliSetting::from_label("ZZ"), 1000, 42);
  CHECK(c[1] == 0);
  CHECK(c[2] == 0);
  CHECK(c[0] + c[3] == 1000);

  CHECK(simulate_counts(cat, PauliSetting::from_label("XY"), 0, 1) == std::vector<long long>(4, 0));
  CHECK_THROWS(simulate_counts(cat, PauliSetting::from_label("XY"), -1, 1));

  const auto mixed = DensityMatrix::maximally_mixed(QubitCount(1));
  const auto m = simulate_counts(mixed, PauliSetting::from_label("Z"), 1'000'000, 3);
  const double sigma = std::sqrt(1e6 * 0.25);
  CHECK(std::abs(static_cast<double>(m[0]) - 5e5) <= 5.0 * sigma);
  CHECK(std::abs(static_cast<double>(m[1]) - 5e5) <= 5.0 * sigma);
}

TEST_CASE("measure_round") {
  const auto cat = make_cat_state(QubitCount(2));
  const auto alloc = uniform_allocation(QubitCount(2), 90000);
  const auto r = measure_round(cat, alloc, SeedStream{1, 0, 1});
  for (std::size_t mu = 0; mu < 9; ++mu) {
    double s = 0.0;
    long long counts = 0;
    for (std::size_t v = 0; v < 4; ++v) {
      s += r.frequencies.at(mu, v);
      counts += r.counts.count(mu, v);
    }
    CHECK(s == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(counts == 10000);
  }

  AllocationVector sparse{{5000, 0, 0, 0, 5000, 0, 0, 0, 5000}};
  const auto s = measure_round(cat, sparse, SeedStream{1, 0, 2}, FrequencyVariant::F2);
  CHECK(s.frequencies.variant == FrequencyVariant::F2);
  for (std::size_t v = 0; v < 4; ++v) CHECK(s.frequencies.at(1, v) == 0.0);

  const auto again = measure_round(cat, alloc, SeedStream{1, 0, 1});
  CHECK(again.frequencies.values == r.frequencies.values);
  CHECK(again.counts.counts == r.counts.counts);
  const auto other = measure_round(cat, alloc, SeedStream{2, 0, 1});
  CHECK(other.counts.counts != r.counts.counts);

  CHECK_THROWS(measure_round(cat, uniform_allocation(QubitCount(1), 3), SeedStream{}));
}

TEST_CASE("exact measurement keeps counts conserved") {
  const auto rho = random_density_matrix(QubitCount(2), 2, 5);
  const AllocationVector alloc{{7, 0, 13, 1, 2, 3, 999, 5, 11}};
  const auto r = measure_round_exact(rho, alloc);
  const auto exact = exact_frequencies(rho);
  for (std::size_t mu = 0; mu < 9; ++mu) {
    long long total = 0;
    for (std::size_t v = 0; v < 4; ++v) {
      total += r.counts.count(mu, v);
      CHECK(r.counts.count(mu, v) >= 0);
      CHECK(r.frequencies.at(mu, v) == (alloc.copies[mu] == 0 ? 0.0 : exact.at(mu, v)));
    }
    CHECK(total == alloc.copies[mu]);
  }
}

TEST_CASE("count dump format") {
  const auto cat = make_cat_state(QubitCount(1));
  const auto r = measure_round(cat, AllocationVector{{2, 0, 1}}, SeedStream{1, 0, 1});
  std::ostringstream os;
  write_counts_csv_header(os);
  write_counts_csv(os, 3, 1, r.counts);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "trial,round,setting_index,outcome_index,count,shots");
  int rows = 0;
  while (std::getline(in, line)) {
    CHECK(line.rfind("3,1,", 0) == 0);
    ++rows;
  }
  CHECK(rows == 6);
}

TEST_CASE("property: counts are conserved for random allocations") {
  std::mt19937_64 gen(8);
  std::uniform_int_distribution<long long> shots(0, 5000);
  for (int trial = 0; trial < 30; ++trial) {
    const QubitCount q(1 + trial % 3);
    const auto rho = random_density_matrix(q, 1, static_cast<std::uint64_t>(trial) + 1);
    AllocationVector alloc;
    for (std::size_t mu = 0; mu < q.num_settings(); ++mu) alloc.copies.push_back(shots(gen));
    const auto r = measure_round(rho, alloc, SeedStream{9, static_cast<std::uint64_t>(trial), 1});
    for (std::size_t mu = 0; mu < q.num_settings(); ++mu) {
      long long total = 0;
      double freq = 0.0;
      for (std::size_t v = 0; v < q.dim(); ++v) {
        CHECK(r.counts.count(mu, v) >= 0);
        total += r.counts.count(mu, v);
        freq += r.frequencies.at(mu, v);
      }
      CHECK(total == alloc.copies[mu]);
      CHECK(freq == doctest::Approx(alloc.copies[mu] > 0 ? 1.0 : 0.0).epsilon(1e-14));
    }
  }
}

TEST_CASE("property: large-sample counts pass a chi-square test in at least 99 of 100 seeds") {
  const auto rho = random_density_matrix(QubitCount(2), 2, 3);
  const auto setting = PauliSetting::from_label("XZ");
  const auto p = born_probabilities(rho, setting);
  const long long shots = 1'000'000;
  int passed = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto c = simulate_counts(rho, setting, shots, derive_seed(2024, seed));
    double chi2 = 0.0;
    int dof = -1;
    for (std::size_t v = 0; v < p.size(); ++v) {
      const double expected = p[v] * static_cast<double>(shots);
      if (expected <= 0.0) continue;
      chi2 += (static_cast<double>(c[v]) - expected) * (static_cast<double>(c[v]) - expected) / expected;
      ++dof;
    }
    const boost::math::chi_squared dist(dof);
    const double pvalue = boost::math::cdf(boost::math::complement(dist, chi2));
    passed += pvalue > 0.001;
  }
  CHECK(passed >= 99);
}
