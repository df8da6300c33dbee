#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "tomolift/quantum_core.hpp"

namespace tomolift {

/// Copies of the unknown state assigned to each Pauli setting in one round.
struct AllocationVector {
  std::vector<long long> copies;

  long long total() const;
  std::size_t size() const { return copies.size(); }
};

/// floor(budget / 3^n) copies per setting; the remainder goes one copy each
/// to the first settings in enumeration order.
AllocationVector uniform_allocation(QubitCount n, long long budget);

/// 64-bit finalizer (splitmix64) used for all seed derivations.
std::uint64_t mix64(std::uint64_t x);
/// Order-sensitive combination of a seed with one more coordinate.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t coordinate);

/// Names the random stream of one (trial, round). Each setting draws from its
/// own substream derive_seed(derive_seed(derive_seed(base, trial), round), setting),
/// so settings and trials can be sampled in any order.
struct SeedStream {
  std::uint64_t base = 0;
  std::uint64_t trial = 0;
  std::uint64_t round = 0;

  std::uint64_t substream(std::uint64_t setting) const;
};

/// Multinomial draw of `shots` samples over born_probabilities(rho, setting)
/// by sequential conditional binomials. shots == 0 gives the zero vector.
std::vector<long long> simulate_counts(const DensityMatrix& rho, const PauliSetting& setting,
                                       long long shots, std::uint64_t substream_seed);

struct CountTable {
  std::size_t outcomes = 0;
  std::vector<long long> shots;   // per setting
  std::vector<long long> counts;  // settings x outcomes, row-major

  std::size_t settings() const { return shots.size(); }
  long long count(std::size_t setting, std::size_t outcome) const {
    return counts[setting * outcomes + outcome];
  }
};

enum class FrequencyVariant { F1 = 1, F2, F3, F4, F5 };

/// Per-(setting, outcome) real values, row-major and index-aligned with
/// pauli_dictionary().
struct FrequencyTable {
  FrequencyVariant variant = FrequencyVariant::F1;
  std::size_t outcomes = 0;
  std::vector<double> values;

  std::size_t settings() const { return outcomes == 0 ? 0 : values.size() / outcomes; }
  double& at(std::size_t setting, std::size_t outcome) { return values[setting * outcomes + outcome]; }
  double at(std::size_t setting, std::size_t outcome) const { return values[setting * outcomes + outcome]; }
  std::span<const double> row(std::size_t setting) const {
    return std::span<const double>(values).subspan(setting * outcomes, outcomes);
  }
};

struct RoundMeasurement {
  CountTable counts;
  FrequencyTable frequencies;
};

/// Samples every setting with its allocated shots. Frequencies are
/// count / shots; settings with zero shots get an all-zero row.
RoundMeasurement measure_round(const DensityMatrix& rho, const AllocationVector& allocation,
                               const SeedStream& stream,
                               FrequencyVariant variant = FrequencyVariant::F1);

/// Exact Born probabilities of every setting (shots -> infinity).
FrequencyTable exact_frequencies(const DensityMatrix& rho,
                                 FrequencyVariant variant = FrequencyVariant::F4);

/// Same as measure_round but with exact probabilities for measured settings
/// and zero rows for unmeasured ones. Counts are the expected counts rounded
/// by largest remainder, so each row still sums to its shots.
RoundMeasurement measure_round_exact(const DensityMatrix& rho, const AllocationVector& allocation,
                                     FrequencyVariant variant = FrequencyVariant::F1);

/// CSV header "trial,round,setting_index,outcome_index,count,shots".
void write_counts_csv_header(std::ostream& os);
void write_counts_csv(std::ostream& os, std::uint64_t trial, int round, const CountTable& table);

}  // namespace tomolift
