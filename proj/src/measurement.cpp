#include "tomolift/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>

namespace tomolift {

long long AllocationVector::total() const {
  return std::accumulate(copies.begin(), copies.end(), 0LL);
}

AllocationVector uniform_allocation(QubitCount n, long long budget) {
  if (budget < 0) throw std::invalid_argument("negative measurement budget");
  const auto m = static_cast<long long>(n.num_settings());
  AllocationVector a;
  a.copies.assign(static_cast<std::size_t>(m), budget / m);
  for (long long i = 0; i < budget % m; ++i) ++a.copies[static_cast<std::size_t>(i)];
  return a;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t coordinate) {
  return mix64(mix64(seed) ^ (coordinate + 0x632be59bd9b4e019ULL));
}

std::uint64_t SeedStream::substream(std::uint64_t setting) const {
  return derive_seed(derive_seed(derive_seed(base, trial), round), setting);
}

std::vector<long long> simulate_counts(const DensityMatrix& rho, const PauliSetting& setting,
                                       long long shots, std::uint64_t substream_seed) {
  if (shots < 0) throw std::invalid_argument("negative shot count");
  const auto p = born_probabilities(rho, setting);
  std::vector<long long> counts(p.size(), 0);
  if (shots == 0) return counts;

  std::mt19937_64 gen(substream_seed);
  long long remaining = shots;
  double mass = 1.0;
  for (std::size_t v = 0; v + 1 < p.size() && remaining > 0; ++v) {
    const double q = mass > 0.0 ? std::clamp(p[v] / mass, 0.0, 1.0) : 0.0;
    long long k = 0;
    if (q >= 1.0) {
      k = remaining;
    } else if (q > 0.0) {
      std::binomial_distribution<long long> binom(remaining, q);
      k = binom(gen);
    }
    counts[v] = k;
    remaining -= k;
    mass -= p[v];
  }
  counts.back() += remaining;
  return counts;
}

RoundMeasurement measure_round(const DensityMatrix& rho, const AllocationVector& allocation,
                               const SeedStream& stream, FrequencyVariant variant) {
  const QubitCount n = rho.qubits();
  if (allocation.size() != n.num_settings()) throw std::invalid_argument("allocation size mismatch");
  const std::size_t d = n.dim();

  RoundMeasurement out;
  out.counts.outcomes = d;
  out.counts.shots = allocation.copies;
  out.counts.counts.assign(allocation.size() * d, 0);
  out.frequencies.variant = variant;
  out.frequencies.outcomes = d;
  out.frequencies.values.assign(allocation.size() * d, 0.0);

  for (const auto& s : enumerate_settings(n)) {
    const long long shots = allocation.copies[s.index];
    if (shots < 0) throw std::invalid_argument("negative allocation entry");
    if (shots == 0) continue;
    const auto c = simulate_counts(rho, s, shots, stream.substream(s.index));
    for (std::size_t v = 0; v < d; ++v) {
      out.counts.counts[s.index * d + v] = c[v];
      out.frequencies.at(s.index, v) = static_cast<double>(c[v]) / static_cast<double>(shots);
    }
  }
  return out;
}

FrequencyTable exact_frequencies(const DensityMatrix& rho, FrequencyVariant variant) {
  const QubitCount n = rho.qubits();
  FrequencyTable f;
  f.variant = variant;
  f.outcomes = n.dim();
  f.values.reserve(n.num_settings() * n.dim());
  for (const auto& s : enumerate_settings(n)) {
    const auto p = born_probabilities(rho, s);
    f.values.insert(f.values.end(), p.begin(), p.end());
  }
  return f;
}

RoundMeasurement measure_round_exact(const DensityMatrix& rho, const AllocationVector& allocation,
                                     FrequencyVariant variant) {
  const QubitCount n = rho.qubits();
  if (allocation.size() != n.num_settings()) throw std::invalid_argument("allocation size mismatch");
  const std::size_t d = n.dim();
  auto exact = exact_frequencies(rho, variant);

  RoundMeasurement out;
  out.counts.outcomes = d;
  out.counts.shots = allocation.copies;
  out.counts.counts.assign(allocation.size() * d, 0);
  for (std::size_t mu = 0; mu < allocation.size(); ++mu) {
    const long long shots = allocation.copies[mu];
    if (shots < 0) throw std::invalid_argument("negative allocation entry");
    if (shots == 0) {
      for (std::size_t v = 0; v < d; ++v) exact.at(mu, v) = 0.0;
      continue;
    }
    // Expected counts, apportioned so the row still sums to shots.
    const auto row = exact.row(mu);
    const double mass = std::accumulate(row.begin(), row.end(), 0.0);
    std::vector<double> frac(d);
    long long left = shots;
    for (std::size_t v = 0; v < d; ++v) {
      const double quota = row[v] / mass * static_cast<double>(shots);
      const auto k = static_cast<long long>(std::floor(quota));
      out.counts.counts[mu * d + v] = k;
      frac[v] = quota - static_cast<double>(k);
      left -= k;
    }
    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
    for (std::size_t k = 0; left > 0; k = (k + 1) % d, --left) ++out.counts.counts[mu * d + order[k]];
  }
  out.frequencies = std::move(exact);
  return out;
}

void write_counts_csv_header(std::ostream& os) {
  os << "trial,round,setting_index,outcome_index,count,shots\n";
}

void write_counts_csv(std::ostream& os, std::uint64_t trial, int round, const CountTable& table) {
  for (std::size_t mu = 0; mu < table.settings(); ++mu) {
    for (std::size_t v = 0; v < table.outcomes; ++v) {
      os << trial << ',' << round << ',' << mu << ',' << v << ',' << table.count(mu, v) << ','
         << table.shots[mu] << '\n';
    }
  }
}

}  // namespace tomolift
