#include "tomolift/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "tomolift/estimator.hpp"

namespace tomolift {

namespace {

double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

// Neumaier-compensated sum.
double stable_sum(std::span<const double> v) {
  double sum = 0.0;
  double comp = 0.0;
  for (double x : v) {
    const double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return sum + comp;
}

struct FistaResult {
  int iterations = 0;
};

// Minimizes lambda ||s||_1 + 1/2 ||B s - rho||_F^2 starting from s.
FistaResult fista(Eigen::VectorXd& s, const ComplexMatrix& rho, const MeasurementOperator& op, double lambda,
                  double lipschitz, const SelectionConfig& config) {
  const auto m = s.size();
  Eigen::VectorXd x = s;
  Eigen::VectorXd y = s;
  Eigen::VectorXd x_next(m);
  double t = 1.0;
  FistaResult out;
  for (int it = 1; it <= config.max_iterations; ++it) {
    out.iterations = it;
    const Eigen::VectorXd grad = op.forward(op.adjoint(y) - rho);
    double change = 0.0;
    double scale = 1.0;
    double restart = 0.0;
    for (Eigen::Index k = 0; k < m; ++k) {
      x_next(k) = soft_threshold(y(k) - grad(k) / lipschitz, lambda / lipschitz);
      change = std::max(change, std::abs(x_next(k) - x(k)));
      scale = std::max(scale, std::abs(x_next(k)));
      restart += (y(k) - x_next(k)) * (x_next(k) - x(k));
    }
    if (restart > 0.0) t = 1.0;
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double momentum = (t - 1.0) / t_next;
    y = x_next + momentum * (x_next - x);
    x.swap(x_next);
    t = t_next;
    if (change <= config.inner_tolerance * scale) break;
  }
  s = std::move(x);
  return out;
}

}  // namespace

void SelectionConfig::validate() const {
  if (!(epsilon > 0.0)) throw std::invalid_argument("selection epsilon must be positive");
  if (!(shrink > 0.0 && shrink < 1.0)) throw std::invalid_argument("selection shrink must be in (0, 1)");
  if (max_stages <= 0 || max_iterations <= 0) throw std::invalid_argument("selection limits must be positive");
  if (!(inner_tolerance > 0.0)) throw std::invalid_argument("selection inner tolerance must be positive");
}

double CoefficientVector::l1_norm() const {
  std::vector<double> a(entries.size());
  std::transform(entries.begin(), entries.end(), a.begin(), [](double x) { return std::abs(x); });
  return stable_sum(a);
}

ComplexMatrix reconstruct(std::span<const double> coefficients, std::span<const ProjectorBasis> dictionary) {
  return adjoint_map(coefficients, dictionary);
}

CoefficientVector decompose_l1(const DensityMatrix& rho, std::span<const ProjectorBasis> dictionary,
                               const SelectionConfig& config) {
  config.validate();
  if (dictionary.empty()) throw std::invalid_argument("decompose_l1: empty dictionary");
  if (dictionary.front().lifted.size() != static_cast<Eigen::Index>(rho.dim())) {
    throw std::invalid_argument("decompose_l1: dictionary dimension does not match state");
  }
  const MeasurementOperator op(dictionary);
  const double lipschitz = 1.01 * op.norm_squared();
  const double lambda_max = op.forward(rho.matrix()).cwiseAbs().maxCoeff();

  CoefficientVector out;
  Eigen::VectorXd s = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dictionary.size()));
  double best_residual = rho.matrix().norm();

  double lambda = lambda_max;
  for (int stage = 1; stage <= config.max_stages; ++stage) {
    lambda *= config.shrink;
    out.stages = stage;
    out.iterations += fista(s, rho.matrix(), op, lambda, lipschitz, config).iterations;
    out.residual = (op.adjoint(s) - rho.matrix()).norm();
    best_residual = std::min(best_residual, out.residual);
    if (out.residual <= config.epsilon) {
      out.entries.assign(s.data(), s.data() + s.size());
      return out;
    }
  }
  throw SelectionError("L1 decomposition did not reach the residual bound", best_residual);
}

std::vector<double> setting_masses(const CoefficientVector& s, std::size_t outcomes) {
  if (outcomes == 0 || s.entries.size() % outcomes != 0) {
    throw std::invalid_argument("coefficient vector is not a whole number of settings");
  }
  std::vector<double> mass(s.entries.size() / outcomes);
  std::vector<double> row(outcomes);
  for (std::size_t mu = 0; mu < mass.size(); ++mu) {
    for (std::size_t v = 0; v < outcomes; ++v) row[v] = std::abs(s.entries[mu * outcomes + v]);
    mass[mu] = stable_sum(row);
  }
  return mass;
}

std::vector<double> setting_weights(const CoefficientVector& s, std::size_t outcomes) {
  auto w = setting_masses(s, outcomes);
  const double total = stable_sum(w);
  if (!(total > 0.0)) throw std::invalid_argument("setting_weights: all coefficients are zero");
  for (double& x : w) x /= total;
  return w;
}

AllocationVector allocate_copies(std::span<const double> weights, long long budget) {
  if (budget < 0) throw std::invalid_argument("allocate_copies: negative budget");
  if (weights.empty()) throw std::invalid_argument("allocate_copies: no weights");
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("allocate_copies: negative or non-finite weight");
  }
  const double total = stable_sum(weights);
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("allocate_copies: weights must sum to 1");

  AllocationVector a;
  a.copies.resize(weights.size());
  std::vector<double> frac(weights.size());
  long long assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double quota = weights[i] / total * static_cast<double>(budget);
    const double fl = std::floor(quota);
    a.copies[i] = static_cast<long long>(fl);
    frac[i] = quota - fl;
    assigned += a.copies[i];
  }
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return frac[i] > frac[j]; });

  long long left = budget - assigned;
  // Rounding can in principle push the floors past the budget; trim from the
  // smallest fractional parts in that case.
  for (auto it = order.rbegin(); left < 0 && it != order.rend(); ++it) {
    if (a.copies[*it] > 0) {
      --a.copies[*it];
      ++left;
    }
  }
  for (std::size_t k = 0; left > 0; k = (k + 1) % order.size()) {
    ++a.copies[order[k]];
    --left;
  }
  return a;
}

void write_selection_csv(std::ostream& os, std::span<const double> masses, std::span<const double> weights,
                         const AllocationVector& allocation) {
  if (masses.size() != weights.size() || weights.size() != allocation.size()) {
    throw std::invalid_argument("write_selection_csv: column lengths differ");
  }
  os << "setting_index,S_mu,w_mu,N_mu\n";
  const auto old = os.precision(17);
  for (std::size_t mu = 0; mu < masses.size(); ++mu) {
    os << mu << ',' << masses[mu] << ',' << weights[mu] << ',' << allocation.copies[mu] << '\n';
  }
  os.precision(old);
}

}  // namespace tomolift
