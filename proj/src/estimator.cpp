#include "tomolift/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "tomolift/linalg.hpp"

namespace tomolift {

namespace {

double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

}  // namespace

MeasurementOperator::MeasurementOperator(std::span<const ProjectorBasis> projectors) {
  if (projectors.empty()) throw std::invalid_argument("measurement operator needs at least one projector");
  const Eigen::Index d = projectors.front().lifted.size();
  lifted_.resize(d, static_cast<Eigen::Index>(projectors.size()));
  for (std::size_t k = 0; k < projectors.size(); ++k) {
    if (projectors[k].lifted.size() != d) throw std::invalid_argument("projectors have inconsistent dimensions");
    lifted_.col(static_cast<Eigen::Index>(k)) = projectors[k].lifted;
  }
}

Eigen::VectorXd MeasurementOperator::forward(const ComplexMatrix& rho) const {
  if (rho.rows() != dim() || rho.cols() != dim()) throw std::invalid_argument("state dimension mismatch");
  const ComplexMatrix w = rho * lifted_;
  return lifted_.conjugate().cwiseProduct(w).colwise().sum().real().transpose();
}

ComplexMatrix MeasurementOperator::adjoint(const Eigen::VectorXd& y) const {
  if (y.size() != lifted_.cols()) throw std::invalid_argument("adjoint: size mismatch");
  const ComplexMatrix scaled = lifted_ * y.cast<Complex>().asDiagonal();
  return scaled * lifted_.adjoint();
}

double MeasurementOperator::norm_squared() const {
  const Eigen::Index d = dim();
  ComplexMatrix x(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      x(i, j) = Complex(1.0 + 0.1 * static_cast<double>((i * 7 + j * 3) % 5), 0.05 * static_cast<double>(i - j));
    }
  }
  x = 0.5 * (x + x.adjoint());
  double lambda = 0.0;
  for (int it = 0; it < 200; ++it) {
    x /= x.norm();
    ComplexMatrix z = adjoint(forward(x));
    const double next = std::real((x.adjoint() * z).trace());
    x = std::move(z);
    if (it > 10 && std::abs(next - lambda) <= 1e-12 * next) return next;
    lambda = next;
  }
  return lambda;
}

void SolverConfig::validate() const {
  if (max_iterations <= 0) throw std::invalid_argument("solver max_iterations must be positive");
  if (!(convergence_tolerance > 0.0)) throw std::invalid_argument("solver tolerance must be positive");
  if (!(step_size > 0.0) || step_size > 1.0) throw std::invalid_argument("solver step_size must be in (0, 1]");
  if (!(penalty_parameter > 0.0)) throw std::invalid_argument("solver penalty must be positive");
}

EstimationProblem EstimationProblem::from_table(QubitCount n, const FrequencyTable& f) {
  if (f.outcomes != n.dim() || f.values.size() != n.num_settings() * n.dim()) {
    throw std::invalid_argument("frequency table shape does not match qubit count");
  }
  return EstimationProblem{pauli_dictionary(n), f.values, {}};
}

std::vector<double> forward_map(const ComplexMatrix& rho, std::span<const ProjectorBasis> projectors) {
  std::vector<double> y(projectors.size());
  for (std::size_t k = 0; k < projectors.size(); ++k) {
    if (projectors[k].lifted.size() != rho.rows()) throw std::invalid_argument("projector dimension mismatch");
    y[k] = projectors[k].expectation(rho);
  }
  return y;
}

ComplexMatrix adjoint_map(std::span<const double> y, std::span<const ProjectorBasis> projectors) {
  if (y.size() != projectors.size()) throw std::invalid_argument("adjoint_map: size mismatch");
  if (projectors.empty()) throw std::invalid_argument("adjoint_map: no projectors");
  const auto d = projectors.front().lifted.size();
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  for (std::size_t k = 0; k < projectors.size(); ++k) {
    if (y[k] != 0.0) out.noalias() += y[k] * (projectors[k].lifted * projectors[k].lifted.adjoint());
  }
  return out;
}

double l1_objective(const ComplexMatrix& rho, const EstimationProblem& problem) {
  const auto y = forward_map(rho, problem.projectors);
  double s = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    const double w = problem.weights.empty() ? 1.0 : problem.weights[k];
    s += w * std::abs(y[k] - problem.frequencies[k]);
  }
  return s;
}

Estimate estimate_density_matrix(const EstimationProblem& problem, const SolverConfig& config) {
  config.validate();
  const std::size_t m = problem.projectors.size();
  if (m == 0) throw std::invalid_argument("estimation problem has no measurement terms");
  if (problem.frequencies.size() != m) throw std::invalid_argument("frequencies not aligned with projectors");
  if (!problem.weights.empty() && problem.weights.size() != m) {
    throw std::invalid_argument("weights not aligned with projectors");
  }
  const MeasurementOperator op(problem.projectors);
  const Eigen::Index d = op.dim();
  const auto mi = static_cast<Eigen::Index>(m);

  const Eigen::Map<const Eigen::VectorXd> f(problem.frequencies.data(), mi);
  if (!f.allFinite()) throw std::invalid_argument("non-finite frequency");
  Eigen::VectorXd w = Eigen::VectorXd::Ones(mi);
  if (!problem.weights.empty()) {
    w = Eigen::Map<const Eigen::VectorXd>(problem.weights.data(), mi);
    if (!w.allFinite() || w.minCoeff() < 0.0) throw std::invalid_argument("weights must be nonnegative");
  }

  const double beta = config.penalty_parameter;
  const double step = config.step_size / (1.02 * op.norm_squared());

  ComplexMatrix rho = ComplexMatrix::Identity(d, d) / static_cast<double>(d);
  Eigen::VectorXd r = Eigen::VectorXd::Zero(mi);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(mi);

  Eigen::VectorXd a_rho = op.forward(rho);
  auto objective_of = [&](const Eigen::VectorXd& a) { return w.dot((a - f).cwiseAbs()); };

  ComplexMatrix best = rho;
  double best_obj = objective_of(a_rho);
  double prev_obj = best_obj;

  SolverDiagnostics diag;
  for (int it = 1; it <= config.max_iterations; ++it) {
    rho = project_psd_trace_one_raw(rho - step * op.adjoint(a_rho - f - r + u));
    a_rho = op.forward(rho);

    const Eigen::VectorXd v = a_rho - f;
    for (Eigen::Index k = 0; k < mi; ++k) r(k) = soft_threshold(v(k) + u(k), w(k) / beta);
    const Eigen::VectorXd primal = v - r;
    u += primal;
    const double gap = primal.cwiseAbs().maxCoeff();

    const double obj = objective_of(a_rho);
    if (obj < best_obj) {
      best_obj = obj;
      best = rho;
    }
    if (config.record_trace) diag.trace.push_back({it, obj, best_obj, gap});
    diag.iterations = it;
    if (std::abs(obj - prev_obj) < config.convergence_tolerance && gap < config.convergence_tolerance) {
      diag.converged = true;
      break;
    }
    prev_obj = obj;
  }
  diag.final_objective = best_obj;
  return Estimate{DensityMatrix(std::move(best)), std::move(diag)};
}

void write_diagnostics_csv(std::ostream& os, const SolverDiagnostics& diagnostics) {
  os << "iteration,objective,feasibility_gap\n";
  const auto old = os.precision(17);
  for (const auto& row : diagnostics.trace) {
    os << row.iteration << ',' << row.objective << ',' << row.feasibility_gap << '\n';
  }
  os.precision(old);
}

}  // namespace tomolift
