#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "tomolift/measurement.hpp"
#include "tomolift/quantum_core.hpp"

namespace tomolift {

struct SolverConfig {
  int max_iterations = 5000;
  double convergence_tolerance = 1e-10;
  /// Fraction of the largest stable step 1 / (penalty * ||A||^2).
  double step_size = 0.99;
  double penalty_parameter = 1.0;
  bool record_trace = false;

  void validate() const;
};

/// min sum_k w_k |Tr(rho M_k) - f_k|  subject to rho >= 0, Tr rho = 1.
struct EstimationProblem {
  std::vector<ProjectorBasis> projectors;
  std::vector<double> frequencies;
  std::vector<double> weights;  // empty means uniform

  /// Full Pauli dictionary paired with a frequency table.
  static EstimationProblem from_table(QubitCount n, const FrequencyTable& f);
};

struct SolverTraceRow {
  int iteration = 0;
  double objective = 0.0;
  double best_objective = 0.0;
  double feasibility_gap = 0.0;
};

struct SolverDiagnostics {
  int iterations = 0;
  double final_objective = 0.0;  // objective of the returned (best) iterate
  bool converged = false;
  std::vector<SolverTraceRow> trace;  // filled when record_trace is set
};

struct Estimate {
  DensityMatrix rho;
  SolverDiagnostics diagnostics;
};

/// The linear map A(rho) = (Q_k* rho Q_k)_k with the lifted vectors stacked
/// as the columns of one 2^n x m matrix, so both directions are single
/// matrix products.
class MeasurementOperator {
 public:
  explicit MeasurementOperator(std::span<const ProjectorBasis> projectors);

  Eigen::Index dim() const { return lifted_.rows(); }
  std::size_t size() const { return static_cast<std::size_t>(lifted_.cols()); }

  Eigen::VectorXd forward(const ComplexMatrix& rho) const;
  ComplexMatrix adjoint(const Eigen::VectorXd& y) const;
  /// Largest eigenvalue of A*A (3^n for the full Pauli dictionary), by power
  /// iteration.
  double norm_squared() const;

 private:
  ComplexMatrix lifted_;
};

/// Vector of Q* rho Q values, one per projector.
std::vector<double> forward_map(const ComplexMatrix& rho, std::span<const ProjectorBasis> projectors);
/// sum_k y_k Q_k Q_k*.
ComplexMatrix adjoint_map(std::span<const double> y, std::span<const ProjectorBasis> projectors);

/// Weighted L1 data misfit of `rho`.
double l1_objective(const ComplexMatrix& rho, const EstimationProblem& problem);

/// Solves the constrained L1 fit by linearized ADMM: the data misfit is split
/// off as a residual variable r = A(rho) - f, updated by soft-thresholding,
/// while rho takes a gradient step on the augmented term followed by the
/// projection onto unit-trace PSD matrices. Stops when the objective changes
/// by less than the tolerance and the split residual is below the same
/// tolerance, or at max_iterations; returns the best iterate seen.
Estimate estimate_density_matrix(const EstimationProblem& problem, const SolverConfig& config = {});

/// CSV "iteration,objective,feasibility_gap".
void write_diagnostics_csv(std::ostream& os, const SolverDiagnostics& diagnostics);

}  // namespace tomolift
