#pragma once

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "tomolift/measurement.hpp"
#include "tomolift/quantum_core.hpp"

namespace tomolift {

struct SelectionConfig {
  /// Frobenius bound on the reconstruction residual.
  double epsilon = 1e-5;
  /// Penalty continuation: lambda starts at shrink * ||B*(rho)||_inf and is
  /// multiplied by `shrink` each stage.
  double shrink = 0.5;
  int max_stages = 40;
  int max_iterations = 5000;  // per stage
  double inner_tolerance = 1e-13;

  void validate() const;
};

/// Residual bound not reached within the penalty schedule.
class SelectionError : public std::runtime_error {
 public:
  SelectionError(const std::string& what, double best_residual)
      : std::runtime_error(what), best_residual_(best_residual) {}
  double best_residual() const { return best_residual_; }

 private:
  double best_residual_;
};

/// Coefficients S_k of the dictionary elements, index-aligned with the
/// dictionary passed to decompose_l1.
struct CoefficientVector {
  std::vector<double> entries;
  double residual = 0.0;  // ||sum_k S_k M_k - rho||_F
  int stages = 0;
  int iterations = 0;

  double l1_norm() const;
};

/// Sparse decomposition rho ~ sum_k S_k M_k with minimal ||S||_1 subject to
/// ||sum_k S_k M_k - rho||_F <= epsilon. Solved as a sequence of penalized
/// problems lambda ||S||_1 + 1/2 ||sum_k S_k M_k - rho||_F^2 with FISTA
/// (adaptive restart), warm-started along a decreasing lambda schedule until
/// the residual bound holds.
CoefficientVector decompose_l1(const DensityMatrix& rho, std::span<const ProjectorBasis> dictionary,
                               const SelectionConfig& config = {});

/// sum_k S_k M_k.
ComplexMatrix reconstruct(std::span<const double> coefficients, std::span<const ProjectorBasis> dictionary);

/// Per-setting absolute coefficient mass sum_nu |S_{mu,nu}|, for a dictionary
/// laid out as (setting, outcome) with `outcomes` entries per setting.
std::vector<double> setting_masses(const CoefficientVector& s, std::size_t outcomes);

/// setting_masses normalized to a probability vector. Throws
/// std::invalid_argument when every coefficient is zero.
std::vector<double> setting_weights(const CoefficientVector& s, std::size_t outcomes);

/// Largest-remainder apportionment of `budget` copies proportional to
/// `weights`. Ties in the fractional part go to the lower index.
AllocationVector allocate_copies(std::span<const double> weights, long long budget);

/// CSV "setting_index,S_mu,w_mu,N_mu" where S_mu is the absolute mass.
void write_selection_csv(std::ostream& os, std::span<const double> masses, std::span<const double> weights,
                         const AllocationVector& allocation);

}  // namespace tomolift
