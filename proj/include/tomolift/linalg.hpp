#pragma once

#include <span>
#include <vector>

#include "tomolift/quantum_core.hpp"

namespace tomolift {

/// Spectral decomposition H = V diag(values) V*.
struct EigenDecomposition {
  Eigen::VectorXd values;  // ascending
  ComplexMatrix vectors;   // columns, unitary
  int sweeps = 0;
};

/// Cyclic Jacobi eigensolver for complex Hermitian matrices.
///
/// The input is symmetrized as (H + H*)/2 first. Sweeps continue until the
/// off-diagonal Frobenius norm drops below 1e-12 * ||H||_F. Eigenvalues are
/// returned ascending; each eigenvector is rotated so that its
/// largest-magnitude component (first one on ties) is real and positive.
/// Throws std::invalid_argument on non-finite or non-square input.
EigenDecomposition hermitian_eig(const ComplexMatrix& h);

/// Euclidean projection onto {w : w >= 0, sum w = 1}, by sorting and
/// thresholding. Throws std::invalid_argument on an empty or non-finite input.
std::vector<double> project_simplex(std::span<const double> v);

/// Nearest (Frobenius) unit-trace PSD matrix to the Hermitian part of `h`,
/// without invariant validation. Used inside solver loops.
ComplexMatrix project_psd_trace_one_raw(const ComplexMatrix& h);

/// Validated form of project_psd_trace_one_raw.
DensityMatrix project_psd_trace_one(const ComplexMatrix& h);

}  // namespace tomolift
