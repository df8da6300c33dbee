#pragma once

#include "tomolift/quantum_core.hpp"

namespace tomolift {

/// Per-entry mean squared error ||a - b||_F^2 / 4^n.
double mse(const ComplexMatrix& a, const ComplexMatrix& b);
double mse(const DensityMatrix& a, const DensityMatrix& b);

/// Unnormalized ||a - b||_F^2.
double frobenius_squared_error(const ComplexMatrix& a, const ComplexMatrix& b);

/// 1/2 sum |eigenvalues(a - b)|.
double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b);
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

}  // namespace tomolift
