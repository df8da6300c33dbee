#include "tomolift/metrics.hpp"

#include <stdexcept>

#include "tomolift/linalg.hpp"

namespace tomolift {

namespace {

void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("matrix dimensions differ");
}

}  // namespace

double frobenius_squared_error(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_shape(a, b);
  double s = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) s += std::norm(a(i, j) - b(i, j));
  }
  return s;
}

double mse(const ComplexMatrix& a, const ComplexMatrix& b) {
  return frobenius_squared_error(a, b) / static_cast<double>(a.size());
}

double mse(const DensityMatrix& a, const DensityMatrix& b) { return mse(a.matrix(), b.matrix()); }

double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_shape(a, b);
  return 0.5 * hermitian_eig(a - b).values.cwiseAbs().sum();
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  return trace_distance(a.matrix(), b.matrix());
}

}  // namespace tomolift
