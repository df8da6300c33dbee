#include "tomolift/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tomolift {

namespace {

constexpr double kOffDiagonalThreshold = 1e-12;
constexpr int kMaxSweeps = 100;

double off_diagonal_norm(const ComplexMatrix& a) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (i != j) s += std::norm(a(i, j));
    }
  }
  return std::sqrt(s);
}

// Zeroes a(p, q) with the unitary J = D R, where D = diag(1, conj(e)) removes
// the phase e of a(p, q) and R is the real Jacobi rotation of the resulting
// symmetric 2x2 block. Applies A <- J* A J and V <- V J.
void rotate(ComplexMatrix& a, ComplexMatrix& v, Eigen::Index p, Eigen::Index q) {
  const Complex apq = a(p, q);
  const double g = std::abs(apq);
  if (g == 0.0) return;
  const double app = a(p, p).real();
  const double aqq = a(q, q).real();
  const double tau = (aqq - app) / (2.0 * g);
  const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;
  const Complex e = apq / g;

  const Complex jpp = c;
  const Complex jpq = s;
  const Complex jqp = -s * std::conj(e);
  const Complex jqq = c * std::conj(e);

  const Eigen::Index n = a.rows();
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex akp = a(k, p);
    const Complex akq = a(k, q);
    a(k, p) = akp * jpp + akq * jqp;
    a(k, q) = akp * jpq + akq * jqq;
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex apk = a(p, k);
    const Complex aqk = a(q, k);
    a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
    a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex vkp = v(k, p);
    const Complex vkq = v(k, q);
    v(k, p) = vkp * jpp + vkq * jqp;
    v(k, q) = vkp * jpq + vkq * jqq;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = a(p, p).real();
  a(q, q) = a(q, q).real();
}

}  // namespace

EigenDecomposition hermitian_eig(const ComplexMatrix& h) {
  if (h.rows() != h.cols()) throw std::invalid_argument("hermitian_eig: matrix is not square");
  if (!h.allFinite()) throw std::invalid_argument("hermitian_eig: non-finite entries");

  const Eigen::Index n = h.rows();
  ComplexMatrix a = 0.5 * (h + h.adjoint());
  ComplexMatrix v = ComplexMatrix::Identity(n, n);
  const double scale = a.norm();

  EigenDecomposition out;
  while (off_diagonal_norm(a) > kOffDiagonalThreshold * scale && out.sweeps < kMaxSweeps) {
    ++out.sweeps;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) rotate(a, v, p, q);
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i).real() < a(j, j).real(); });

  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    out.values(k) = a(src, src).real();
    ComplexVector col = v.col(src);
    Eigen::Index big = 0;
    for (Eigen::Index i = 1; i < n; ++i) {
      if (std::abs(col(i)) > std::abs(col(big))) big = i;
    }
    if (std::abs(col(big)) > 0.0) col *= std::conj(col(big)) / std::abs(col(big));
    col(big) = std::abs(col(big));
    out.vectors.col(k) = col;
  }
  return out;
}

std::vector<double> project_simplex(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("project_simplex: empty vector");
  for (double x : v) {
    if (!std::isfinite(x)) throw std::invalid_argument("project_simplex: non-finite entry");
  }
  std::vector<double> u(v.begin(), v.end());
  std::sort(u.begin(), u.end(), std::greater<>());

  double running = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    running += u[j];
    const double candidate = (running - 1.0) / static_cast<double>(j + 1);
    if (u[j] - candidate > 0.0) theta = candidate;
  }

  std::vector<double> w(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) w[i] = std::max(v[i] - theta, 0.0);
  return w;
}

ComplexMatrix project_psd_trace_one_raw(const ComplexMatrix& h) {
  const auto eig = hermitian_eig(h);
  std::vector<double> lambda(eig.values.data(), eig.values.data() + eig.values.size());
  const auto w = project_simplex(lambda);
  Eigen::VectorXd wv = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
  ComplexMatrix out = eig.vectors * wv.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
  return 0.5 * (out + out.adjoint());
}

DensityMatrix project_psd_trace_one(const ComplexMatrix& h) {
  return DensityMatrix(project_psd_trace_one_raw(h));
}

}  // namespace tomolift
