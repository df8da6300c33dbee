#include "tomolift/quantum_core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <sstream>

#include "tomolift/linalg.hpp"

namespace tomolift {

namespace {

std::size_t pow3(int n) {
  std::size_t r = 1;
  for (int i = 0; i < n; ++i) r *= 3;
  return r;
}

int log2_dim(std::size_t dim) {
  int n = 0;
  while ((std::size_t{1} << n) < dim) ++n;
  if ((std::size_t{1} << n) != dim) return -1;
  return n;
}

// Single-qubit eigenvector of the given axis; bit 0 -> eigenvalue +1.
std::array<Complex, 2> axis_eigenvector(PauliAxis axis, int bit) {
  const double h = 1.0 / std::sqrt(2.0);
  switch (axis) {
    case PauliAxis::X:
      return bit == 0 ? std::array<Complex, 2>{h, h} : std::array<Complex, 2>{h, -h};
    case PauliAxis::Y:
      return bit == 0 ? std::array<Complex, 2>{h, Complex(0, h)}
                      : std::array<Complex, 2>{h, Complex(0, -h)};
    case PauliAxis::Z:
      return bit == 0 ? std::array<Complex, 2>{1.0, 0.0} : std::array<Complex, 2>{0.0, 1.0};
  }
  throw std::logic_error("unreachable Pauli axis");
}

DensityMatrix pure_from_basis_superposition(QubitCount n, const std::vector<std::size_t>& indices) {
  ComplexVector psi = ComplexVector::Zero(static_cast<Eigen::Index>(n.dim()));
  const double a = 1.0 / std::sqrt(static_cast<double>(indices.size()));
  for (auto i : indices) psi(static_cast<Eigen::Index>(i)) = a;
  return PureStateVector(std::move(psi)).density();
}

}  // namespace

QubitCount::QubitCount(int n) : n_(n) {
  if (n < 1 || n > kMaxQubits) {
    throw std::invalid_argument("qubit count " + std::to_string(n) + " outside supported range 1.." +
                                std::to_string(kMaxQubits));
  }
}

std::size_t QubitCount::num_settings() const { return pow3(n_); }

std::string check_density_invariants(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) return "matrix is not square";
  const int n = log2_dim(static_cast<std::size_t>(m.rows()));
  if (n < 1 || n > kMaxQubits) return "dimension is not 2^n for 1 <= n <= 5";
  if (!m.allFinite()) return "matrix has non-finite entries";
  const double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kHermitianTolerance) {
    std::ostringstream os;
    os << "matrix is not Hermitian (max deviation " << herm << ")";
    return os.str();
  }
  const Complex tr = m.trace();
  if (std::abs(tr - Complex(1.0, 0.0)) > kTraceTolerance) {
    std::ostringstream os;
    os << "trace " << tr.real() << " differs from 1";
    return os.str();
  }
  const auto eig = hermitian_eig(m);
  if (eig.values(0) < kEigenvalueFloor) {
    std::ostringstream os;
    os << "smallest eigenvalue " << eig.values(0) << " is negative";
    return os.str();
  }
  return {};
}

DensityMatrix::DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {
  if (auto why = check_density_invariants(m_); !why.empty()) throw InvalidState(why);
}

QubitCount DensityMatrix::qubits() const { return QubitCount(log2_dim(dim())); }

double DensityMatrix::purity() const { return (m_ * m_).trace().real(); }

DensityMatrix DensityMatrix::maximally_mixed(QubitCount n) {
  const auto d = static_cast<Eigen::Index>(n.dim());
  return DensityMatrix(ComplexMatrix::Identity(d, d) / static_cast<double>(d));
}

char axis_letter(PauliAxis a) { return "XYZ"[static_cast<int>(a)]; }

std::string PauliSetting::label() const {
  std::string s;
  for (auto a : axes) s.push_back(axis_letter(a));
  return s;
}

PauliSetting PauliSetting::from_index(QubitCount n, std::size_t index) {
  if (index >= n.num_settings()) throw std::out_of_range("setting index out of range");
  PauliSetting s;
  s.index = index;
  s.axes.resize(static_cast<std::size_t>(n.value()));
  for (int k = n.value() - 1; k >= 0; --k) {
    s.axes[static_cast<std::size_t>(k)] = static_cast<PauliAxis>(index % 3);
    index /= 3;
  }
  return s;
}

PauliSetting PauliSetting::from_label(std::string_view word) {
  const QubitCount n(static_cast<int>(word.size()));
  std::size_t index = 0;
  for (char c : word) {
    const auto pos = std::string_view("XYZ").find(c);
    if (pos == std::string_view::npos) throw std::invalid_argument("bad Pauli letter in setting label");
    index = index * 3 + pos;
  }
  return from_index(n, index);
}

std::vector<PauliSetting> enumerate_settings(QubitCount n) {
  std::vector<PauliSetting> out;
  out.reserve(n.num_settings());
  for (std::size_t i = 0; i < n.num_settings(); ++i) out.push_back(PauliSetting::from_index(n, i));
  return out;
}

double ProjectorBasis::expectation(const ComplexMatrix& rho) const {
  return lifted.dot(rho * lifted).real();
}

ComplexMatrix ProjectorBasis::materialize() const { return lifted * lifted.adjoint(); }

ProjectorBasis projector(const PauliSetting& setting, std::size_t outcome) {
  const int n = static_cast<int>(setting.num_qubits());
  const std::size_t dim = std::size_t{1} << n;
  if (outcome >= dim) throw std::out_of_range("outcome index out of range");

  ComplexVector q(1);
  q(0) = 1.0;
  for (int k = 0; k < n; ++k) {
    const int bit = static_cast<int>((outcome >> (n - 1 - k)) & 1u);
    const auto e = axis_eigenvector(setting.axes[static_cast<std::size_t>(k)], bit);
    ComplexVector next(q.size() * 2);
    for (Eigen::Index i = 0; i < q.size(); ++i) {
      next(2 * i) = q(i) * e[0];
      next(2 * i + 1) = q(i) * e[1];
    }
    q = std::move(next);
  }
  return ProjectorBasis{setting.index, outcome, std::move(q)};
}

std::vector<ProjectorBasis> pauli_dictionary(QubitCount n) {
  std::vector<ProjectorBasis> out;
  out.reserve(n.num_settings() * n.dim());
  for (const auto& s : enumerate_settings(n)) {
    for (std::size_t v = 0; v < n.dim(); ++v) out.push_back(projector(s, v));
  }
  return out;
}

PureStateVector::PureStateVector(ComplexVector amplitudes) : amps_(std::move(amplitudes)) {
  if (std::abs(amps_.norm() - 1.0) > 1e-12) throw InvalidState("state vector does not have unit norm");
}

DensityMatrix PureStateVector::density() const {
  ComplexMatrix m = amps_ * amps_.adjoint();
  // Exact Hermitian symmetry regardless of rounding in the outer product.
  m = (0.5 * (m + m.adjoint())).eval();
  return DensityMatrix(std::move(m));
}

DensityMatrix make_cat_state(QubitCount n) {
  return pure_from_basis_superposition(n, {0, n.dim() - 1});
}

DensityMatrix make_noon_state(QubitCount n) {
  if (n.value() < 2) throw std::invalid_argument("NOON state needs at least 2 qubits");
  const int lead = n.value() / 2;
  const int tail = n.value() - lead;
  const std::size_t low = (std::size_t{1} << tail) - 1;  // 0..0 1..1
  const std::size_t high = (n.dim() - 1) ^ low;           // 1..1 0..0
  return pure_from_basis_superposition(n, {low, high});
}

DensityMatrix make_w_state(QubitCount n) {
  if (n.value() < 2) throw std::invalid_argument("W state needs at least 2 qubits");
  std::vector<std::size_t> idx;
  for (int k = n.value() - 1; k >= 0; --k) idx.push_back(std::size_t{1} << k);
  return pure_from_basis_superposition(n, idx);
}

DensityMatrix random_density_matrix(QubitCount n, int rank, std::uint64_t seed) {
  const auto d = static_cast<Eigen::Index>(n.dim());
  if (rank < 1 || rank > d) {
    throw std::invalid_argument("rank " + std::to_string(rank) + " outside 1.." + std::to_string(d));
  }
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix a(d, rank);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < rank; ++j) {
      const double re = normal(gen);
      const double im = normal(gen);
      a(i, j) = Complex(re, im);
    }
  }
  ComplexMatrix m = a * a.adjoint();
  m = (0.5 * (m + m.adjoint())).eval();
  m /= m.trace().real();
  return DensityMatrix(std::move(m));
}

std::vector<double> born_probabilities(const DensityMatrix& rho, const PauliSetting& setting) {
  if (setting.num_qubits() != static_cast<std::size_t>(rho.qubits().value())) {
    throw std::invalid_argument("setting and state qubit counts differ");
  }
  std::vector<double> p(rho.dim());
  for (std::size_t v = 0; v < p.size(); ++v) {
    p[v] = std::clamp(projector(setting, v).expectation(rho.matrix()), 0.0, 1.0);
  }
  return p;
}

}  // namespace tomolift
