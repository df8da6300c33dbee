#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace tomolift {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr int kMaxQubits = 5;

/// Number of qubits in a simulated register, restricted to 1..5 (dim <= 32).
class QubitCount {
 public:
  explicit QubitCount(int n);

  int value() const { return n_; }
  std::size_t dim() const { return std::size_t{1} << n_; }
  std::size_t num_settings() const;

  friend bool operator==(QubitCount, QubitCount) = default;

 private:
  int n_;
};

/// Thrown when a matrix fails the density-matrix invariants.
class InvalidState : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Hermitian, positive semidefinite, unit-trace matrix of dimension 2^n.
///
/// Construction validates the invariants: max|rho - rho*| <= 1e-12,
/// |Tr rho - 1| <= 1e-9 and smallest eigenvalue >= -1e-9.
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix m);

  const ComplexMatrix& matrix() const { return m_; }
  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  QubitCount qubits() const;

  double purity() const;

  static DensityMatrix maximally_mixed(QubitCount n);

 private:
  ComplexMatrix m_;
};

inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kTraceTolerance = 1e-9;
inline constexpr double kEigenvalueFloor = -1e-9;

/// Returns an empty string when `m` satisfies every density-matrix invariant,
/// otherwise a description of the first violated one.
std::string check_density_invariants(const ComplexMatrix& m);

enum class PauliAxis : std::uint8_t { X = 0, Y = 1, Z = 2 };

char axis_letter(PauliAxis a);

/// One choice of Pauli axis per qubit. Settings are enumerated
/// lexicographically over (X, Y, Z) words with qubit 0 as the most
/// significant letter, so index 0 is X...X and index 3^n - 1 is Z...Z.
/// Indices are zero-based.
struct PauliSetting {
  std::vector<PauliAxis> axes;
  std::size_t index = 0;

  std::size_t num_qubits() const { return axes.size(); }
  std::string label() const;

  static PauliSetting from_index(QubitCount n, std::size_t index);
  static PauliSetting from_label(std::string_view word);
};

std::vector<PauliSetting> enumerate_settings(QubitCount n);

/// Rank-one measurement element M = Q Q*, stored only as its lifted vector Q.
///
/// The outcome index is zero-based; bit k of the outcome (qubit 0 is the most
/// significant bit) selects the +1 eigenvector of that qubit's Pauli axis
/// when clear and the -1 eigenvector when set.
struct ProjectorBasis {
  std::size_t setting_index = 0;
  std::size_t outcome = 0;
  ComplexVector lifted;

  /// Tr(rho M) evaluated as Q* rho Q.
  double expectation(const ComplexMatrix& rho) const;
  /// Q Q*; only intended for verification.
  ComplexMatrix materialize() const;
};

ProjectorBasis projector(const PauliSetting& setting, std::size_t outcome);

/// All 3^n * 2^n projectors ordered by (setting, outcome); element
/// k = setting * 2^n + outcome.
std::vector<ProjectorBasis> pauli_dictionary(QubitCount n);

/// Pure state amplitudes of unit Euclidean norm.
class PureStateVector {
 public:
  explicit PureStateVector(ComplexVector amplitudes);
  const ComplexVector& amplitudes() const { return amps_; }
  DensityMatrix density() const;

 private:
  ComplexVector amps_;
};

/// (|0...0> + |1...1>)/sqrt(2).
DensityMatrix make_cat_state(QubitCount n);
/// (|0..01..1> + |1..10..0>)/sqrt(2), the first n/2 qubits (rounded down)
/// forming the leading block. Requires n >= 2.
DensityMatrix make_noon_state(QubitCount n);
/// Equal superposition of the n single-excitation basis states. Requires n >= 2.
DensityMatrix make_w_state(QubitCount n);
/// Ginibre construction A A* / Tr(A A*) with A a 2^n x rank standard complex
/// Gaussian matrix drawn from a seeded mt19937_64.
DensityMatrix random_density_matrix(QubitCount n, int rank, std::uint64_t seed);

/// Born-rule outcome distribution of `setting`, computed from lifted vectors.
/// Entries are clamped to [0, 1].
std::vector<double> born_probabilities(const DensityMatrix& rho, const PauliSetting& setting);

}  // namespace tomolift
