#pragma once

#include <complex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "roofbound/error.hpp"
#include "roofbound/rng.hpp"

namespace roofbound {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

namespace tol {
/// An eigenvalue counts toward the numerical rank iff it exceeds rank * lambda_max.
inline constexpr double kRankRelative = 1e-10;
/// Eigenvalues in (-kPsdClip, 0) are clipped; anything below is a hard error.
inline constexpr double kPsdClip = 1e-10;
inline constexpr double kHermitian = 1e-12;
inline constexpr double kTrace = 1e-12;
inline constexpr double kNorm = 1e-12;
/// A pure state with measure below this is treated as zero-E.
inline constexpr double kZeroResidual = 1e-9;
}  // namespace tol

/// Normalized amplitude vector on n qubits. Qubit 0 is the most significant
/// bit of the computational-basis index.
class PureState {
 public:
  /// Normalizes `amplitudes`; throws if the length is not a power of two or the norm vanishes.
  static PureState normalized(CVector amplitudes);
  /// Accepts `amplitudes` as-is; throws unless the norm is 1 within tol::kNorm.
  static PureState from_normalized(CVector amplitudes);
  static PureState basis(int n_qubits, int index);

  const CVector& amplitudes() const { return amplitudes_; }
  std::span<const Complex> span() const { return {amplitudes_.data(), static_cast<std::size_t>(amplitudes_.size())}; }
  int n_qubits() const { return n_qubits_; }
  int dim() const { return static_cast<int>(amplitudes_.size()); }
  CMatrix projector() const { return amplitudes_ * amplitudes_.adjoint(); }

  /// |<this|other>|^2
  double overlap2(const PureState& other) const;

 private:
  PureState(CVector amplitudes, int n_qubits) : amplitudes_(std::move(amplitudes)), n_qubits_(n_qubits) {}

  CVector amplitudes_;
  int n_qubits_ = 0;
};

struct SpectralPair {
  double eigenvalue;
  PureState eigenvector;
};

/// Hermitian, PSD, unit-trace matrix with its spectrum computed at construction.
class DensityMatrix {
 public:
  /// Strict constructor: throws kInvalidState naming every violated invariant.
  static DensityMatrix from_matrix(const CMatrix& matrix);
  /// For matrices produced by arithmetic on valid states: hermitizes, clips
  /// eigenvalues in (-1e-10, 0), renormalizes the trace. Throws if an
  /// eigenvalue is below -1e-10 or the trace is not positive.
  static DensityMatrix repaired(const CMatrix& matrix);
  /// Builds sum_i w_i v_i v_i^dagger from a spectrum, zeroing eigenvalues at or
  /// below rank tolerance and renormalizing.
  static DensityMatrix from_spectrum(const RVector& eigenvalues, const CMatrix& eigenvectors);
  static DensityMatrix pure(const PureState& psi);
  static DensityMatrix maximally_mixed(int n_qubits);

  /// Lists the violated invariants of `matrix` as a candidate density matrix (empty if valid).
  static std::vector<std::string> violations(const CMatrix& matrix);

  const CMatrix& matrix() const { return matrix_; }
  int n_qubits() const { return n_qubits_; }
  int dim() const { return static_cast<int>(matrix_.rows()); }
  int rank() const { return rank_; }
  bool is_pure() const { return rank_ == 1; }

  /// Eigenvalues in descending order.
  const RVector& eigenvalues() const { return eigenvalues_; }
  /// Columns are the eigenvectors matching eigenvalues().
  const CMatrix& eigenvectors() const { return eigenvectors_; }
  /// Orthonormal basis of the range (first rank() eigenvectors), N x rank.
  CMatrix range_basis() const { return eigenvectors_.leftCols(rank_); }
  /// Smallest eigenvalue counted in the rank.
  double lambda_min() const { return eigenvalues_(rank_ - 1); }

 private:
  DensityMatrix(CMatrix matrix, RVector eigenvalues, CMatrix eigenvectors, int n_qubits);
  static DensityMatrix build(const CMatrix& hermitian, bool strict);

  CMatrix matrix_;
  RVector eigenvalues_;
  CMatrix eigenvectors_;
  int n_qubits_ = 0;
  int rank_ = 0;
};

struct EnsembleMember {
  double weight;
  PureState state;
};

/// Pure-state decomposition {p_i, psi_i}.
class Ensemble {
 public:
  Ensemble() = default;
  /// Throws if a weight is outside (0, 1], the weights do not sum to 1 within 1e-10,
  /// or the members live on different Hilbert spaces.
  explicit Ensemble(std::vector<EnsembleMember> members);

  const std::vector<EnsembleMember>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  CMatrix reconstruct() const;
  double weight_sum() const;

 private:
  std::vector<EnsembleMember> members_;
};

/// Tensor product of single-qubit unitaries.
class LocalUnitary {
 public:
  /// Throws unless every factor is unitary within 1e-12.
  explicit LocalUnitary(std::vector<Eigen::Matrix2cd> factors);
  static LocalUnitary identity(int n_qubits);

  const std::vector<Eigen::Matrix2cd>& factors() const { return factors_; }
  int n_qubits() const { return static_cast<int>(factors_.size()); }
  /// The full 2^n x 2^n matrix U_0 (x) U_1 (x) ... (x) U_{n-1}.
  CMatrix full() const;
  PureState apply(const PureState& psi) const;

 private:
  std::vector<Eigen::Matrix2cd> factors_;
};

/// Eigenvalues (ascending) of a Hermitian matrix.
RVector hermitian_eigenvalues(const CMatrix& hermitian);
double max_abs(const CMatrix& m);
int qubits_for_dim(Eigen::Index dim);

/// D(a, b) = 1/2 sum |eig(a - b)|.
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);
double trace_distance(const CMatrix& a, const CMatrix& b);

/// Eigenpairs in descending eigenvalue order (eigenvectors of zero eigenvalues included).
std::vector<SpectralPair> spectral(const DensityMatrix& rho);

CVector random_complex_gaussian(Eigen::Index n, Rng& rng);
PureState random_pure(int n_qubits, Rng& rng);
/// Uniform on the probability simplex (normalized exponential spacings).
std::vector<double> random_simplex(int d, Rng& rng);
DensityMatrix random_density(int rank, int n_qubits, Rng& rng);
/// Haar unitary on C^n: Ginibre matrix, QR, phases of R's diagonal moved into Q.
CMatrix random_haar_unitary(int n, Rng& rng);
/// Haar m x d isometry (m >= d) with orthonormal columns.
CMatrix random_isometry(int m, int d, Rng& rng);
/// n independent Haar SU(2) factors.
LocalUnitary random_local_su2(int n_qubits, Rng& rng);

DensityMatrix conjugate(const DensityMatrix& rho, const LocalUnitary& u);

/// Q factor of a QR decomposition with the diagonal of R made real positive.
CMatrix orthonormalize_columns(const CMatrix& m);

}  // namespace roofbound
