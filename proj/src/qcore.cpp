#include "roofbound/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace roofbound {

int qubits_for_dim(Eigen::Index dim) {
  if (dim < 2 || (dim & (dim - 1)) != 0) {
    throw Error(ErrorCode::kInvalidArgument, "dimension " + std::to_string(dim) + " is not a power of two >= 2");
  }
  int n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  return n;
}

double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

RVector hermitian_eigenvalues(const CMatrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

// ---------------------------------------------------------------------------
// PureState

PureState PureState::normalized(CVector amplitudes) {
  const int n = qubits_for_dim(amplitudes.size());
  const double norm = amplitudes.norm();
  if (!(norm > 1e-300) || !std::isfinite(norm)) {
    throw Error(ErrorCode::kInvalidState, "cannot normalize a zero or non-finite amplitude vector");
  }
  amplitudes /= norm;
  return PureState(std::move(amplitudes), n);
}

PureState PureState::from_normalized(CVector amplitudes) {
  const int n = qubits_for_dim(amplitudes.size());
  const double norm2 = amplitudes.squaredNorm();
  if (std::abs(norm2 - 1.0) > tol::kNorm) {
    std::ostringstream msg;
    msg << "sum |a_k|^2 = " << norm2 << " is not 1";
    throw Error(ErrorCode::kInvalidState, msg.str());
  }
  return PureState(std::move(amplitudes), n);
}

PureState PureState::basis(int n_qubits, int index) {
  CVector a = CVector::Zero(Eigen::Index{1} << n_qubits);
  if (index < 0 || index >= a.size()) throw Error(ErrorCode::kInvalidArgument, "basis index out of range");
  a(index) = 1.0;
  return PureState(std::move(a), n_qubits);
}

double PureState::overlap2(const PureState& other) const {
  if (other.dim() != dim()) throw Error(ErrorCode::kDimensionMismatch, "overlap of states on different spaces");
  return std::norm(amplitudes_.dot(other.amplitudes_));
}

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(CMatrix matrix, RVector eigenvalues, CMatrix eigenvectors, int n_qubits)
    : matrix_(std::move(matrix)),
      eigenvalues_(std::move(eigenvalues)),
      eigenvectors_(std::move(eigenvectors)),
      n_qubits_(n_qubits) {
  const double top = eigenvalues_(0);
  rank_ = 0;
  for (Eigen::Index i = 0; i < eigenvalues_.size(); ++i) {
    if (eigenvalues_(i) > tol::kRankRelative * top) ++rank_;
  }
}

std::vector<std::string> DensityMatrix::violations(const CMatrix& m) {
  std::vector<std::string> out;
  if (m.rows() != m.cols()) {
    out.emplace_back("matrix is not square");
    return out;
  }
  if (m.rows() < 2 || (m.rows() & (m.rows() - 1)) != 0) {
    out.emplace_back("dimension is not a power of two >= 2");
    return out;
  }
  if (!m.allFinite()) {
    out.emplace_back("matrix has non-finite entries");
    return out;
  }
  const double herm = max_abs(m - m.adjoint());
  if (herm >= tol::kHermitian) {
    std::ostringstream s;
    s << "not Hermitian: max|M - M^dagger| = " << herm;
    out.push_back(s.str());
  }
  const Complex tr = m.trace();
  if (std::abs(tr - Complex(1.0)) > tol::kTrace) {
    std::ostringstream s;
    s << "trace is " << tr.real() << (tr.imag() != 0.0 ? " (imaginary part " + std::to_string(tr.imag()) + ")" : "")
      << ", expected 1";
    out.push_back(s.str());
  }
  const CMatrix h = 0.5 * (m + m.adjoint());
  const double min_eig = hermitian_eigenvalues(h).minCoeff();
  if (min_eig <= -tol::kPsdClip) {
    std::ostringstream s;
    s << "not positive semidefinite: minimum eigenvalue " << min_eig;
    out.push_back(s.str());
  }
  return out;
}

DensityMatrix DensityMatrix::build(const CMatrix& input, bool strict) {
  if (strict) {
    const auto v = violations(input);
    if (!v.empty()) {
      std::string msg;
      for (const auto& s : v) msg += (msg.empty() ? "" : "; ") + s;
      throw Error(ErrorCode::kInvalidState, msg);
    }
  }
  if (input.rows() != input.cols()) throw Error(ErrorCode::kInvalidState, "matrix is not square");
  const int n = qubits_for_dim(input.rows());
  CMatrix h = 0.5 * (input + input.adjoint());
  const double tr = h.trace().real();
  if (!(tr > 0.0) || !std::isfinite(tr)) throw Error(ErrorCode::kInvalidState, "trace is not positive");
  h /= tr;

  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h);
  const Eigen::Index dim = h.rows();
  RVector vals = solver.eigenvalues().reverse();
  CMatrix vecs = solver.eigenvectors().rowwise().reverse();
  if (vals(dim - 1) <= -tol::kPsdClip) {
    std::ostringstream s;
    s << "not positive semidefinite: minimum eigenvalue " << vals(dim - 1);
    throw Error(ErrorCode::kInvalidState, s.str());
  }
  if (vals(dim - 1) < 0.0) {
    vals = vals.cwiseMax(0.0);
    vals /= vals.sum();
    h = vecs * vals.asDiagonal() * vecs.adjoint();
  }
  return DensityMatrix(std::move(h), std::move(vals), std::move(vecs), n);
}

DensityMatrix DensityMatrix::from_matrix(const CMatrix& matrix) { return build(matrix, true); }

DensityMatrix DensityMatrix::repaired(const CMatrix& matrix) { return build(matrix, false); }

DensityMatrix DensityMatrix::from_spectrum(const RVector& eigenvalues, const CMatrix& eigenvectors) {
  if (eigenvectors.rows() != eigenvectors.cols() || eigenvalues.size() != eigenvectors.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "from_spectrum needs a full eigenbasis");
  }
  const int n = qubits_for_dim(eigenvalues.size());
  std::vector<Eigen::Index> order(static_cast<std::size_t>(eigenvalues.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return eigenvalues(a) > eigenvalues(b); });
  RVector vals(eigenvalues.size());
  CMatrix vecs(eigenvectors.rows(), eigenvectors.cols());
  for (std::size_t i = 0; i < order.size(); ++i) {
    vals(static_cast<Eigen::Index>(i)) = eigenvalues(order[i]);
    vecs.col(static_cast<Eigen::Index>(i)) = eigenvectors.col(order[i]);
  }
  if (vals(vals.size() - 1) <= -tol::kPsdClip) {
    std::ostringstream s;
    s << "not positive semidefinite: minimum eigenvalue " << vals(vals.size() - 1);
    throw Error(ErrorCode::kInvalidState, s.str());
  }
  const double top = vals(0);
  if (!(top > 0.0)) throw Error(ErrorCode::kInvalidState, "spectrum has no positive eigenvalue");
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    if (vals(i) <= tol::kRankRelative * top) vals(i) = 0.0;
  }
  vals /= vals.sum();
  CMatrix m = vecs * vals.asDiagonal() * vecs.adjoint();
  m = 0.5 * (m + m.adjoint()).eval();
  return DensityMatrix(std::move(m), std::move(vals), std::move(vecs), n);
}

DensityMatrix DensityMatrix::pure(const PureState& psi) {
  const Eigen::Index dim = psi.dim();
  // Complete psi to an orthonormal basis: Householder QR of [psi | I].
  CMatrix seed(dim, dim + 1);
  seed.col(0) = psi.amplitudes();
  seed.rightCols(dim) = CMatrix::Identity(dim, dim);
  Eigen::HouseholderQR<CMatrix> qr(seed);
  CMatrix q = qr.householderQ() * CMatrix::Identity(dim, dim);
  q.col(0) = psi.amplitudes();
  RVector vals = RVector::Zero(dim);
  vals(0) = 1.0;
  return DensityMatrix(psi.projector(), std::move(vals), std::move(q), psi.n_qubits());
}

DensityMatrix DensityMatrix::maximally_mixed(int n_qubits) {
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  return DensityMatrix(CMatrix::Identity(dim, dim) / static_cast<double>(dim),
                       RVector::Constant(dim, 1.0 / static_cast<double>(dim)), CMatrix::Identity(dim, dim), n_qubits);
}

// ---------------------------------------------------------------------------
// Ensemble

Ensemble::Ensemble(std::vector<EnsembleMember> members) : members_(std::move(members)) {
  if (members_.empty()) return;
  const int dim = members_.front().state.dim();
  double total = 0.0;
  for (const auto& m : members_) {
    if (!(m.weight > 0.0) || m.weight > 1.0 + 1e-12) {
      throw Error(ErrorCode::kInvalidArgument, "ensemble weight " + std::to_string(m.weight) + " outside (0, 1]");
    }
    if (m.state.dim() != dim) throw Error(ErrorCode::kDimensionMismatch, "ensemble members on different spaces");
    total += m.weight;
  }
  if (std::abs(total - 1.0) > 1e-10) {
    throw Error(ErrorCode::kInvalidArgument, "ensemble weights sum to " + std::to_string(total));
  }
}

CMatrix Ensemble::reconstruct() const {
  if (members_.empty()) throw Error(ErrorCode::kInvalidArgument, "empty ensemble");
  const auto dim = members_.front().state.dim();
  CMatrix out = CMatrix::Zero(dim, dim);
  for (const auto& m : members_) out.noalias() += m.weight * m.state.projector();
  return out;
}

double Ensemble::weight_sum() const {
  double s = 0.0;
  for (const auto& m : members_) s += m.weight;
  return s;
}

// ---------------------------------------------------------------------------
// LocalUnitary

LocalUnitary::LocalUnitary(std::vector<Eigen::Matrix2cd> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) throw Error(ErrorCode::kInvalidArgument, "local unitary needs at least one factor");
  for (const auto& u : factors_) {
    if (max_abs(u.adjoint() * u - Eigen::Matrix2cd::Identity()) > 1e-12) {
      throw Error(ErrorCode::kInvalidArgument, "local factor is not unitary");
    }
  }
}

LocalUnitary LocalUnitary::identity(int n_qubits) {
  return LocalUnitary(std::vector<Eigen::Matrix2cd>(static_cast<std::size_t>(n_qubits), Eigen::Matrix2cd::Identity()));
}

CMatrix LocalUnitary::full() const {
  CMatrix out = factors_.front();
  for (std::size_t q = 1; q < factors_.size(); ++q) {
    const auto& f = factors_[q];
    CMatrix next(out.rows() * 2, out.cols() * 2);
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      for (Eigen::Index j = 0; j < out.cols(); ++j) next.block<2, 2>(2 * i, 2 * j) = out(i, j) * f;
    }
    out = std::move(next);
  }
  return out;
}

PureState LocalUnitary::apply(const PureState& psi) const {
  if (psi.n_qubits() != n_qubits()) throw Error(ErrorCode::kDimensionMismatch, "local unitary qubit count");
  return PureState::normalized(full() * psi.amplitudes());
}

// ---------------------------------------------------------------------------
// Operations

double trace_distance(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "trace distance between matrices of different size");
  }
  const CMatrix diff = a - b;
  return 0.5 * hermitian_eigenvalues(0.5 * (diff + diff.adjoint())).cwiseAbs().sum();
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) { return trace_distance(a.matrix(), b.matrix()); }

std::vector<SpectralPair> spectral(const DensityMatrix& rho) {
  std::vector<SpectralPair> out;
  out.reserve(static_cast<std::size_t>(rho.dim()));
  for (Eigen::Index i = 0; i < rho.dim(); ++i) {
    out.push_back({rho.eigenvalues()(i), PureState::normalized(rho.eigenvectors().col(i))});
  }
  return out;
}

CVector random_complex_gaussian(Eigen::Index n, Rng& rng) {
  CVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double re = rng.normal();
    const double im = rng.normal();
    v(i) = Complex(re, im);
  }
  return v;
}

PureState random_pure(int n_qubits, Rng& rng) {
  if (n_qubits < 1) throw Error(ErrorCode::kInvalidArgument, "n_qubits must be >= 1");
  return PureState::normalized(random_complex_gaussian(Eigen::Index{1} << n_qubits, rng));
}

std::vector<double> random_simplex(int d, Rng& rng) {
  if (d < 1) throw Error(ErrorCode::kInvalidArgument, "simplex dimension must be >= 1");
  std::vector<double> p(static_cast<std::size_t>(d));
  for (auto& x : p) x = -std::log(rng.uniform_open0());
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (auto& x : p) x /= total;
  return p;
}

DensityMatrix random_density(int rank, int n_qubits, Rng& rng) {
  if (n_qubits < 1) throw Error(ErrorCode::kInvalidArgument, "n_qubits must be >= 1");
  const int dim = 1 << n_qubits;
  if (rank < 1 || rank > dim) {
    throw Error(ErrorCode::kInvalidArgument, "rank " + std::to_string(rank) + " outside [1, " + std::to_string(dim) + "]");
  }
  const auto weights = random_simplex(rank, rng);
  CMatrix m = CMatrix::Zero(dim, dim);
  for (int i = 0; i < rank; ++i) {
    const PureState psi = random_pure(n_qubits, rng);
    m.noalias() += weights[static_cast<std::size_t>(i)] * psi.projector();
  }
  return DensityMatrix::repaired(m);
}

CMatrix orthonormalize_columns(const CMatrix& m) {
  Eigen::HouseholderQR<CMatrix> qr(m);
  CMatrix q = qr.householderQ() * CMatrix::Identity(m.rows(), m.cols());
  const CMatrix& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    const Complex d = r(j, j);
    const double a = std::abs(d);
    if (a > 0.0) q.col(j) *= d / a;
  }
  return q;
}

CMatrix random_isometry(int m, int d, Rng& rng) {
  if (m < d || d < 1) throw Error(ErrorCode::kInvalidArgument, "isometry needs m >= d >= 1");
  CMatrix g(m, d);
  for (Eigen::Index j = 0; j < d; ++j) g.col(j) = random_complex_gaussian(m, rng);
  return orthonormalize_columns(g);
}

CMatrix random_haar_unitary(int n, Rng& rng) { return random_isometry(n, n, rng); }

LocalUnitary random_local_su2(int n_qubits, Rng& rng) {
  if (n_qubits < 1) throw Error(ErrorCode::kInvalidArgument, "n_qubits must be >= 1");
  std::vector<Eigen::Matrix2cd> factors;
  factors.reserve(static_cast<std::size_t>(n_qubits));
  for (int q = 0; q < n_qubits; ++q) {
    Eigen::Matrix2cd u = random_haar_unitary(2, rng);
    u /= std::sqrt(u.determinant());
    factors.push_back(u);
  }
  return LocalUnitary(std::move(factors));
}

DensityMatrix conjugate(const DensityMatrix& rho, const LocalUnitary& u) {
  if (u.n_qubits() != rho.n_qubits()) throw Error(ErrorCode::kDimensionMismatch, "local unitary qubit count");
  const CMatrix full = u.full();
  return DensityMatrix::repaired(full * rho.matrix() * full.adjoint());
}

}  // namespace roofbound
