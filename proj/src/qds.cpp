#include "noether_qds/qds.hpp"

#include <cmath>
#include <string>

namespace noether::qds {

namespace {

// Permutation with Pi vec(X) = vec(X^T).
ComplexMatrix transpose_permutation(Eigen::Index d) {
  ComplexMatrix pi = ComplexMatrix::Zero(d * d, d * d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) pi(i * d + j, j * d + i) = 1.0;
  }
  return pi;
}

void require_same(const SuperOperator& a, const SuperOperator& b) {
  if (a.dim_hilbert() != b.dim_hilbert()) {
    throw Error(ErrorKind::DimensionMismatch, "superoperators act on different dimensions");
  }
}

}  // namespace

SuperOperator::SuperOperator(Eigen::Index d, ComplexMatrix mat) : d_(d), mat_(std::move(mat)) {
  if (d < 1 || mat_.rows() != d * d || mat_.cols() != d * d) {
    throw Error(ErrorKind::DimensionMismatch, "superoperator matrix must be d^2 x d^2");
  }
  if (!mat_.allFinite()) throw Error(ErrorKind::InvalidArgument, "superoperator has non-finite entries");
}

SuperOperator SuperOperator::identity(Eigen::Index d) {
  return SuperOperator(d, ComplexMatrix::Identity(d * d, d * d));
}

ComplexMatrix SuperOperator::apply(const ComplexMatrix& s) const {
  if (s.rows() != d_ || s.cols() != d_) {
    throw Error(ErrorKind::DimensionMismatch, "operator dimension differs from superoperator");
  }
  return unvec(ComplexVector(mat_ * vec(s)), d_);
}

SuperOperator SuperOperator::dual() const {
  const ComplexMatrix pi = transpose_permutation(d_);
  return SuperOperator(d_, pi * mat_.transpose() * pi);
}

ComplexMatrix SuperOperator::choi() const {
  ComplexMatrix c(d_ * d_, d_ * d_);
  for (Eigen::Index i = 0; i < d_; ++i) {
    for (Eigen::Index j = 0; j < d_; ++j) {
      c.block(i * d_, j * d_, d_, d_) = unvec(mat_.col(j * d_ + i), d_);
    }
  }
  return c;
}

SuperOperator SuperOperator::exp(double t) const {
  if (t < 0.0) throw Error(ErrorKind::NegativeTime, "t = " + std::to_string(t));
  return SuperOperator(d_, matrix_exp(mat_, t));
}

SuperOperator SuperOperator::operator*(const SuperOperator& rhs) const {
  require_same(*this, rhs);
  return SuperOperator(d_, mat_ * rhs.mat_);
}

SuperOperator SuperOperator::operator+(const SuperOperator& rhs) const {
  require_same(*this, rhs);
  return SuperOperator(d_, mat_ + rhs.mat_);
}

SuperOperator SuperOperator::operator-(const SuperOperator& rhs) const {
  require_same(*this, rhs);
  return SuperOperator(d_, mat_ - rhs.mat_);
}

SuperOperator superop_commutator(const SuperOperator& t1, const SuperOperator& t2) {
  require_same(t1, t2);
  return SuperOperator(t1.dim_hilbert(), commutator(t1.mat(), t2.mat()));
}

DensityMatrix DensityMatrix::validated(const ComplexMatrix& rho, const ToleranceConfig& cfg) {
  require_square(rho, "density matrix");
  if (!is_hermitian(rho, cfg.herm_tol)) throw Error(ErrorKind::InvalidArgument, "density matrix is not Hermitian");
  DensityMatrix out{rho};
  if (out.min_eigenvalue() < -cfg.positivity_tol) {
    throw Error(ErrorKind::InvalidArgument, "density matrix has a negative eigenvalue");
  }
  if (std::abs(rho.trace() - 1.0) > cfg.positivity_tol) {
    throw Error(ErrorKind::InvalidArgument, "density matrix trace is not 1");
  }
  return out;
}

double DensityMatrix::min_eigenvalue() const {
  const ComplexMatrix h = (rho + rho.adjoint()) / 2.0;
  return Eigen::SelfAdjointEigenSolver<ComplexMatrix>(h, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

ComplexMatrix KrausSet::completeness() const {
  const Eigen::Index d = dim();
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  for (const auto& v : operators) out += v.adjoint() * v;
  return out;
}

ComplexMatrix KrausSet::apply(const ComplexMatrix& s) const {
  ComplexMatrix out = ComplexMatrix::Zero(s.rows(), s.cols());
  for (const auto& v : operators) out += v * s * v.adjoint();
  return out;
}

SuperOperator kraus_to_superop(const KrausSet& kraus) {
  if (kraus.operators.empty()) throw Error(ErrorKind::InvalidArgument, "empty Kraus set");
  const Eigen::Index d = kraus.dim();
  ComplexMatrix mat = ComplexMatrix::Zero(d * d, d * d);
  for (const auto& v : kraus.operators) {
    if (v.rows() != d || v.cols() != d) throw Error(ErrorKind::DimensionMismatch, "Kraus operators differ in size");
    mat += kron(v.conjugate(), v);
  }
  return SuperOperator(d, std::move(mat));
}

KrausSet superop_to_kraus(const SuperOperator& t, const ToleranceConfig& cfg) {
  const Eigen::Index d = t.dim_hilbert();
  const ComplexMatrix c = t.choi();
  if (!is_hermitian(c, cfg.herm_tol)) {
    throw Error(ErrorKind::NotCompletelyPositive, "Choi matrix is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es((c + c.adjoint()) / 2.0);
  const auto& w = es.eigenvalues();
  const double scale = std::max(1.0, std::abs(c.trace()));
  if (w(0) < -cfg.positivity_tol * scale) {
    throw Error(ErrorKind::NotCompletelyPositive, "Choi eigenvalue " + std::to_string(w(0)));
  }
  KrausSet out;
  for (Eigen::Index k = w.size() - 1; k >= 0; --k) {
    if (w(k) <= cfg.positivity_tol * scale) break;
    out.operators.push_back(std::sqrt(w(k)) * unvec(es.eigenvectors().col(k), d));
  }
  if (out.operators.empty()) out.operators.push_back(ComplexMatrix::Zero(d, d));
  return out;
}

ChannelReport is_cp_trace_preserving(const SuperOperator& t, const ToleranceConfig& cfg) {
  const Eigen::Index d = t.dim_hilbert();
  const ComplexMatrix c = t.choi();
  const ComplexMatrix id = ComplexMatrix::Identity(d, d);
  ChannelReport r;
  r.min_choi_eigenvalue =
      Eigen::SelfAdjointEigenSolver<ComplexMatrix>((c + c.adjoint()) / 2.0, Eigen::EigenvaluesOnly).eigenvalues()(0);
  const double herm = hermitian_residual(c);
  r.choi_psd = herm <= cfg.herm_tol * std::max(1.0, c.norm()) &&
               r.min_choi_eigenvalue >= -cfg.positivity_tol * std::max(1.0, std::abs(c.trace()));
  r.trace_residual = (t.dual().apply(id) - id).norm();
  r.unital_residual = (t.apply(id) - id).norm();
  const double scale = std::max(1.0, t.mat().norm());
  r.trace_preserving = r.trace_residual <= cfg.commute_tol * scale;
  r.unital = r.unital_residual <= cfg.commute_tol * scale;
  return r;
}

LindbladSpec::LindbladSpec(ComplexMatrix h, std::vector<ComplexMatrix> lindblad_ops, const ToleranceConfig& cfg)
    : h_(h, cfg), ops_(std::move(lindblad_ops)) {
  for (const auto& l : ops_) {
    if (l.rows() != dim() || l.cols() != dim()) {
      throw Error(ErrorKind::DimensionMismatch, "Lindblad operator differs in size from H");
    }
    if (!l.allFinite()) throw Error(ErrorKind::InvalidArgument, "Lindblad operator has non-finite entries");
  }
}

SuperOperator lindblad_schrodinger(const LindbladSpec& spec) {
  const Eigen::Index d = spec.dim();
  const ComplexMatrix id = ComplexMatrix::Identity(d, d);
  const ComplexMatrix& h = spec.hamiltonian();
  const cplx i(0.0, 1.0);
  // i S H - i H S
  ComplexMatrix mat = i * kron(h.transpose(), id) - i * kron(id, h);
  for (const auto& l : spec.lindblad_ops()) {
    const ComplexMatrix k = l.adjoint() * l;
    mat += kron(l.conjugate(), l) - 0.5 * kron(k.transpose(), id) - 0.5 * kron(id, k);
  }
  return SuperOperator(d, std::move(mat));
}

SuperOperator lindblad_heisenberg(const LindbladSpec& spec) {
  const Eigen::Index d = spec.dim();
  const ComplexMatrix id = ComplexMatrix::Identity(d, d);
  const ComplexMatrix& h = spec.hamiltonian();
  const cplx i(0.0, 1.0);
  // -i A H + i H A
  ComplexMatrix mat = -i * kron(h.transpose(), id) + i * kron(id, h);
  for (const auto& l : spec.lindblad_ops()) {
    const ComplexMatrix k = l.adjoint() * l;
    mat += kron(l.transpose(), l.adjoint()) - 0.5 * kron(k.transpose(), id) - 0.5 * kron(id, k);
  }
  return SuperOperator(d, std::move(mat));
}

ComplexMatrix evolve(const SuperOperator& gen, const ComplexMatrix& x, double t) {
  return gen.exp(t).apply(x);
}

}  // namespace noether::qds
