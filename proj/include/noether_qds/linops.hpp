#pragma once

// Dense linear-algebra substrate: Hermiticity, clustered spectral
// decomposition, matrix functions, nullspaces and operator subspaces.
//
// Operators on C^d are vectorized by column stacking, which is Eigen's
// native storage order: vec(A S B) = (B^T kron A) vec(S).

#include <algorithm>
#include <cmath>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "noether_qds/types.hpp"

namespace noether {

template <typename Derived>
using ScalarOf = typename Derived::Scalar;

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw Error(ErrorKind::DimensionMismatch,
                std::string(what) + " must be a nonempty square matrix, got " +
                    std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

template <typename DA, typename DB>
Matrix<ScalarOf<DA>> commutator(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
  return a * b - b * a;
}

template <typename DA, typename DB>
Matrix<ScalarOf<DA>> kron(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
  return Eigen::kroneckerProduct(a.eval(), b.eval()).eval();
}

// Column-stacked vectorization.
template <typename Derived>
Vector<ScalarOf<Derived>> vec(const Eigen::MatrixBase<Derived>& m) {
  Matrix<ScalarOf<Derived>> dense = m;
  return Eigen::Map<const Vector<ScalarOf<Derived>>>(dense.data(), dense.size());
}

template <typename Derived>
Matrix<ScalarOf<Derived>> unvec(const Eigen::MatrixBase<Derived>& v, Eigen::Index d) {
  if (v.size() != d * d) {
    throw Error(ErrorKind::DimensionMismatch, "unvec: vector length is not d^2");
  }
  Vector<ScalarOf<Derived>> dense = v;
  return Eigen::Map<const Matrix<ScalarOf<Derived>>>(dense.data(), d, d);
}

// ||A - A*||_F
template <typename Derived>
double hermitian_residual(const Eigen::MatrixBase<Derived>& a) {
  return (a - a.adjoint()).norm();
}

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& a, double herm_tol) {
  return a.rows() == a.cols() && hermitian_residual(a) <= herm_tol * std::max(1.0, a.norm());
}

// A square matrix that passed the Hermiticity check. Construction is the
// only way to obtain one, so downstream code never re-checks.
template <typename Scalar>
class HermitianObservable {
 public:
  template <typename Derived>
  HermitianObservable(const Eigen::MatrixBase<Derived>& a, const ToleranceConfig& cfg = {}) : m_(a) {
    require_square(m_, "observable");
    if (!m_.allFinite()) {
      throw Error(ErrorKind::InvalidArgument, "observable has non-finite entries");
    }
    if (!is_hermitian(m_, cfg.herm_tol)) {
      throw Error(ErrorKind::NotHermitian,
                  "||A - A*||_F = " + std::to_string(hermitian_residual(m_)));
    }
  }

  const Matrix<Scalar>& matrix() const noexcept { return m_; }
  Eigen::Index dim() const noexcept { return m_.rows(); }

 private:
  Matrix<Scalar> m_;
};

using Observable = HermitianObservable<cplx>;

// Distinct eigenvalues (ascending) with their orthogonal spectral projectors.
template <typename Scalar>
struct SpectralDecomposition {
  std::vector<double> eigenvalues;
  std::vector<Matrix<Scalar>> projectors;

  std::size_t size() const noexcept { return eigenvalues.size(); }

  // sum_a f(a) P_a
  template <typename F>
  Matrix<Scalar> apply(F&& f) const {
    const auto d = projectors.front().rows();
    Matrix<Scalar> out = Matrix<Scalar>::Zero(d, d);
    for (std::size_t i = 0; i < size(); ++i) out += Scalar(f(eigenvalues[i])) * projectors[i];
    return out;
  }

  Matrix<Scalar> reconstruct() const {
    return apply([](double a) { return a; });
  }
};

// Eigenvalues closer than eig_cluster_tol * max(1, ||A||_2) to their
// neighbour are merged into one projector.
template <typename Scalar>
SpectralDecomposition<Scalar> spectral_decompose(const HermitianObservable<Scalar>& obs,
                                                 const ToleranceConfig& cfg = {}) {
  const Matrix<Scalar> herm = (obs.matrix() + obs.matrix().adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(herm);
  const auto& w = es.eigenvalues();
  const auto& v = es.eigenvectors();
  const double scale = std::max(1.0, w.cwiseAbs().maxCoeff());
  const double gap = cfg.eig_cluster_tol * scale;

  SpectralDecomposition<Scalar> out;
  Eigen::Index start = 0;
  const Eigen::Index n = w.size();
  for (Eigen::Index i = 1; i <= n; ++i) {
    if (i < n && w(i) - w(i - 1) < gap) continue;
    const auto block = v.middleCols(start, i - start);
    out.eigenvalues.push_back(w.segment(start, i - start).mean());
    out.projectors.push_back(block * block.adjoint());
    start = i;
  }
  return out;
}

// f(A) for a Hermitian A via spectral calculus.
template <typename Scalar, typename F>
Matrix<Scalar> hermitian_function(const HermitianObservable<Scalar>& obs, F&& f,
                                  const ToleranceConfig& cfg = {}) {
  return spectral_decompose(obs, cfg).apply(std::forward<F>(f));
}

// e^{tX}. Backed by Eigen's Pade scaling-and-squaring.
template <typename Derived>
Matrix<ScalarOf<Derived>> matrix_exp(const Eigen::MatrixBase<Derived>& x, double t) {
  require_square(x, "matrix_exp argument");
  if (!std::isfinite(t)) throw Error(ErrorKind::InvalidArgument, "matrix_exp: t is not finite");
  const Matrix<ScalarOf<Derived>> scaled = ScalarOf<Derived>(t) * x;
  return scaled.exp();
}

// Orthonormal basis (as columns) of the numerical kernel of X. Singular
// values <= nullspace_tol * max(1, sigma_max) count as zero.
template <typename Derived>
Matrix<ScalarOf<Derived>> nullspace(const Eigen::MatrixBase<Derived>& x, const ToleranceConfig& cfg = {}) {
  using S = ScalarOf<Derived>;
  const Eigen::Index n = x.cols();
  if (x.rows() == 0) return Matrix<S>::Identity(n, n);
  Eigen::JacobiSVD<Matrix<S>> svd(x, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff = cfg.nullspace_tol * std::max(1.0, sv.size() ? sv(0) : 0.0);
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > cutoff) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

template <typename Derived>
double spectral_norm(const Eigen::MatrixBase<Derived>& x) {
  if (x.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix<ScalarOf<Derived>>> svd(x);
  return svd.singularValues()(0);
}

// Sum of singular values.
template <typename Derived>
double trace_norm(const Eigen::MatrixBase<Derived>& x) {
  Eigen::JacobiSVD<Matrix<ScalarOf<Derived>>> svd(x);
  return svd.singularValues().sum();
}

// Subspace of operators on C^d with an orthonormal basis under tr(X* Y).
class OperatorSubspace {
 public:
  // Orthonormalizes the span of the given column-stacked vectors (columns of
  // `vectors`, each of length d^2) and evaluates the algebra flags.
  static OperatorSubspace from_vectors(Eigen::Index d, const ComplexMatrix& vectors,
                                       const ToleranceConfig& cfg = {});
  static OperatorSubspace from_operators(const std::vector<ComplexMatrix>& ops,
                                         const ToleranceConfig& cfg = {});
  // All of B(C^d).
  static OperatorSubspace full(Eigen::Index d, const ToleranceConfig& cfg = {});

  Eigen::Index dim_hilbert() const noexcept { return d_; }
  Eigen::Index dim() const noexcept { return q_.cols(); }
  std::vector<ComplexMatrix> basis() const;
  // Columns are the vectorized basis.
  const ComplexMatrix& basis_vectors() const noexcept { return q_; }

  bool closed_under_adjoint() const noexcept { return closed_adjoint_; }
  bool closed_under_product() const noexcept { return closed_product_; }
  bool contains_identity() const noexcept { return contains_identity_; }
  // Largest distance found while evaluating each flag.
  double adjoint_residual() const noexcept { return adjoint_residual_; }
  double product_residual() const noexcept { return product_residual_; }

  // Orthogonal projection onto the span.
  ComplexMatrix project(const ComplexMatrix& op) const;
  // ||X - project(X)||_F
  double distance(const ComplexMatrix& op) const;
  ComplexMatrix projector() const { return q_ * q_.adjoint(); }

 private:
  OperatorSubspace(Eigen::Index d, ComplexMatrix q, const ToleranceConfig& cfg);

  Eigen::Index d_ = 0;
  ComplexMatrix q_;
  bool closed_adjoint_ = false;
  bool closed_product_ = false;
  bool contains_identity_ = false;
  double adjoint_residual_ = 0.0;
  double product_residual_ = 0.0;
};

// ||P_U - P_V||_F for the orthogonal projectors onto the two spans.
double subspace_distance(const OperatorSubspace& u, const OperatorSubspace& v);

}  // namespace noether
