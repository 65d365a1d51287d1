#pragma once

// Quantum channels and Lindblad semigroups as d^2 x d^2 matrices acting on
// column-stacked operators.

#include <vector>

#include "noether_qds/linops.hpp"

namespace noether::qds {

// Linear map on d x d operators. mat() acts on vec(S).
class SuperOperator {
 public:
  SuperOperator() = default;
  SuperOperator(Eigen::Index d, ComplexMatrix mat);

  static SuperOperator identity(Eigen::Index d);
  // S -> A S B
  template <typename DA, typename DB>
  static SuperOperator sandwich(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
    return SuperOperator(a.rows(), kron(b.transpose(), a));
  }

  Eigen::Index dim_hilbert() const noexcept { return d_; }
  const ComplexMatrix& mat() const noexcept { return mat_; }

  ComplexMatrix apply(const ComplexMatrix& s) const;
  // Matrix of the trace-dual map: tr{T(S) A} = tr{S T'(A)}.
  SuperOperator dual() const;
  // C = sum_ij E_ij kron T(E_ij)
  ComplexMatrix choi() const;
  // e^{t T}; requires t >= 0.
  SuperOperator exp(double t) const;

  SuperOperator operator*(const SuperOperator& rhs) const;
  SuperOperator operator+(const SuperOperator& rhs) const;
  SuperOperator operator-(const SuperOperator& rhs) const;

 private:
  Eigen::Index d_ = 0;
  ComplexMatrix mat_;
};

// T1 o T2 - T2 o T1
SuperOperator superop_commutator(const SuperOperator& t1, const SuperOperator& t2);

struct DensityMatrix {
  ComplexMatrix rho;

  // Throws InvalidArgument unless rho is Hermitian, PSD and unit trace.
  static DensityMatrix validated(const ComplexMatrix& rho, const ToleranceConfig& cfg = {});
  double min_eigenvalue() const;
};

struct KrausSet {
  std::vector<ComplexMatrix> operators;

  Eigen::Index dim() const { return operators.empty() ? 0 : operators.front().rows(); }
  // sum_k V_k* V_k
  ComplexMatrix completeness() const;
  ComplexMatrix apply(const ComplexMatrix& s) const;
};

// sum_k conj(V_k) kron V_k
SuperOperator kraus_to_superop(const KrausSet& kraus);

// Kraus operators from the Choi eigendecomposition. Eigenpairs with
// eigenvalue <= positivity_tol * tr(C) are dropped.
KrausSet superop_to_kraus(const SuperOperator& t, const ToleranceConfig& cfg = {});

struct ChannelReport {
  bool choi_psd = false;
  bool trace_preserving = false;
  bool unital = false;
  double min_choi_eigenvalue = 0.0;
  double trace_residual = 0.0;
  double unital_residual = 0.0;
};

ChannelReport is_cp_trace_preserving(const SuperOperator& t, const ToleranceConfig& cfg = {});

// H Hermitian plus any number of Lindblad operators, all d x d.
class LindbladSpec {
 public:
  LindbladSpec(ComplexMatrix h, std::vector<ComplexMatrix> lindblad_ops, const ToleranceConfig& cfg = {});

  Eigen::Index dim() const noexcept { return h_.dim(); }
  const ComplexMatrix& hamiltonian() const noexcept { return h_.matrix(); }
  const std::vector<ComplexMatrix>& lindblad_ops() const noexcept { return ops_; }

 private:
  Observable h_;
  std::vector<ComplexMatrix> ops_;
};

// M(S) = sum_k (L S L* - S L*L/2 - L*L S/2) + i[S, H]
SuperOperator lindblad_schrodinger(const LindbladSpec& spec);
// L(A) = sum_k (L* A L - A L*L/2 - L*L A/2) - i[A, H]
SuperOperator lindblad_heisenberg(const LindbladSpec& spec);

// unvec(e^{t gen} vec(X)). Throws NegativeTime for t < 0.
ComplexMatrix evolve(const SuperOperator& gen, const ComplexMatrix& x, double t);

}  // namespace noether::qds
