#include "noether_qds/linops.hpp"

#include <cmath>

namespace noether {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NegativeOffDiagonal: return "NegativeOffDiagonal";
    case ErrorKind::ColumnSumNonzero: return "ColumnSumNonzero";
    case ErrorKind::NegativeTime: return "NegativeTime";
    case ErrorKind::NotCompletelyPositive: return "NotCompletelyPositive";
    case ErrorKind::NonSemisimpleZeroEigenvalue: return "NonSemisimpleZeroEigenvalue";
    case ErrorKind::PostulateFailed: return "PostulateFailed";
    case ErrorKind::NotFaithful: return "NotFaithful";
    case ErrorKind::InvalidBlocks: return "InvalidBlocks";
  }
  return "Unknown";
}

void ToleranceConfig::validate() const {
  const std::pair<const char*, double> fields[] = {
      {"herm_tol", herm_tol},           {"eig_cluster_tol", eig_cluster_tol},
      {"nullspace_tol", nullspace_tol}, {"commute_tol", commute_tol},
      {"positivity_tol", positivity_tol}, {"subspace_tol", subspace_tol},
  };
  for (const auto& [name, value] : fields) {
    if (!(std::isfinite(value) && value > 0.0)) {
      throw Error(ErrorKind::InvalidArgument, std::string(name) + " must be strictly positive");
    }
  }
}

OperatorSubspace::OperatorSubspace(Eigen::Index d, ComplexMatrix q, const ToleranceConfig& cfg)
    : d_(d), q_(std::move(q)) {
  const ComplexMatrix id = ComplexMatrix::Identity(d_, d_);
  contains_identity_ = distance(id) <= cfg.subspace_tol * std::sqrt(double(d_));

  const auto ops = basis();
  for (const auto& b : ops) {
    adjoint_residual_ = std::max(adjoint_residual_, distance(b.adjoint()));
  }
  closed_adjoint_ = adjoint_residual_ <= cfg.subspace_tol;

  for (const auto& a : ops) {
    for (const auto& b : ops) {
      const ComplexMatrix ab = a * b;
      product_residual_ = std::max(product_residual_, distance(ab) / std::max(1.0, ab.norm()));
    }
  }
  closed_product_ = product_residual_ <= cfg.subspace_tol;
}

OperatorSubspace OperatorSubspace::from_vectors(Eigen::Index d, const ComplexMatrix& vectors,
                                                const ToleranceConfig& cfg) {
  if (vectors.rows() != d * d) {
    throw Error(ErrorKind::DimensionMismatch, "operator vectors must have length d^2");
  }
  if (vectors.cols() == 0) return OperatorSubspace(d, ComplexMatrix(d * d, 0), cfg);
  Eigen::JacobiSVD<ComplexMatrix> svd(vectors, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double cutoff = cfg.subspace_tol * std::max(1.0, sv(0));
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > cutoff) ++rank;
  return OperatorSubspace(d, svd.matrixU().leftCols(rank), cfg);
}

OperatorSubspace OperatorSubspace::from_operators(const std::vector<ComplexMatrix>& ops,
                                                  const ToleranceConfig& cfg) {
  if (ops.empty()) throw Error(ErrorKind::InvalidArgument, "from_operators needs at least one operator");
  const Eigen::Index d = ops.front().rows();
  ComplexMatrix cols(d * d, Eigen::Index(ops.size()));
  for (std::size_t i = 0; i < ops.size(); ++i) {
    if (ops[i].rows() != d || ops[i].cols() != d) {
      throw Error(ErrorKind::DimensionMismatch, "operators must share one dimension");
    }
    cols.col(Eigen::Index(i)) = vec(ops[i]);
  }
  return from_vectors(d, cols, cfg);
}

OperatorSubspace OperatorSubspace::full(Eigen::Index d, const ToleranceConfig& cfg) {
  return OperatorSubspace(d, ComplexMatrix::Identity(d * d, d * d), cfg);
}

std::vector<ComplexMatrix> OperatorSubspace::basis() const {
  std::vector<ComplexMatrix> out;
  out.reserve(std::size_t(q_.cols()));
  for (Eigen::Index j = 0; j < q_.cols(); ++j) out.push_back(unvec(q_.col(j), d_));
  return out;
}

ComplexMatrix OperatorSubspace::project(const ComplexMatrix& op) const {
  if (op.rows() != d_ || op.cols() != d_) {
    throw Error(ErrorKind::DimensionMismatch, "operator dimension differs from subspace");
  }
  const ComplexVector v = vec(op);
  return unvec(q_ * (q_.adjoint() * v), d_);
}

double OperatorSubspace::distance(const ComplexMatrix& op) const {
  return (op - project(op)).norm();
}

double subspace_distance(const OperatorSubspace& u, const OperatorSubspace& v) {
  if (u.dim_hilbert() != v.dim_hilbert()) {
    throw Error(ErrorKind::DimensionMismatch, "subspaces act on different Hilbert spaces");
  }
  return (u.projector() - v.projector()).norm();
}

}  // namespace noether
