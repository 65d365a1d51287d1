#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace noether {

using cplx = std::complex<double>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using RealMatrix = Matrix<double>;
using RealVector = Vector<double>;
using ComplexMatrix = Matrix<cplx>;
using ComplexVector = Vector<cplx>;

// Every threshold used by the library. Comparisons are relative to a
// per-operation scale, usually max(1, norm of the input).
struct ToleranceConfig {
  double herm_tol = 1e-8;
  double eig_cluster_tol = 1e-8;
  double nullspace_tol = 1e-9;
  double commute_tol = 1e-8;
  double positivity_tol = 1e-9;
  double subspace_tol = 1e-8;

  // Throws InvalidArgument unless every field is strictly positive and finite.
  void validate() const;
};

enum class ErrorKind {
  InvalidArgument,
  DimensionMismatch,
  NotHermitian,
  NegativeOffDiagonal,
  ColumnSumNonzero,
  NegativeTime,
  NotCompletelyPositive,
  NonSemisimpleZeroEigenvalue,
  PostulateFailed,
  NotFaithful,
  InvalidBlocks,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Time grid used by the redundancy cross-checks when none is given.
inline std::vector<double> default_time_grid() { return {0.0, 0.1, 0.5, 1.0, 5.0}; }

}  // namespace noether
