#pragma once

// Conserved observables of Lindblad semigroups: the pinching ("hat") map,
// its commutation test against the generator, fixed points, commutants,
// faithful stationary states, the induced conditional expectation and the
// modular flow.

#include <span>
#include <vector>

#include "noether_qds/qds.hpp"

namespace noether {

using qds::SuperOperator;
using qds::superop_commutator;

// Polynomial coefficients in ascending powers: c0 + c1 x + c2 x^2 + ...
double eval_polynomial(std::span<const double> coeffs, double x);

struct PinchingMap {
  SpectralDecomposition<cplx> spectrum;
  // f(a) for each distinct eigenvalue a, aligned with spectrum.
  std::vector<double> weights;
  SuperOperator superop;

  // sum_a f(a) P_a S P_a
  ComplexMatrix apply(const ComplexMatrix& s) const { return superop.apply(s); }
};

// Weighted pinching S -> sum_a f(a) P_a S P_a over the distinct eigenvalues of A.
PinchingMap hat_map(const Observable& a, std::span<const double> poly, const ToleranceConfig& cfg = {});

// S -> P S P
SuperOperator single_pinching(const ComplexMatrix& projector);

struct CheckResult {
  bool holds = false;
  double residual = 0.0;
};

// True iff every single-eigenvalue pinching P_a . P_a of A commutes with the
// Schrodinger generator; residual is the largest ||[Phi_a, M]||_F.
CheckResult is_constant_quantum(const Observable& a, const SuperOperator& schrodinger_gen,
                                const ToleranceConfig& cfg = {});

// Kernel of the Heisenberg generator as an operator subspace.
OperatorSubspace fixed_points(const SuperOperator& heisenberg_gen, const ToleranceConfig& cfg = {});

// {A : [A, X] = 0 for X in generators and their adjoints}; all of B(C^d)
// when the list is empty.
OperatorSubspace commutant(Eigen::Index d, std::span<const ComplexMatrix> generators,
                           const ToleranceConfig& cfg = {});
// Commutant of {H, L_k, L_k*}.
OperatorSubspace commutant(const qds::LindbladSpec& spec, const ToleranceConfig& cfg = {});

// Spectral projection of a generator onto its eigenvalue-0 eigenspace.
struct ErgodicProjection {
  SuperOperator projector;
  int kernel_dim = 0;
  // Smallest singular value of the left/right kernel overlap; near zero
  // signals a Jordan block at zero.
  double overlap_sigma_min = 0.0;
};

// Built from the right and left kernels R, W as R (W* R)^{-1} W*. Throws
// NonSemisimpleZeroEigenvalue when the zero eigenvalue has a Jordan block.
ErgodicProjection ergodic_projection(const SuperOperator& gen, const ToleranceConfig& cfg = {});

struct StationaryReport {
  int kernel_dim = 0;
  qds::DensityMatrix candidate;
  double min_eigenvalue = 0.0;
  // ||M vec(candidate)||
  double stationarity_residual = 0.0;
  bool postulate_p_holds = false;
};

// Applies the ergodic projection to I/d. The result is faithful iff some
// faithful stationary state exists.
StationaryReport stationary_state(const SuperOperator& schrodinger_gen, const ToleranceConfig& cfg = {});

// Smallest |Re lambda| over the nonzero eigenvalues of the generator; 0 if none.
double spectral_gap(const SuperOperator& gen, const ToleranceConfig& cfg = {});

// Projection of the observable algebra onto the fixed points of a
// Heisenberg semigroup, compatible with its faithful stationary state.
class ConditionalExpectation {
 public:
  // Throws PostulateFailed when no faithful stationary state exists.
  explicit ConditionalExpectation(const SuperOperator& heisenberg_gen, const ToleranceConfig& cfg = {});

  ComplexMatrix operator()(const ComplexMatrix& a) const { return projector_.apply(a); }
  const SuperOperator& superop() const noexcept { return projector_; }
  const StationaryReport& stationary() const noexcept { return stationary_; }

 private:
  SuperOperator projector_;
  StationaryReport stationary_;
};

ComplexMatrix conditional_expectation(const ComplexMatrix& a, const SuperOperator& heisenberg_gen,
                                      const ToleranceConfig& cfg = {});

// rho^{it} A rho^{-it}. Throws NotFaithful unless rho > positivity_tol.
ComplexMatrix modular_flow(const qds::DensityMatrix& rho, double t, const ComplexMatrix& a,
                           const ToleranceConfig& cfg = {});
SuperOperator modular_superop(const qds::DensityMatrix& rho, double t, const ToleranceConfig& cfg = {});

struct ModularDiagnostic {
  struct Entry {
    double s;
    double t;
    double residual;
  };
  std::vector<Entry> entries;
  double max_residual = 0.0;
};

// ||sigma_s o J_t - J_t o sigma_s||_F for every (s, t) in the grid product.
ModularDiagnostic modular_commutation(const qds::DensityMatrix& rho, const SuperOperator& heisenberg_gen,
                                      std::span<const double> s_grid, std::span<const double> t_grid,
                                      const ToleranceConfig& cfg = {});

struct NoetherReportQuantum {
  bool is_fixed_point = false;
  bool hat_commutes = false;
  bool in_commutant = false;
  bool postulate_p_holds = false;
  double fixed_point_residual = 0.0;
  double hat_residual = 0.0;
  double commutant_residual = 0.0;
  double min_stationary_eigenvalue = 0.0;

  bool all_agree() const noexcept { return is_fixed_point == hat_commutes && hat_commutes == in_commutant; }
};

// Non-Hermitian A is tested through its Hermitian parts (A + A*)/2 and
// (A - A*)/2i for the pinching criterion.
NoetherReportQuantum noether_check(const ComplexMatrix& a, const qds::LindbladSpec& spec,
                                   const ToleranceConfig& cfg = {});

}  // namespace noether
