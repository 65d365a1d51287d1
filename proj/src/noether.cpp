#include "noether_qds/noether.hpp"

#include <cmath>
#include <string>

namespace noether {

namespace {

// Eigenvalues of a generator with modulus below this count as zero when
// measuring the gap.
double zero_eigenvalue_threshold(const ComplexMatrix& mat, const ToleranceConfig& cfg) {
  return cfg.eig_cluster_tol * std::max(1.0, spectral_norm(mat));
}

ComplexMatrix commutator_map(const ComplexMatrix& x) {
  const Eigen::Index d = x.rows();
  const ComplexMatrix id = ComplexMatrix::Identity(d, d);
  // vec(XA - AX) = (I kron X - X^T kron I) vec(A)
  return kron(id, x) - kron(x.transpose(), id);
}

}  // namespace

double eval_polynomial(std::span<const double> coeffs, double x) {
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
  return acc;
}

SuperOperator single_pinching(const ComplexMatrix& projector) {
  return SuperOperator::sandwich(projector, projector);
}

PinchingMap hat_map(const Observable& a, std::span<const double> poly, const ToleranceConfig& cfg) {
  PinchingMap out{spectral_decompose(a, cfg), {}, SuperOperator()};
  const Eigen::Index d = a.dim();
  ComplexMatrix mat = ComplexMatrix::Zero(d * d, d * d);
  for (std::size_t i = 0; i < out.spectrum.size(); ++i) {
    const double w = eval_polynomial(poly, out.spectrum.eigenvalues[i]);
    out.weights.push_back(w);
    const auto& p = out.spectrum.projectors[i];
    mat += w * kron(p.conjugate(), p);
  }
  out.superop = SuperOperator(d, std::move(mat));
  return out;
}

CheckResult is_constant_quantum(const Observable& a, const SuperOperator& schrodinger_gen,
                                const ToleranceConfig& cfg) {
  if (a.dim() != schrodinger_gen.dim_hilbert()) {
    throw Error(ErrorKind::DimensionMismatch, "observable and generator dimensions differ");
  }
  const auto spectrum = spectral_decompose(a, cfg);
  CheckResult out;
  for (const auto& p : spectrum.projectors) {
    const double r = superop_commutator(single_pinching(p), schrodinger_gen).mat().norm();
    out.residual = std::max(out.residual, r);
  }
  out.holds = out.residual <= cfg.commute_tol * std::max(1.0, spectral_norm(schrodinger_gen.mat()));
  return out;
}

OperatorSubspace fixed_points(const SuperOperator& heisenberg_gen, const ToleranceConfig& cfg) {
  return OperatorSubspace::from_vectors(heisenberg_gen.dim_hilbert(), nullspace(heisenberg_gen.mat(), cfg), cfg);
}

OperatorSubspace commutant(Eigen::Index d, std::span<const ComplexMatrix> generators,
                           const ToleranceConfig& cfg) {
  if (d < 1) throw Error(ErrorKind::InvalidArgument, "dimension must be positive");
  if (generators.empty()) return OperatorSubspace::full(d, cfg);
  ComplexMatrix stacked(Eigen::Index(2 * generators.size()) * d * d, d * d);
  Eigen::Index row = 0;
  for (const auto& x : generators) {
    if (x.rows() != d || x.cols() != d) {
      throw Error(ErrorKind::DimensionMismatch, "commutant generators differ in size");
    }
    stacked.middleRows(row, d * d) = commutator_map(x);
    row += d * d;
    stacked.middleRows(row, d * d) = commutator_map(x.adjoint());
    row += d * d;
  }
  return OperatorSubspace::from_vectors(d, nullspace(stacked, cfg), cfg);
}

OperatorSubspace commutant(const qds::LindbladSpec& spec, const ToleranceConfig& cfg) {
  std::vector<ComplexMatrix> gens{spec.hamiltonian()};
  gens.insert(gens.end(), spec.lindblad_ops().begin(), spec.lindblad_ops().end());
  return commutant(spec.dim(), gens, cfg);
}

ErgodicProjection ergodic_projection(const SuperOperator& gen, const ToleranceConfig& cfg) {
  const ComplexMatrix& g = gen.mat();
  const ComplexMatrix right = nullspace(g, cfg);
  const ComplexMatrix left = nullspace(ComplexMatrix(g.adjoint()), cfg);
  const Eigen::Index k = right.cols();
  const Eigen::Index n = g.rows();

  ErgodicProjection out{SuperOperator(gen.dim_hilbert(), ComplexMatrix::Zero(n, n)), int(k), 0.0};
  if (k == 0) return out;
  if (left.cols() != k) {
    throw Error(ErrorKind::NonSemisimpleZeroEigenvalue, "left and right kernels differ in dimension");
  }

  const ComplexMatrix overlap = left.adjoint() * right;
  Eigen::JacobiSVD<ComplexMatrix> svd(overlap);
  out.overlap_sigma_min = svd.singularValues()(k - 1);

  // A Jordan block at zero leaves a right kernel vector orthogonal to every
  // left kernel vector, so the overlap becomes singular.
  if (out.overlap_sigma_min <= std::sqrt(cfg.nullspace_tol)) {
    throw Error(ErrorKind::NonSemisimpleZeroEigenvalue,
                "kernel overlap singular value " + std::to_string(out.overlap_sigma_min));
  }
  out.projector = SuperOperator(gen.dim_hilbert(), right * overlap.partialPivLu().solve(left.adjoint()));
  return out;
}

StationaryReport stationary_state(const SuperOperator& schrodinger_gen, const ToleranceConfig& cfg) {
  const Eigen::Index d = schrodinger_gen.dim_hilbert();
  const auto channel = is_cp_trace_preserving(schrodinger_gen.exp(1.0), cfg);
  if (!channel.choi_psd || !channel.trace_preserving) {
    throw Error(ErrorKind::InvalidArgument, "generator does not produce a CP trace-preserving semigroup");
  }
  const auto ergodic = ergodic_projection(schrodinger_gen, cfg);

  ComplexMatrix rho = ergodic.projector.apply(ComplexMatrix::Identity(d, d) / double(d));
  rho = (rho + rho.adjoint()) / 2.0;
  rho /= rho.trace().real();

  StationaryReport out;
  out.kernel_dim = ergodic.kernel_dim;
  out.candidate = qds::DensityMatrix{rho};
  out.min_eigenvalue = out.candidate.min_eigenvalue();
  out.stationarity_residual = schrodinger_gen.apply(rho).norm();
  out.postulate_p_holds = out.min_eigenvalue > cfg.positivity_tol;
  return out;
}

double spectral_gap(const SuperOperator& gen, const ToleranceConfig& cfg) {
  const double zero_tol = zero_eigenvalue_threshold(gen.mat(), cfg);
  const auto eigenvalues = Eigen::ComplexEigenSolver<ComplexMatrix>(gen.mat(), false).eigenvalues();
  double gap = 0.0;
  for (const auto& lambda : eigenvalues) {
    if (std::abs(lambda) <= zero_tol) continue;
    const double re = std::abs(lambda.real());
    if (gap == 0.0 || re < gap) gap = re;
  }
  return gap;
}

ConditionalExpectation::ConditionalExpectation(const SuperOperator& heisenberg_gen, const ToleranceConfig& cfg)
    : projector_(ergodic_projection(heisenberg_gen, cfg).projector),
      stationary_(stationary_state(heisenberg_gen.dual(), cfg)) {
  if (!stationary_.postulate_p_holds) {
    throw Error(ErrorKind::PostulateFailed, "no faithful stationary state; minimal eigenvalue " +
                                                std::to_string(stationary_.min_eigenvalue));
  }
}

ComplexMatrix conditional_expectation(const ComplexMatrix& a, const SuperOperator& heisenberg_gen,
                                      const ToleranceConfig& cfg) {
  return ConditionalExpectation(heisenberg_gen, cfg)(a);
}

SuperOperator modular_superop(const qds::DensityMatrix& rho, double t, const ToleranceConfig& cfg) {
  const Observable herm(rho.rho, cfg);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(herm.matrix());
  const auto& w = es.eigenvalues();
  if (w(0) <= cfg.positivity_tol) {
    throw Error(ErrorKind::NotFaithful, "state has eigenvalue " + std::to_string(w(0)));
  }
  ComplexVector phases(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) phases(i) = std::exp(cplx(0.0, t * std::log(w(i))));
  const ComplexMatrix& v = es.eigenvectors();
  const ComplexMatrix u = v * phases.asDiagonal() * v.adjoint();
  return SuperOperator::sandwich(u, u.adjoint());
}

ComplexMatrix modular_flow(const qds::DensityMatrix& rho, double t, const ComplexMatrix& a,
                           const ToleranceConfig& cfg) {
  return modular_superop(rho, t, cfg).apply(a);
}

ModularDiagnostic modular_commutation(const qds::DensityMatrix& rho, const SuperOperator& heisenberg_gen,
                                      std::span<const double> s_grid, std::span<const double> t_grid,
                                      const ToleranceConfig& cfg) {
  ModularDiagnostic out;
  for (double s : s_grid) {
    const SuperOperator sigma = modular_superop(rho, s, cfg);
    for (double t : t_grid) {
      const double r = superop_commutator(sigma, heisenberg_gen.exp(t)).mat().norm();
      out.entries.push_back({s, t, r});
      out.max_residual = std::max(out.max_residual, r);
    }
  }
  return out;
}

NoetherReportQuantum noether_check(const ComplexMatrix& a, const qds::LindbladSpec& spec,
                                   const ToleranceConfig& cfg) {
  const Eigen::Index d = spec.dim();
  if (a.rows() != d || a.cols() != d) throw Error(ErrorKind::DimensionMismatch, "observable dimension differs from spec");
  const SuperOperator heis = qds::lindblad_heisenberg(spec);
  const SuperOperator schr = qds::lindblad_schrodinger(spec);
  const double a_scale = std::max(1.0, a.norm());

  NoetherReportQuantum out;
  out.fixed_point_residual = heis.apply(a).norm();
  out.is_fixed_point = out.fixed_point_residual <= cfg.commute_tol * std::max(1.0, spectral_norm(heis.mat())) * a_scale;

  const cplx i(0.0, 1.0);
  const ComplexMatrix re_part = (a + a.adjoint()) / 2.0;
  const ComplexMatrix im_part = (a - a.adjoint()) / (2.0 * i);
  out.hat_commutes = true;
  for (const ComplexMatrix& part : {re_part, im_part}) {
    const auto r = is_constant_quantum(Observable(part, cfg), schr, cfg);
    out.hat_residual = std::max(out.hat_residual, r.residual);
    out.hat_commutes = out.hat_commutes && r.holds;
  }

  out.commutant_residual = commutant(spec, cfg).distance(a);
  out.in_commutant = out.commutant_residual <= cfg.subspace_tol * a_scale;

  const auto stationary = stationary_state(schr, cfg);
  out.postulate_p_holds = stationary.postulate_p_holds;
  out.min_stationary_eigenvalue = stationary.min_eigenvalue;
  return out;
}

}  // namespace noether
