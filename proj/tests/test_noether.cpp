#include <gtest/gtest.h>

#include "noether_qds/harness.hpp"
#include "noether_qds/noether.hpp"
#include "oracles.hpp"

using namespace noether;
using qds::LindbladSpec;

namespace {

const cplx I1(0.0, 1.0);

ComplexMatrix mat2(cplx a, cplx b, cplx c, cplx d) {
  ComplexMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

const ComplexMatrix id2 = ComplexMatrix::Identity(2, 2);
const ComplexMatrix sx = mat2(0, 1, 1, 0);
const ComplexMatrix sy = mat2(0, -I1, I1, 0);
const ComplexMatrix sz = mat2(1, 0, 0, -1);

LindbladSpec dephasing() { return harness::named_example("dephasing").spec; }
LindbladSpec amplitude_damping() { return harness::named_example("amplitude_damping").spec; }

ComplexMatrix poly_of(const ComplexMatrix& a, const std::vector<double>& c) {
  ComplexMatrix out = ComplexMatrix::Zero(a.rows(), a.cols());
  ComplexMatrix power = ComplexMatrix::Identity(a.rows(), a.cols());
  for (double ck : c) {
    out += ck * power;
    power = power * a;
  }
  return out;
}

}  // namespace

TEST(Polynomial, Horner) {
  const std::vector<double> c{1.0, -2.0, 0.5};
  EXPECT_DOUBLE_EQ(eval_polynomial(c, 3.0), 1.0 - 6.0 + 4.5);
  EXPECT_DOUBLE_EQ(eval_polynomial({}, 3.0), 0.0);
}

TEST(HatMap, IdentityPolynomialOnPauliZ) {
  const std::vector<double> f{0.0, 1.0};
  const auto map = hat_map(Observable(sz), f);
  EXPECT_LT((map.apply(id2) - sz).norm(), 1e-15);
}

TEST(HatMap, ConstantPolynomialIsPinching) {
  auto rng = harness::make_rng(31);
  const ComplexMatrix a = harness::random_hermitian(4, rng);
  const ComplexMatrix rho = harness::random_density(4, rng);
  const std::vector<double> one{1.0};
  const auto map = hat_map(Observable(a), one);
  ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
  for (const auto& p : map.spectrum.projectors) expected += p * rho * p;
  EXPECT_LT((map.apply(rho) - expected).norm(), 1e-12);
  EXPECT_NEAR(map.apply(rho).trace().real(), 1.0, 1e-12);
}

TEST(HatMap, SquareTraceIdentity) {
  auto rng = harness::make_rng(32);
  const ComplexMatrix a = harness::random_hermitian(4, rng);
  const ComplexMatrix rho = harness::random_density(4, rng);
  const std::vector<double> sq{0.0, 0.0, 1.0};
  const cplx lhs = hat_map(Observable(a), sq).apply(rho).trace();
  const cplx rhs = (a * a * rho).trace();
  EXPECT_LT(std::abs(lhs - rhs), 1e-11);
}

TEST(HatMap, TraceIdentityRandomPolynomials) {
  auto rng = harness::make_rng(33);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index d = 1 + trial % 6;
    const ComplexMatrix a = harness::random_hermitian(d, rng);
    const ComplexMatrix rho = harness::random_density(d, rng);
    std::vector<double> f(std::size_t(1 + trial % 4));
    for (double& c : f) c = normal(rng);
    const cplx lhs = hat_map(Observable(a), f).apply(rho).trace();
    const cplx rhs = (poly_of(a, f) * rho).trace();
    EXPECT_LT(std::abs(lhs - rhs), 1e-10 * std::max(1.0, std::abs(rhs)));
  }
}

TEST(HatMap, RejectsNonHermitian) { EXPECT_THROW(Observable(mat2(0, 1, 0, 0)), Error); }

TEST(SuperopCommutator, Examples) {
  const auto gen = qds::lindblad_schrodinger(dephasing());
  EXPECT_EQ(superop_commutator(gen, gen).mat().norm(), 0.0);
  const std::vector<double> f{0.0, 1.0};
  EXPECT_LT(superop_commutator(hat_map(Observable(sz), f).superop, gen).mat().norm(), 1e-14);
  EXPECT_GT(superop_commutator(hat_map(Observable(sx), f).superop, gen).mat().norm(), 0.1);
  EXPECT_THROW(superop_commutator(gen, qds::SuperOperator::identity(3)), Error);
}

TEST(IsConstant, Examples) {
  const auto gen = qds::lindblad_schrodinger(dephasing());
  EXPECT_TRUE(is_constant_quantum(Observable(sz), gen).holds);
  const auto bad = is_constant_quantum(Observable(sx), gen);
  EXPECT_FALSE(bad.holds);
  EXPECT_GT(bad.residual, 0.1);
  auto rng = harness::make_rng(34);
  const LindbladSpec spec(harness::random_hermitian(3, rng), {harness::random_complex(3, 3, rng)});
  EXPECT_TRUE(is_constant_quantum(Observable(ComplexMatrix::Identity(3, 3)), qds::lindblad_schrodinger(spec)).holds);
}

TEST(FixedPoints, Dephasing) {
  const auto fp = fixed_points(qds::lindblad_heisenberg(dephasing()));
  EXPECT_EQ(fp.dim(), 2);
  EXPECT_TRUE(fp.closed_under_product());
  EXPECT_TRUE(fp.closed_under_adjoint());
  EXPECT_TRUE(fp.contains_identity());
  EXPECT_LT(subspace_distance(fp, OperatorSubspace::from_operators({id2, sz})), 1e-12);
}

TEST(FixedPoints, AmplitudeDamping) {
  const auto fp = fixed_points(qds::lindblad_heisenberg(amplitude_damping()));
  EXPECT_EQ(fp.dim(), 1);
  EXPECT_LT(subspace_distance(fp, OperatorSubspace::from_operators({id2})), 1e-12);
}

TEST(FixedPoints, UnitaryOnly) {
  const auto fp = fixed_points(qds::lindblad_heisenberg(LindbladSpec(sz, {})));
  EXPECT_LT(subspace_distance(fp, OperatorSubspace::from_operators({id2, sz})), 1e-12);
}

TEST(FixedPoints, MatchesLuKernelDimension) {
  for (int trial = 0; trial < 20; ++trial) {
    const harness::BlockStructure blocks = trial % 2 ? harness::BlockStructure{{1, 2}, {1, 1}}
                                                     : harness::BlockStructure{{2, 1}, {1, 1}};
    const auto spec = harness::gen_structured_lindblad(blocks, 100 + std::uint64_t(trial));
    const auto heis = qds::lindblad_heisenberg(spec);
    EXPECT_EQ(fixed_points(heis).dim(), oracle::lu_kernel_dim(heis.mat(), 1e-9));
  }
}

TEST(Commutant, PauliZ) {
  const std::vector<ComplexMatrix> gens{sz};
  const auto c = commutant(2, gens);
  EXPECT_EQ(c.dim(), 2);
  EXPECT_LT(subspace_distance(c, OperatorSubspace::from_operators({id2, sz})), 1e-9);
  EXPECT_LT(subspace_distance(c, OperatorSubspace::from_vectors(2, oracle::commutant_kernel(gens, 2))), 1e-9);
}

TEST(Commutant, PauliXandZ) {
  const std::vector<ComplexMatrix> gens{sx, sz};
  const auto c = commutant(2, gens);
  EXPECT_EQ(c.dim(), 1);
  EXPECT_LT(subspace_distance(c, OperatorSubspace::from_operators({id2})), 1e-12);
}

TEST(Commutant, EmptyIsEverything) {
  const auto c = commutant(3, std::span<const ComplexMatrix>{});
  EXPECT_EQ(c.dim(), 9);
}

TEST(Commutant, AdjointsAreIncluded) {
  // Commuting with the lowering operator alone allows a + b*lower; with its
  // adjoint added only multiples of I survive.
  const std::vector<ComplexMatrix> gens{mat2(0, 1, 0, 0)};
  EXPECT_EQ(commutant(2, gens).dim(), 1);
}

TEST(Commutant, DimensionMismatch) {
  const std::vector<ComplexMatrix> gens{sz, ComplexMatrix::Identity(3, 3)};
  EXPECT_THROW(commutant(2, gens), Error);
}

TEST(Commutant, AlwaysAnAlgebra) {
  auto rng = harness::make_rng(36);
  for (int trial = 0; trial < 15; ++trial) {
    const Eigen::Index d = 2 + trial % 4;
    std::vector<ComplexMatrix> gens;
    for (int k = 0; k < trial % 3; ++k) gens.push_back(harness::random_complex(d, d, rng));
    const auto c = commutant(d, gens);
    EXPECT_TRUE(c.contains_identity());
    EXPECT_TRUE(c.closed_under_adjoint());
    EXPECT_TRUE(c.closed_under_product());
  }
}

TEST(Stationary, Dephasing) {
  const auto r = stationary_state(qds::lindblad_schrodinger(dephasing()));
  EXPECT_TRUE(r.postulate_p_holds);
  EXPECT_EQ(r.kernel_dim, 2);
  EXPECT_LT((r.candidate.rho - id2 / 2.0).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Stationary, AmplitudeDamping) {
  const auto r = stationary_state(qds::lindblad_schrodinger(amplitude_damping()));
  EXPECT_FALSE(r.postulate_p_holds);
  EXPECT_LE(r.min_eigenvalue, 1e-9);
  EXPECT_LT((r.candidate.rho - mat2(1, 0, 0, 0)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Stationary, UnitaryOnly) {
  auto rng = harness::make_rng(37);
  const ComplexMatrix h = harness::random_hermitian(4, rng);
  const auto r = stationary_state(qds::lindblad_schrodinger(LindbladSpec(h, {})));
  EXPECT_TRUE(r.postulate_p_holds);
  EXPECT_LT((r.candidate.rho - ComplexMatrix::Identity(4, 4) / 4.0).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Stationary, CandidateIsStationaryDensity) {
  auto rng = harness::make_rng(38);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index d = 2 + trial % 4;
    const LindbladSpec spec(harness::random_hermitian(d, rng), {harness::random_complex(d, d, rng)});
    const auto gen = qds::lindblad_schrodinger(spec);
    const auto r = stationary_state(gen);
    EXPECT_NEAR(r.candidate.rho.trace().real(), 1.0, 1e-10);
    EXPECT_LT(hermitian_residual(r.candidate.rho), 1e-12);
    EXPECT_LT(gen.apply(r.candidate.rho).norm(), 1e-9);
    EXPECT_EQ(r.postulate_p_holds, r.min_eigenvalue > ToleranceConfig{}.positivity_tol);
  }
}

TEST(Stationary, FaithfulOnStructuredInstances) {
  // Generators that are self-adjoint in the trace pairing keep I/d
  // stationary, so a faithful state exists and the candidate must find one.
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto base = harness::gen_structured_lindblad({{2, 1}, {1, 2}}, seed);
    std::vector<ComplexMatrix> ops;
    for (const auto& l : base.lindblad_ops()) ops.push_back(l + l.adjoint());
    const LindbladSpec spec(base.hamiltonian(), ops);
    EXPECT_TRUE(stationary_state(qds::lindblad_schrodinger(spec)).postulate_p_holds);
  }
}

TEST(Ergodic, JordanBlockAtZeroIsRejected) {
  ComplexMatrix n = ComplexMatrix::Zero(4, 4);
  n(0, 3) = 1.0;
  try {
    ergodic_projection(qds::SuperOperator(2, n));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonSemisimpleZeroEigenvalue);
  }
}

TEST(Ergodic, IsIdempotentAndMatchesTimeAverage) {
  const auto gen = qds::lindblad_schrodinger(dephasing());
  const auto p = ergodic_projection(gen);
  EXPECT_LT((p.projector.mat() * p.projector.mat() - p.projector.mat()).norm(), 1e-12);
  const ComplexVector x = vec(ComplexMatrix(mat2(0.3, 0.2, 0.2, 0.7)));
  const ComplexMatrix avg = oracle::time_average(gen.mat(), x, 50.0, 50.0);
  EXPECT_LT((p.projector.mat() * x - avg).norm(), 1e-9);
}

TEST(SpectralGap, Dephasing) {
  EXPECT_NEAR(spectral_gap(qds::lindblad_schrodinger(dephasing())), 2.0, 1e-12);
  EXPECT_NEAR(spectral_gap(qds::lindblad_schrodinger(amplitude_damping())), 0.5, 1e-12);
}

TEST(ConditionalExpectation, DephasingExamples) {
  const auto heis = qds::lindblad_heisenberg(dephasing());
  EXPECT_LT(conditional_expectation(sx, heis).norm(), 1e-12);
  const ComplexMatrix diag = mat2(2, 0, 0, 5);
  EXPECT_LT((conditional_expectation(diag, heis) - diag).norm(), 1e-12);
  EXPECT_LT((conditional_expectation(id2, heis) - id2).norm(), 1e-12);
}

TEST(ConditionalExpectation, PostulateFailure) {
  try {
    conditional_expectation(sx, qds::lindblad_heisenberg(amplitude_damping()));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::PostulateFailed);
  }
}

TEST(ConditionalExpectation, ModuleIdentityAndCommutation) {
  auto rng = harness::make_rng(39);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto spec = harness::gen_structured_lindblad({{1, 2}, {2, 1}}, 40 + seed);
    const auto heis = qds::lindblad_heisenberg(spec);
    const ConditionalExpectation e(heis);
    const auto fp = fixed_points(heis);
    const ComplexMatrix& rho = e.stationary().candidate.rho;
    const ComplexMatrix a = harness::random_complex(4, 4, rng);
    const ComplexMatrix ea = e(a);
    EXPECT_LT(fp.distance(ea), 1e-9);
    EXPECT_LT((e(ea) - ea).norm(), 1e-9);
    for (const auto& m : fp.basis()) {
      EXPECT_LT(std::abs((rho * m * ea).trace() - (rho * m * a).trace()), 1e-9);
    }
    for (double t : default_time_grid()) {
      const auto jt = heis.exp(t);
      EXPECT_LT(superop_commutator(e.superop(), jt).mat().norm(), 1e-8);
    }
  }
}

TEST(Modular, MaximallyMixedIsTrivial) {
  const auto rho = qds::DensityMatrix::validated(ComplexMatrix::Identity(3, 3) / 3.0);
  auto rng = harness::make_rng(40);
  const ComplexMatrix a = harness::random_complex(3, 3, rng);
  EXPECT_LT((modular_flow(rho, 1.7, a) - a).norm(), 1e-12);
}

TEST(Modular, DiagonalStatePhases) {
  const double p = 0.3;
  const auto rho = qds::DensityMatrix::validated(mat2(p, 0, 0, 1 - p));
  const double t = 0.8;
  const ComplexMatrix out = modular_flow(rho, t, sx);
  const cplx phase = std::exp(I1 * t * std::log(p / (1 - p)));
  EXPECT_LT(std::abs(out(0, 1) - phase), 1e-12);
  EXPECT_LT(std::abs(out(1, 0) - std::conj(phase)), 1e-12);
  EXPECT_NEAR(std::abs(out(0, 1)), 1.0, 1e-14);
  EXPECT_LT((modular_flow(rho, t, sz) - sz).norm(), 1e-14);
}

TEST(Modular, RequiresFaithfulState) {
  const auto rho = qds::DensityMatrix::validated(mat2(1, 0, 0, 0));
  try {
    modular_flow(rho, 1.0, sx);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotFaithful);
  }
}

TEST(Modular, CommutationDiagnosticIsReported) {
  const auto rho = qds::DensityMatrix::validated(id2 / 2.0);
  const std::vector<double> grid{0.0, 0.5, 1.0};
  const auto diag = modular_commutation(rho, qds::lindblad_heisenberg(dephasing()), grid, grid);
  EXPECT_EQ(diag.entries.size(), 9u);
  EXPECT_LT(diag.max_residual, 1e-12);
}

TEST(NoetherCheck, Dephasing) {
  const auto z = noether_check(sz, dephasing());
  EXPECT_TRUE(z.is_fixed_point && z.hat_commutes && z.in_commutant && z.postulate_p_holds);
  const auto x = noether_check(sx, dephasing());
  EXPECT_FALSE(x.is_fixed_point || x.hat_commutes || x.in_commutant);
}

TEST(NoetherCheck, IdentityAlwaysConserved) {
  auto rng = harness::make_rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index d = 1 + trial % 5;
    const LindbladSpec spec(harness::random_hermitian(d, rng), {harness::random_complex(d, d, rng)});
    const auto r = noether_check(ComplexMatrix::Identity(d, d), spec);
    EXPECT_TRUE(r.is_fixed_point && r.hat_commutes && r.in_commutant);
  }
}

TEST(NoetherCheck, NonHermitianConstant) {
  // sz + i I lies in the dephasing constants; sx + i sz does not.
  const auto good = noether_check(ComplexMatrix(sz + I1 * id2), dephasing());
  EXPECT_TRUE(good.is_fixed_point && good.hat_commutes && good.in_commutant);
  const auto bad = noether_check(ComplexMatrix(sx + I1 * sz), dephasing());
  EXPECT_FALSE(bad.is_fixed_point || bad.hat_commutes || bad.in_commutant);
}

TEST(NoetherCheck, DissipationIdentityOnCommutant) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto spec = harness::gen_structured_lindblad({{2, 1}, {1, 2}}, 70 + seed);
    const auto heis = qds::lindblad_heisenberg(spec);
    auto rng = harness::make_rng(70 + seed);
    ComplexMatrix a = ComplexMatrix::Zero(4, 4);
    for (const auto& b : harness::structured_commutant_basis({{2, 1}, {1, 2}}))
      a += std::normal_distribution<double>()(rng) * b;
    a = (a + a.adjoint()).eval() / 2.0;
    const ComplexMatrix la = heis.apply(a);
    EXPECT_LT((heis.apply(a * a) - la * a - a * la).norm(), 1e-10);
  }
}
