#include "noether_qds/harness.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace noether::harness {

namespace {

constexpr double kEmbeddingTol = 1e-9;
constexpr double kSubspaceTol = 1e-8;
constexpr double kGridFixedTol = 1e-9;
constexpr double kDissipationTol = 1e-10;
constexpr double kModuleTol = 1e-9;
constexpr double kCommutationTol = 1e-8;
constexpr double kRelaxationTol = 1e-6;
constexpr double kTraceAnnihilationTol = 1e-11;
constexpr double kStructureTol = 1e-12;
constexpr double kConservationTol = 1e-10;

void note(SuiteSummary& s, const std::string& key, double value) {
  for (auto& [k, v] : s.max_residuals) {
    if (k == key) {
      v = std::max(v, value);
      return;
    }
  }
  s.max_residuals.emplace_back(key, value);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

// Collects the failed checks of one instance.
class Checks {
 public:
  void require(bool ok, const std::string& what) {
    if (!ok) failed_.push_back(what);
  }
  bool ok() const { return failed_.empty(); }
  std::string message() const {
    std::string out;
    for (const auto& f : failed_) out += (out.empty() ? "" : "; ") + f;
    return out;
  }

 private:
  std::vector<std::string> failed_;
};

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

double random_sparsity(Rng& rng) {
  static constexpr double levels[] = {0.0, 0.3, 0.5, 0.7, 0.9};
  return levels[uniform_int(rng, 0, 4)];
}

BlockStructure random_blocks(Rng& rng, Eigen::Index d_max) {
  for (;;) {
    BlockStructure blocks;
    const int count = uniform_int(rng, 1, 3);
    for (int i = 0; i < count; ++i) blocks.emplace_back(uniform_int(rng, 1, 3), uniform_int(rng, 1, 2));
    const auto d = block_dimension(blocks);
    if (d >= 2 && d <= d_max) return blocks;
  }
}

Eigen::Index sample_dimension(const InstanceRecipe& r, Rng& rng) {
  return r.d > 0 ? r.d : uniform_int(rng, int(r.d_min), int(r.d_max));
}

ComplexMatrix random_element(const OperatorSubspace& space, Rng& rng) {
  ComplexVector coeffs = random_complex(space.dim(), 1, rng);
  ComplexMatrix a = unvec(ComplexVector(space.basis_vectors() * coeffs), space.dim_hilbert());
  a = (a + a.adjoint()) / 2.0;
  return a / std::max(a.norm(), 1e-300);
}

RealVector class_constant_variable(const classical::ClassPartition& part, Eigen::Index d, Rng& rng) {
  RealVector a(d);
  std::normal_distribution<double> normal;
  for (const auto& block : part.classes) {
    const double v = normal(rng);
    for (int x : block) a(x) = v;
  }
  return a;
}

RealVector generic_variable(Eigen::Index d, Rng& rng) {
  RealVector a(d);
  std::normal_distribution<double> normal;
  for (Eigen::Index i = 0; i < d; ++i) a(i) = normal(rng);
  return a;
}

// tr{f(A) rho} invariance for f(x) = x + x^2 + x^3.
double distribution_drift(const ComplexMatrix& a, const SuperOperator& schr, const ComplexMatrix& rho,
                          std::span<const double> grid) {
  const ComplexMatrix fa = a + a * a + a * a * a;
  const cplx base = (fa * rho).trace();
  double drift = 0.0;
  for (double t : grid) drift = std::max(drift, std::abs((fa * qds::evolve(schr, rho, t)).trace() - base));
  return drift;
}

double grid_fixed_residual(const ComplexMatrix& a, const SuperOperator& heis, std::span<const double> grid) {
  double r = 0.0;
  for (double t : grid) r = std::max(r, (qds::evolve(heis, a, t) - a).norm());
  return r;
}

void run_classical_trial(const InstanceRecipe& recipe, int index, const ToleranceConfig& cfg, SuiteSummary& s,
                         Checks& c) {
  Rng rng = make_rng(recipe.seed, std::uint64_t(index));
  const Eigen::Index d = sample_dimension(recipe, rng);
  const double sparsity = recipe.sparsity >= 0.0 ? recipe.sparsity : random_sparsity(rng);
  const auto gen = gen_random_classical(d, sparsity, rng());
  classical::ClassicalGenerator::validate(gen.matrix(), cfg);
  const auto part = classical::communication_classes(gen);
  const auto grid = default_time_grid();

  for (int variant = 0; variant < 2; ++variant) {
    const RealVector a = variant == 0 ? class_constant_variable(part, d, rng) : generic_variable(d, rng);
    const auto rep = classical::check_constant(a, gen, cfg, grid);
    note(s, "commutator", variant == 0 ? rep.commutator_residual : 0.0);
    c.require(rep.all_agree(), "four conditions disagree (variant " + std::to_string(variant) + ")");
    const bool expected = variant == 0 || part.size() == std::size_t(d);
    c.require(rep.is_constant() == expected, "unexpected constancy verdict (variant " + std::to_string(variant) + ")");

    const RealMatrix& m = gen.matrix();
    const RealMatrix comm = commutator(classical::hat_diag(a), m);
    RealMatrix entrywise(d, d);
    for (Eigen::Index x = 0; x < d; ++x)
      for (Eigen::Index y = 0; y < d; ++y) entrywise(x, y) = (a(x) - a(y)) * m(x, y);
    const double structure = (comm - entrywise).cwiseAbs().maxCoeff();
    note(s, "commutator_structure", structure);
    c.require(structure <= kStructureTol, "commutator entrywise structure " + fmt(structure));
  }
  for (double t : grid) {
    const RealMatrix tt = classical::transition(gen, t);
    const double cons = (tt.colwise().sum().array() - 1.0).abs().maxCoeff();
    note(s, "conservation", cons);
    c.require(cons <= kConservationTol, "probability not conserved " + fmt(cons));
  }
}

void run_lindblad_trial(const InstanceRecipe& recipe, int index, const ToleranceConfig& cfg, SuiteSummary& s,
                        Checks& c, bool& skipped) {
  Rng rng = make_rng(recipe.seed, std::uint64_t(index));
  BlockStructure blocks = recipe.blocks;
  if (recipe.kind == RecipeKind::random_lindblad) {
    blocks = {{int(sample_dimension(recipe, rng)), 1}};
  } else if (blocks.empty()) {
    blocks = random_blocks(rng, recipe.d_max);
  }
  const auto spec = gen_structured_lindblad(blocks, rng());
  const Eigen::Index d = spec.dim();
  const auto schr = qds::lindblad_schrodinger(spec);
  const auto heis = qds::lindblad_heisenberg(spec);
  const auto grid = default_time_grid();

  const ComplexVector vec_id = vec(ComplexMatrix::Identity(d, d));
  const double annihilation = (vec_id.adjoint() * schr.mat()).norm();
  note(s, "trace_annihilation", annihilation);
  c.require(annihilation <= kTraceAnnihilationTol, "generator does not annihilate the trace " + fmt(annihilation));

  const auto stationary = stationary_state(schr, cfg);
  if (!stationary.postulate_p_holds) {
    skipped = true;
    return;
  }

  const auto fixed = fixed_points(heis, cfg);
  const auto comm = commutant(spec, cfg);
  const double dist = subspace_distance(fixed, comm);
  note(s, "fixed_vs_commutant", dist);
  c.require(dist <= kSubspaceTol, "fixed points differ from commutant " + fmt(dist));
  note(s, "algebra_closure", std::max(fixed.adjoint_residual(), fixed.product_residual()));
  c.require(fixed.closed_under_adjoint() && fixed.closed_under_product() && fixed.contains_identity(),
            "fixed points are not a unital *-algebra");
  for (const auto& b : structured_commutant_basis(blocks)) {
    c.require(comm.distance(b) <= kSubspaceTol, "structured commutant element missing");
  }

  const ComplexMatrix inside = random_element(comm, rng);
  const ComplexMatrix outside = random_hermitian(d, rng);
  const ComplexMatrix rho = random_density(d, rng);
  for (const ComplexMatrix* a : {&inside, &outside}) {
    const auto rep = noether_check(*a, spec, cfg);
    c.require(rep.all_agree(), "quantum checks disagree");
    const double grid_res = grid_fixed_residual(*a, heis, grid);
    c.require(rep.hat_commutes == (grid_res <= kGridFixedTol),
              "hat commutation vs grid fixed point mismatch " + fmt(grid_res));
    if (rep.hat_commutes) {
      const double drift = distribution_drift(*a, schr, rho, grid);
      note(s, "distribution_drift", drift);
      c.require(drift <= kGridFixedTol, "constant observable drifts " + fmt(drift));
    }
  }
  c.require(noether_check(inside, spec, cfg).is_fixed_point, "commutant element is not fixed");

  const ComplexMatrix dissipation = heis.apply(inside * inside) - heis.apply(inside) * inside - inside * heis.apply(inside);
  note(s, "dissipation", dissipation.norm());
  c.require(dissipation.norm() <= kDissipationTol, "dissipation identity " + fmt(dissipation.norm()));

  const ConditionalExpectation cond(heis, cfg);
  const ComplexMatrix& rho_hat = cond.stationary().candidate.rho;
  const ComplexMatrix ea = cond(outside);
  double module = 0.0;
  for (const auto& m : fixed.basis()) {
    module = std::max(module, std::abs((rho_hat * m * ea).trace() - (rho_hat * m * outside).trace()));
  }
  note(s, "module_identity", module);
  c.require(module <= kModuleTol, "conditional expectation module identity " + fmt(module));
  c.require(fixed.distance(ea) <= kSubspaceTol, "conditional expectation leaves the fixed points");
  double commute = 0.0;
  for (double t : grid) commute = std::max(commute, superop_commutator(cond.superop(), heis.exp(t)).mat().norm());
  note(s, "condexp_commutation", commute);
  c.require(commute <= kCommutationTol, "conditional expectation does not commute with J_t " + fmt(commute));

  const auto modular = modular_commutation(stationary.candidate, heis, grid, grid, cfg);
  note(s, "modular_commutation(diagnostic)", modular.max_residual);

  if (comm.dim() == 1) {
    const double gap = spectral_gap(schr, cfg);
    const ComplexMatrix evolved = qds::evolve(schr, rho, 50.0 / gap);
    const double dist_eq = trace_norm(ComplexMatrix(evolved - stationary.candidate.rho));
    note(s, "relaxation", dist_eq);
    c.require(dist_eq <= kRelaxationTol, "no relaxation to the stationary state " + fmt(dist_eq));
  }
}

void run_embedding_trial(const InstanceRecipe& recipe, int index, const ToleranceConfig& cfg, SuiteSummary& s,
                         Checks& c) {
  Rng rng = make_rng(recipe.seed, std::uint64_t(index));
  const Eigen::Index d = sample_dimension(recipe, rng);
  const double sparsity = recipe.sparsity >= 0.0 ? recipe.sparsity : random_sparsity(rng);
  const auto gen = gen_random_classical(d, sparsity, rng());
  const auto spec = classical_embedding(gen);
  const auto schr = qds::lindblad_schrodinger(spec);

  RealVector p = generic_variable(d, rng).cwiseAbs();
  p /= p.sum();
  const ComplexMatrix rho = p.cast<cplx>().asDiagonal();
  for (double t : default_time_grid()) {
    const RealVector classical_p = classical::evolve(gen, p, t);
    const ComplexMatrix quantum = qds::evolve(schr, rho, t);
    const double diff = (quantum.diagonal().real() - classical_p).cwiseAbs().maxCoeff();
    note(s, "embedding_evolution", diff);
    c.require(diff <= kEmbeddingTol, "diagonal evolution differs " + fmt(diff));
  }
  const auto part = classical::communication_classes(gen);
  for (int variant = 0; variant < 2; ++variant) {
    const RealVector a = variant == 0 ? class_constant_variable(part, d, rng) : generic_variable(d, rng);
    const bool classical_verdict = classical::check_constant(a, gen, cfg).is_constant();
    const auto q = noether_check(classical::hat_diag(a).cast<cplx>(), spec, cfg);
    c.require(classical_verdict == q.hat_commutes && classical_verdict == q.in_commutant,
              "constancy verdict changes across the embedding (variant " + std::to_string(variant) + ")");
  }
}

void run_named_trial(const InstanceRecipe& recipe, const ToleranceConfig& cfg, SuiteSummary& s, Checks& c) {
  const auto ex = named_example(recipe.name);
  const auto schr = qds::lindblad_schrodinger(ex.spec);
  const auto heis = qds::lindblad_heisenberg(ex.spec);
  const auto stationary = stationary_state(schr, cfg);
  note(s, "stationarity", stationary.stationarity_residual);
  c.require(stationary.postulate_p_holds == ex.postulate_p, "Postulate (P) verdict differs from closed form");
  const auto fixed = fixed_points(heis, cfg);
  c.require(fixed.dim() == ex.fixed_point_dim, "fixed-point dimension " + std::to_string(fixed.dim()));
  if (stationary.postulate_p_holds) {
    const double dist = subspace_distance(fixed, commutant(ex.spec, cfg));
    note(s, "fixed_vs_commutant", dist);
    c.require(dist <= kSubspaceTol, "fixed points differ from commutant " + fmt(dist));
  }
}

}  // namespace

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(stream),
                    std::uint32_t(stream >> 32)};
  return Rng(seq);
}

ComplexMatrix random_complex(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> normal;
  ComplexMatrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      m(i, j) = cplx(re, im);
    }
  return m;
}

ComplexMatrix random_hermitian(Eigen::Index d, Rng& rng) {
  const ComplexMatrix g = random_complex(d, d, rng);
  return (g + g.adjoint()) / 2.0;
}

ComplexMatrix random_density(Eigen::Index d, Rng& rng) {
  const ComplexMatrix g = random_complex(d, d, rng);
  ComplexMatrix rho = g * g.adjoint();
  return rho / rho.trace().real();
}

classical::ClassicalGenerator gen_random_classical(Eigen::Index d, double sparsity, std::uint64_t seed) {
  if (d < 2) throw Error(ErrorKind::InvalidArgument, "classical instances need d >= 2");
  if (!(sparsity >= 0.0 && sparsity <= 1.0)) throw Error(ErrorKind::InvalidArgument, "sparsity must lie in [0, 1]");
  Rng rng = make_rng(seed);
  std::bernoulli_distribution keep(1.0 - sparsity);
  RealMatrix m = RealMatrix::Zero(d, d);
  for (Eigen::Index y = 0; y < d; ++y) {
    for (Eigen::Index x = 0; x < d; ++x) {
      if (x == y) continue;
      // Draw both so the stream does not depend on the sparsity outcome.
      const bool kept = keep(rng);
      const double rate = double(uniform_int(rng, 1, 128)) / 64.0;
      if (kept) m(x, y) = rate;
    }
  }
  for (Eigen::Index y = 0; y < d; ++y) m(y, y) = -(m.col(y).sum());
  return classical::ClassicalGenerator::validate(m);
}

Eigen::Index block_dimension(const BlockStructure& blocks, std::optional<Eigen::Index> d) {
  if (blocks.empty()) throw Error(ErrorKind::InvalidBlocks, "no blocks given");
  Eigen::Index total = 0;
  for (const auto& [n, m] : blocks) {
    if (n < 1 || m < 1) throw Error(ErrorKind::InvalidBlocks, "block sizes must be positive");
    total += Eigen::Index(n) * m;
  }
  if (d && *d != total) {
    throw Error(ErrorKind::InvalidBlocks,
                "blocks span dimension " + std::to_string(total) + " but d = " + std::to_string(*d));
  }
  return total;
}

namespace {

// (+)_i X_i (x) I_{m_i} with X_i of size n_i.
ComplexMatrix block_operator(const BlockStructure& blocks, const std::vector<ComplexMatrix>& parts, bool left) {
  const Eigen::Index d = block_dimension(blocks);
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  Eigen::Index offset = 0;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto [n, m] = blocks[i];
    const Eigen::Index size = Eigen::Index(n) * m;
    out.block(offset, offset, size, size) =
        left ? kron(parts[i], ComplexMatrix::Identity(m, m)) : kron(ComplexMatrix::Identity(n, n), parts[i]);
    offset += size;
  }
  return out;
}

}  // namespace

qds::LindbladSpec gen_structured_lindblad(const BlockStructure& blocks, std::uint64_t seed, int num_ops) {
  block_dimension(blocks);
  Rng rng = make_rng(seed);
  auto sample = [&](bool hermitian) {
    std::vector<ComplexMatrix> parts;
    for (const auto& [n, m] : blocks) parts.push_back(hermitian ? random_hermitian(n, rng) : random_complex(n, n, rng));
    return block_operator(blocks, parts, true);
  };
  ComplexMatrix h = sample(true);
  std::vector<ComplexMatrix> ops;
  for (int k = 0; k < num_ops; ++k) ops.push_back(sample(false));
  return qds::LindbladSpec(std::move(h), std::move(ops));
}

std::vector<ComplexMatrix> structured_commutant_basis(const BlockStructure& blocks) {
  std::vector<ComplexMatrix> out;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const int m = blocks[i].second;
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c) {
        std::vector<ComplexMatrix> parts;
        for (const auto& [nj, mj] : blocks) parts.push_back(ComplexMatrix::Zero(mj, mj));
        parts[i](r, c) = 1.0;
        out.push_back(block_operator(blocks, parts, false));
      }
  }
  return out;
}

qds::LindbladSpec classical_embedding(const classical::ClassicalGenerator& gen) {
  const Eigen::Index d = gen.dim();
  const auto& m = gen.matrix();
  std::vector<ComplexMatrix> ops;
  for (Eigen::Index y = 0; y < d; ++y)
    for (Eigen::Index x = 0; x < d; ++x) {
      if (x == y || m(x, y) <= 0.0) continue;
      ComplexMatrix l = ComplexMatrix::Zero(d, d);
      l(x, y) = std::sqrt(m(x, y));
      ops.push_back(std::move(l));
    }
  return qds::LindbladSpec(ComplexMatrix::Zero(d, d), std::move(ops));
}

std::vector<std::string> named_example_names() {
  return {"dephasing", "amplitude_damping", "unitary_only", "depolarizing"};
}

NamedExample named_example(const std::string& name) {
  const cplx i(0.0, 1.0);
  ComplexMatrix sx(2, 2), sy(2, 2), sz(2, 2), lower(2, 2);
  sx << 0, 1, 1, 0;
  sy << 0, -i, i, 0;
  sz << 1, 0, 0, -1;
  lower << 0, 1, 0, 0;  // |0><1|
  const ComplexMatrix zero = ComplexMatrix::Zero(2, 2);
  if (name == "dephasing") return {name, qds::LindbladSpec(zero, {sz}), 2, true};
  if (name == "amplitude_damping") return {name, qds::LindbladSpec(zero, {lower}), 1, false};
  if (name == "unitary_only") return {name, qds::LindbladSpec(sz, {}), 2, true};
  if (name == "depolarizing") return {name, qds::LindbladSpec(zero, {sx / 2.0, sy / 2.0, sz / 2.0}), 1, true};
  throw Error(ErrorKind::InvalidArgument, "unknown named example '" + name + "'");
}

std::string to_string(RecipeKind kind) {
  switch (kind) {
    case RecipeKind::random_classical: return "random_classical";
    case RecipeKind::random_lindblad: return "random_lindblad";
    case RecipeKind::structured_commutant: return "structured_commutant";
    case RecipeKind::classical_embedding: return "classical_embedding";
    case RecipeKind::named_example: return "named_example";
  }
  return "unknown";
}

std::optional<RecipeKind> recipe_kind_from_string(const std::string& s) {
  for (auto k : {RecipeKind::random_classical, RecipeKind::random_lindblad, RecipeKind::structured_commutant,
                 RecipeKind::classical_embedding, RecipeKind::named_example}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

void InstanceRecipe::validate() const {
  if (trials < 0) throw Error(ErrorKind::InvalidArgument, "trials must be nonnegative");
  if (d != 0 && d < 2) throw Error(ErrorKind::InvalidArgument, "d must be at least 2");
  if (d_min < 2 || d_max < d_min) throw Error(ErrorKind::InvalidArgument, "need 2 <= d_min <= d_max");
  if (sparsity > 1.0) throw Error(ErrorKind::InvalidArgument, "sparsity must lie in [0, 1]");
  if (kind == RecipeKind::structured_commutant && !blocks.empty()) {
    block_dimension(blocks, d > 0 ? std::optional<Eigen::Index>(d) : std::nullopt);
  }
  if (kind == RecipeKind::named_example) {
    const auto names = named_example_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) {
      throw Error(ErrorKind::InvalidArgument, "unknown named example '" + name + "'");
    }
  }
}

SuiteSummary run_recipe(const InstanceRecipe& recipe, const ToleranceConfig& cfg) {
  recipe.validate();
  SuiteSummary s;
  s.name = recipe.kind == RecipeKind::named_example ? "named_example:" + recipe.name : to_string(recipe.kind);
  for (int index = 0; index < recipe.trials; ++index) {
    ++s.trials;
    Checks c;
    bool skipped = false;
    try {
      switch (recipe.kind) {
        case RecipeKind::random_classical: run_classical_trial(recipe, index, cfg, s, c); break;
        case RecipeKind::random_lindblad:
        case RecipeKind::structured_commutant: run_lindblad_trial(recipe, index, cfg, s, c, skipped); break;
        case RecipeKind::classical_embedding: run_embedding_trial(recipe, index, cfg, s, c); break;
        case RecipeKind::named_example: run_named_trial(recipe, cfg, s, c); break;
      }
    } catch (const Error& e) {
      c.require(false, e.what());
    }
    if (skipped && c.ok()) {
      ++s.skipped;
    } else if (c.ok()) {
      ++s.passed;
    } else {
      s.failures.push_back({index, c.message()});
    }
  }
  return s;
}

bool VerificationReport::ok() const noexcept {
  return std::all_of(suites.begin(), suites.end(), [](const SuiteSummary& s) { return s.ok(); });
}

VerificationReport verify_equivalences(const std::vector<InstanceRecipe>& recipes, const ToleranceConfig& cfg) {
  VerificationReport out;
  for (const auto& r : recipes) out.suites.push_back(run_recipe(r, cfg));
  return out;
}

std::vector<InstanceRecipe> builtin_suite(std::uint64_t seed, std::optional<int> trials) {
  std::vector<InstanceRecipe> out;
  auto add = [&](RecipeKind kind, int count, Eigen::Index d_max) {
    InstanceRecipe r;
    r.kind = kind;
    r.seed = seed + out.size();
    r.trials = trials.value_or(count);
    r.d_max = d_max;
    out.push_back(r);
  };
  add(RecipeKind::random_classical, 200, 6);
  add(RecipeKind::structured_commutant, 50, 8);
  add(RecipeKind::random_lindblad, 20, 4);
  add(RecipeKind::classical_embedding, 100, 6);
  for (const auto& name : named_example_names()) {
    InstanceRecipe r;
    r.kind = RecipeKind::named_example;
    r.name = name;
    r.seed = seed;
    r.trials = trials.value_or(1);
    out.push_back(r);
  }
  return out;
}

}  // namespace noether::harness
