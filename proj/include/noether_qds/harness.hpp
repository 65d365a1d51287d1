#pragma once

// Seeded instance generators and the batch verifier that checks the
// classical and quantum equivalences on them.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "noether_qds/classical.hpp"
#include "noether_qds/noether.hpp"
#include "noether_qds/qds.hpp"

namespace noether::harness {

using Rng = std::mt19937_64;

// Deterministic per-trial stream derived from a base seed.
Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

// Independent standard-normal real and imaginary parts.
ComplexMatrix random_complex(Eigen::Index rows, Eigen::Index cols, Rng& rng);
ComplexMatrix random_hermitian(Eigen::Index d, Rng& rng);
// Wishart-type sample normalized to unit trace.
ComplexMatrix random_density(Eigen::Index d, Rng& rng);

// Off-diagonal rates are kept with probability 1 - sparsity and drawn from
// {1/64, ..., 2}; the diagonal is the negated column sum, so column sums
// vanish exactly in floating point.
classical::ClassicalGenerator gen_random_classical(Eigen::Index d, double sparsity, std::uint64_t seed);

// (n_i, m_i) pairs describing the algebra (+)_i M_{n_i} (x) I_{m_i}.
using BlockStructure = std::vector<std::pair<int, int>>;

// Throws InvalidBlocks for empty or nonpositive blocks, or when `d` is
// given and differs from sum n_i m_i.
Eigen::Index block_dimension(const BlockStructure& blocks, std::optional<Eigen::Index> d = std::nullopt);

// H and `num_ops` Lindblad operators drawn from (+)_i M_{n_i} (x) I_{m_i};
// the commutant then contains (+)_i I_{n_i} (x) M_{m_i}.
qds::LindbladSpec gen_structured_lindblad(const BlockStructure& blocks, std::uint64_t seed, int num_ops = 2);

// Basis of (+)_i I_{n_i} (x) M_{m_i}.
std::vector<ComplexMatrix> structured_commutant_basis(const BlockStructure& blocks);

// H = 0 and L_xy = sqrt(M_xy) |x><y| for every positive off-diagonal rate.
qds::LindbladSpec classical_embedding(const classical::ClassicalGenerator& gen);

struct NamedExample {
  std::string name;
  qds::LindbladSpec spec;
  int fixed_point_dim;
  bool postulate_p;
};

// dephasing, amplitude_damping, unitary_only, depolarizing.
std::vector<std::string> named_example_names();
NamedExample named_example(const std::string& name);

enum class RecipeKind { random_classical, random_lindblad, structured_commutant, classical_embedding, named_example };

std::string to_string(RecipeKind kind);
std::optional<RecipeKind> recipe_kind_from_string(const std::string& s);

struct InstanceRecipe {
  RecipeKind kind = RecipeKind::random_classical;
  // Fixed dimension; 0 lets random kinds sample d in [d_min, d_max].
  Eigen::Index d = 0;
  Eigen::Index d_min = 2;
  Eigen::Index d_max = 6;
  BlockStructure blocks;
  std::uint64_t seed = 0;
  // Negative means "sample per trial".
  double sparsity = -1.0;
  int trials = 1;
  std::string name;

  // Throws InvalidBlocks / InvalidArgument.
  void validate() const;
};

struct InstanceFailure {
  int index;
  std::string message;
};

struct SuiteSummary {
  std::string name;
  int trials = 0;
  int passed = 0;
  // Counts of instances skipped because Postulate (P) failed where it is
  // a precondition of the checked statement.
  int skipped = 0;
  std::vector<InstanceFailure> failures;
  // Largest residual observed per named check.
  std::vector<std::pair<std::string, double>> max_residuals;

  bool ok() const noexcept { return failures.empty(); }
};

struct VerificationReport {
  std::vector<SuiteSummary> suites;
  bool ok() const noexcept;
};

SuiteSummary run_recipe(const InstanceRecipe& recipe, const ToleranceConfig& cfg = {});
VerificationReport verify_equivalences(const std::vector<InstanceRecipe>& recipes, const ToleranceConfig& cfg = {});

// Built-in batch: 200 classical, 50 structured, 100 embedding trials and the
// named examples. `trials` overrides every per-suite count when set.
std::vector<InstanceRecipe> builtin_suite(std::uint64_t seed, std::optional<int> trials = std::nullopt);

}  // namespace noether::harness
