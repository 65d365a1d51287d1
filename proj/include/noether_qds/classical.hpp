#pragma once

// Finite-state classical Markov semigroups T_t = e^{tM} and the four
// equivalent characterizations of a conserved random variable.

#include <span>
#include <vector>

#include "noether_qds/linops.hpp"

namespace noether::classical {

// Rate matrix with nonnegative off-diagonal entries and zero column sums.
// M(x, y) is the rate of jumping from y to x.
class ClassicalGenerator {
 public:
  // Validates and wraps. Throws NegativeOffDiagonal or ColumnSumNonzero
  // (1-based indices in the message).
  static ClassicalGenerator validate(const RealMatrix& m, const ToleranceConfig& cfg = {});

  const RealMatrix& matrix() const noexcept { return m_; }
  Eigen::Index dim() const noexcept { return m_.rows(); }
  // Worst violation of each condition found during validation.
  double min_off_diagonal() const noexcept { return min_off_diag_; }
  double max_column_sum() const noexcept { return max_col_sum_; }

 private:
  ClassicalGenerator(RealMatrix m, double min_off, double max_sum)
      : m_(std::move(m)), min_off_diag_(min_off), max_col_sum_(max_sum) {}

  RealMatrix m_;
  double min_off_diag_;
  double max_col_sum_;
};

// Column-stochastic e^{tM}. Throws NegativeTime for t < 0.
RealMatrix transition(const ClassicalGenerator& gen, double t);

// Evolves a probability vector.
RealVector evolve(const ClassicalGenerator& gen, const RealVector& p, double t);

// diag(A(1), ..., A(d))
RealMatrix hat_diag(const RealVector& a);

// Disjoint blocks of 0-based state indices, each block sorted, blocks
// ordered by smallest member.
struct ClassPartition {
  std::vector<std::vector<int>> classes;

  std::size_t size() const noexcept { return classes.size(); }
  // Block index for every state.
  std::vector<int> labels(Eigen::Index d) const;
};

// Connected components of the graph joining x and y whenever M(x,y) or
// M(y,x) is nonzero (x != y).
ClassPartition communication_classes(const ClassicalGenerator& gen);

struct NoetherReportClassical {
  bool cond_distribution = false;
  bool cond_moments = false;
  bool cond_measurable = false;
  bool cond_commutator = false;

  // Max deviation of level-set probabilities over the time grid.
  double distribution_residual = 0.0;
  // max_y |sum_x A(x)^m M(x,y)| over m = 1, 2.
  double moment_residual = 0.0;
  // Largest spread max(A) - min(A) inside one communication class.
  double measurable_residual = 0.0;
  // ||[hat(A), M]||_F
  double commutator_residual = 0.0;
  ClassPartition classes;

  bool all_agree() const noexcept {
    return cond_distribution == cond_moments && cond_moments == cond_measurable &&
           cond_measurable == cond_commutator;
  }
  bool is_constant() const noexcept {
    return cond_distribution && cond_moments && cond_measurable && cond_commutator;
  }
};

// Evaluates the four conditions independently. `time_grid` feeds the
// distribution-constancy check; empty means default_time_grid().
NoetherReportClassical check_constant(const RealVector& a, const ClassicalGenerator& gen,
                                      const ToleranceConfig& cfg = {},
                                      std::span<const double> time_grid = {});

}  // namespace noether::classical
