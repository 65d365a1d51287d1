#include "noether_qds/classical.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace noether::classical {

namespace {

double max_abs(const RealMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }
double max_abs(const RealVector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

std::string pos(Eigen::Index x, Eigen::Index y) {
  return "(" + std::to_string(x + 1) + "," + std::to_string(y + 1) + ")";
}

// Groups states by value of A; values within `tol` of their sorted
// neighbour share a level set.
std::vector<std::vector<int>> level_sets(const RealVector& a, double tol) {
  std::vector<int> order(std::size_t(a.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return a(i) < a(j); });
  std::vector<std::vector<int>> sets;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k == 0 || a(order[k]) - a(order[k - 1]) > tol) sets.emplace_back();
    sets.back().push_back(order[k]);
  }
  return sets;
}

}  // namespace

ClassicalGenerator ClassicalGenerator::validate(const RealMatrix& m, const ToleranceConfig& cfg) {
  require_square(m, "generator");
  if (!m.allFinite()) throw Error(ErrorKind::InvalidArgument, "generator has non-finite entries");
  const double tol = cfg.positivity_tol * std::max(1.0, max_abs(m));
  const Eigen::Index d = m.rows();

  double min_off = 0.0;
  for (Eigen::Index x = 0; x < d; ++x) {
    for (Eigen::Index y = 0; y < d; ++y) {
      if (x == y) continue;
      min_off = std::min(min_off, m(x, y));
      if (m(x, y) < -tol) {
        throw Error(ErrorKind::NegativeOffDiagonal,
                    "M" + pos(x, y) + " = " + std::to_string(m(x, y)));
      }
    }
  }
  double max_sum = 0.0;
  for (Eigen::Index y = 0; y < d; ++y) {
    const double s = m.col(y).sum();
    max_sum = std::max(max_sum, std::abs(s));
    if (std::abs(s) > tol) {
      throw Error(ErrorKind::ColumnSumNonzero,
                  "column " + std::to_string(y + 1) + " sums to " + std::to_string(s));
    }
  }
  return ClassicalGenerator(m, min_off, max_sum);
}

RealMatrix transition(const ClassicalGenerator& gen, double t) {
  if (t < 0.0) throw Error(ErrorKind::NegativeTime, "t = " + std::to_string(t));
  return matrix_exp(gen.matrix(), t);
}

RealVector evolve(const ClassicalGenerator& gen, const RealVector& p, double t) {
  if (p.size() != gen.dim()) throw Error(ErrorKind::DimensionMismatch, "probability vector length");
  return transition(gen, t) * p;
}

RealMatrix hat_diag(const RealVector& a) { return a.asDiagonal(); }

std::vector<int> ClassPartition::labels(Eigen::Index d) const {
  std::vector<int> out(std::size_t(d), -1);
  for (std::size_t c = 0; c < classes.size(); ++c) {
    for (int x : classes[c]) out[std::size_t(x)] = int(c);
  }
  return out;
}

ClassPartition communication_classes(const ClassicalGenerator& gen) {
  const auto& m = gen.matrix();
  const Eigen::Index d = gen.dim();
  std::vector<int> parent(static_cast<std::size_t>(d));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[std::size_t(x)] != x) {
      parent[std::size_t(x)] = parent[std::size_t(parent[std::size_t(x)])];
      x = parent[std::size_t(x)];
    }
    return x;
  };
  for (Eigen::Index x = 0; x < d; ++x) {
    for (Eigen::Index y = x + 1; y < d; ++y) {
      if (m(x, y) != 0.0 || m(y, x) != 0.0) {
        const int rx = find(int(x));
        const int ry = find(int(y));
        if (rx != ry) parent[std::size_t(std::max(rx, ry))] = std::min(rx, ry);
      }
    }
  }
  ClassPartition out;
  std::vector<int> slot(static_cast<std::size_t>(d), -1);
  for (int x = 0; x < int(d); ++x) {
    const int r = find(x);
    if (slot[std::size_t(r)] < 0) {
      slot[std::size_t(r)] = int(out.classes.size());
      out.classes.emplace_back();
    }
    out.classes[std::size_t(slot[std::size_t(r)])].push_back(x);
  }
  return out;
}

NoetherReportClassical check_constant(const RealVector& a, const ClassicalGenerator& gen,
                                      const ToleranceConfig& cfg, std::span<const double> time_grid) {
  const auto& m = gen.matrix();
  const Eigen::Index d = gen.dim();
  if (a.size() != d) throw Error(ErrorKind::DimensionMismatch, "random variable length differs from d");
  if (!a.allFinite()) throw Error(ErrorKind::InvalidArgument, "random variable has non-finite entries");

  const double scale_a = std::max(1.0, max_abs(a));
  const double scale_m = std::max(1.0, max_abs(m));
  NoetherReportClassical report;

  // (1) Level-set probabilities are time invariant for every initial point mass.
  const auto sets = level_sets(a, cfg.commute_tol * scale_a);
  RealMatrix indicators = RealMatrix::Zero(Eigen::Index(sets.size()), d);
  for (std::size_t k = 0; k < sets.size(); ++k) {
    for (int x : sets[k]) indicators(Eigen::Index(k), x) = 1.0;
  }
  const std::vector<double> fallback = default_time_grid();
  if (time_grid.empty()) time_grid = fallback;
  for (double t : time_grid) {
    const RealMatrix dist = indicators * transition(gen, t);
    report.distribution_residual =
        std::max(report.distribution_residual, max_abs(RealMatrix(dist - indicators)));
  }
  report.cond_distribution = report.distribution_residual <= cfg.commute_tol;

  // (2) First and second moments have zero time derivative.
  for (int power = 1; power <= 2; ++power) {
    const RealVector moment = a.array().pow(power).matrix();
    const RealVector rate = m.transpose() * moment;
    report.moment_residual = std::max(report.moment_residual, max_abs(rate) / std::pow(scale_a, power));
  }
  report.cond_moments = report.moment_residual <= cfg.commute_tol * scale_m;

  // (3) A is constant on each communication class.
  report.classes = communication_classes(gen);
  for (const auto& block : report.classes.classes) {
    double lo = a(block.front());
    double hi = lo;
    for (int x : block) {
      lo = std::min(lo, a(x));
      hi = std::max(hi, a(x));
    }
    report.measurable_residual = std::max(report.measurable_residual, hi - lo);
  }
  report.cond_measurable = report.measurable_residual <= cfg.commute_tol * scale_a;

  // (4) [hat(A), M] = 0
  const RealMatrix ahat = hat_diag(a);
  report.commutator_residual = commutator(ahat, m).norm();
  report.cond_commutator = report.commutator_residual <= cfg.commute_tol * scale_a * scale_m;
  return report;
}

}  // namespace noether::classical
