#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace scrunch {

// Dense finite metric, row-major n x n.
struct FiniteMetric {
  std::size_t n = 0;
  std::vector<double> d;

  double& at(std::size_t i, std::size_t j) { return d[i * n + j]; }
  double at(std::size_t i, std::size_t j) const { return d[i * n + j]; }

  static FiniteMetric zeros(std::size_t n);

  // CSV: first line n, then one row per line.
  void save_csv(const std::string& path) const;
  static FiniteMetric load_csv(const std::string& path);
};

struct MetricViolation {
  enum class Type { Symmetry, Diagonal, Triangle } type;
  std::size_t i = 0, j = 0, k = 0;
  double magnitude = 0;
};

struct MetricReport {
  std::vector<MetricViolation> violations;
  bool ok() const { return violations.empty(); }
};

// Reports symmetry violations, nonzero diagonal entries and triangle
// inequality violations beyond tol.
MetricReport check_metric(const FiniteMetric& m, double tol = 1e-9);

// Exact Gromov-Hausdorff distance between finite metrics with at most 7
// points: half the minimal distortion over correspondences. A minimizing
// correspondence can always be thinned to graph(f) u graph(g) for maps
// f: X->Y, g: Y->X, so the search runs depth-first over (f, g) with
// branch-and-bound on the running distortion. Throws std::invalid_argument
// for sizes above 7.
double gh_exact_small(const FiniteMetric& X, const FiniteMetric& Y);

}  // namespace scrunch
