#include "scrunch/finite_metric.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace scrunch {

FiniteMetric FiniteMetric::zeros(std::size_t n) {
  FiniteMetric m;
  m.n = n;
  m.d.assign(n * n, 0.0);
  return m;
}

void FiniteMetric::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << n << '\n';
  out.precision(17);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j) out << ',';
      out << at(i, j);
    }
    out << '\n';
  }
}

FiniteMetric FiniteMetric::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string line;
  std::getline(in, line);
  FiniteMetric m = zeros(static_cast<std::size_t>(std::stoul(line)));
  for (std::size_t i = 0; i < m.n; ++i) {
    std::getline(in, line);
    std::stringstream ss(line);
    std::string field;
    for (std::size_t j = 0; j < m.n; ++j) {
      std::getline(ss, field, ',');
      m.at(i, j) = std::stod(field);
    }
  }
  return m;
}

MetricReport check_metric(const FiniteMetric& m, double tol) {
  MetricReport rep;
  const std::size_t n = m.n;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(m.at(i, i)) > tol)
      rep.violations.push_back(
          {MetricViolation::Type::Diagonal, i, i, 0, std::abs(m.at(i, i))});
    for (std::size_t j = i + 1; j < n; ++j) {
      const double asym = std::abs(m.at(i, j) - m.at(j, i));
      if (asym > tol)
        rep.violations.push_back({MetricViolation::Type::Symmetry, i, j, 0, asym});
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        const double excess = m.at(i, j) - m.at(i, k) - m.at(k, j);
        if (excess > tol)
          rep.violations.push_back(
              {MetricViolation::Type::Triangle, i, j, k, excess});
      }
  return rep;
}

namespace {

struct GhSearch {
  const FiniteMetric& X;
  const FiniteMetric& Y;
  std::size_t nx, ny;
  std::vector<int> f;  // X -> Y
  std::vector<int> g;  // Y -> X
  double best = std::numeric_limits<double>::infinity();

  // Distortion contributions are added incrementally; `cur` is the running
  // max for the partial assignment.
  void search_g(std::size_t yi, double cur) {
    if (cur >= best) return;
    if (yi == ny) {
      best = cur;
      return;
    }
    for (std::size_t xi = 0; xi < nx; ++xi) {
      double m = cur;
      // pairs (y', y) among assigned g
      for (std::size_t yj = 0; yj < yi && m < best; ++yj)
        m = std::max(m, std::abs(X.at(static_cast<std::size_t>(g[yj]), xi) -
                                 Y.at(yj, yi)));
      // cross pairs (x, y) between f and the new g entry
      for (std::size_t xj = 0; xj < nx && m < best; ++xj)
        m = std::max(m, std::abs(X.at(xj, xi) -
                                 Y.at(static_cast<std::size_t>(f[xj]), yi)));
      if (m < best) {
        g[yi] = static_cast<int>(xi);
        search_g(yi + 1, m);
      }
    }
  }

  void search_f(std::size_t xi, double cur) {
    if (cur >= best) return;
    if (xi == nx) {
      search_g(0, cur);
      return;
    }
    for (std::size_t yi = 0; yi < ny; ++yi) {
      double m = cur;
      for (std::size_t xj = 0; xj < xi && m < best; ++xj)
        m = std::max(m, std::abs(X.at(xj, xi) -
                                 Y.at(static_cast<std::size_t>(f[xj]), yi)));
      if (m < best) {
        f[xi] = static_cast<int>(yi);
        search_f(xi + 1, m);
      }
    }
  }
};

}  // namespace

double gh_exact_small(const FiniteMetric& X, const FiniteMetric& Y) {
  if (X.n > 7 || Y.n > 7)
    throw std::invalid_argument("gh_exact_small: refuses more than 7 points");
  if (X.n == 0 || Y.n == 0)
    throw std::invalid_argument("gh_exact_small: empty space");
  GhSearch s{X, Y, X.n, Y.n, std::vector<int>(X.n), std::vector<int>(Y.n)};
  s.search_f(0, 0.0);
  return 0.5 * s.best;
}

}  // namespace scrunch
