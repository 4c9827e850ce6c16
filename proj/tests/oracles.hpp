#pragma once

// Independent reference computations used only by the tests.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "gwd/grid.hpp"

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

// Gaussian elimination with partial pivoting; nullopt when singular.
inline std::optional<std::vector<double>> gauss_solve(Matrix a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) < 1e-12) return std::nullopt;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      double f = a[r][col] / a[col][col];
      for (std::size_t k = col; k < n; ++k) a[r][k] -= f * a[col][k];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return x;
}

// min c.x s.t. A x = b, x >= 0 by enumerating every basis. A must have full
// row rank. Returns +inf when infeasible.
inline double vertex_enumeration(const std::vector<double>& c, const Matrix& A, const std::vector<double>& b) {
  const std::size_t m = A.size();
  const std::size_t n = c.size();
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> pick(m);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t depth, std::size_t start) {
    if (depth == m) {
      Matrix B(m, std::vector<double>(m));
      for (std::size_t r = 0; r < m; ++r)
        for (std::size_t k = 0; k < m; ++k) B[r][k] = A[r][pick[k]];
      auto xb = gauss_solve(B, b);
      if (!xb) return;
      double v = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        if ((*xb)[k] < -1e-10) return;
        v += c[pick[k]] * (*xb)[k];
      }
      best = std::min(best, v);
      return;
    }
    for (std::size_t j = start; j + (m - depth) <= n; ++j) {
      pick[depth] = j;
      rec(depth + 1, j + 1);
    }
  };
  rec(0, 0);
  return best;
}

// Boundary-reservoir distance for p = 1 in one dimension: the flux through
// interface j carries the cumulative unbalance F_j plus a constant t injected
// by the reservoirs; the optimal t is minus the median of F.
inline double fg_median_formula(const gwd::DiscreteMeasure& ms, const gwd::DiscreteMeasure& md) {
  const std::size_t n = ms.size();
  std::vector<double> f;
  double cum = 0.0;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    cum += ms[j] - md[j];
    f.push_back(cum);
  }
  std::vector<double> sorted = f;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  double t = -sorted[sorted.size() / 2];
  double s = 0.0;
  for (double v : f) s += std::abs(v + t);
  return ms.grid().dx() * s;
}

inline std::vector<double> random_masses(std::mt19937_64& rng, std::size_t n, double sparsity, bool empty_boundary) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> m(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (empty_boundary && (i == 0 || i + 1 == n)) continue;
    if (u(rng) < sparsity) m[i] = u(rng);
  }
  return m;
}

inline std::vector<double> normalized_to(std::vector<double> m, double total) {
  double s = 0.0;
  for (double v : m) s += v;
  if (s > 0.0)
    for (double& v : m) v *= total / s;
  return m;
}

}  // namespace oracle
