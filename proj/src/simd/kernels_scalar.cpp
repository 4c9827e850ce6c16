#include <algorithm>
#include <cmath>
#include <limits>

#include "gwd/simd/kernels.hpp"

namespace gwd::simd {
namespace {

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

double abs_cumulative_difference_scalar(const double* a, const double* b, std::size_t n) {
  double running = 0.0, total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    running += a[i] - b[i];
    total += std::abs(running);
  }
  return total;
}

inline double flux(double rho) { return rho * (1.0 - rho); }

void godunov_flux_scalar(const double* left, const double* right, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double l = left[i], r = right[i];
    double fl = flux(l), fr = flux(r);
    if (l <= r) {
      out[i] = std::min(fl, fr);
    } else if (r <= 0.5 && 0.5 <= l) {
      out[i] = 0.25;
    } else {
      out[i] = std::max(fl, fr);
    }
  }
}

double barrier_row_scalar(const double* cost, double shift, const double* psi, double* inv_slack, std::size_t n) {
  double lowest = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    double s = (cost[k] - shift) - psi[k];
    lowest = std::min(lowest, s);
    inv_slack[k] = 1.0 / s;
  }
  return lowest;
}

double cone_cost_scalar(const double* w, const double* r, const double* s, const double* g, std::size_t n) {
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += w[i] * ((r[i] + s[i]) - 2.0 * std::sqrt(r[i] * s[i]) * g[i]);
  }
  return total;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{Isa::scalar,
                                 axpy_scalar,
                                 dot_scalar,
                                 abs_cumulative_difference_scalar,
                                 godunov_flux_scalar,
                                 barrier_row_scalar,
                                 cone_cost_scalar};
  return table;
}

}  // namespace gwd::simd
