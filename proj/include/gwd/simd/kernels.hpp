#pragma once

// Data-parallel inner loops shared by the solvers. Every kernel has a scalar
// reference implementation; an AVX2/FMA variant is selected at runtime when
// the CPU supports it. Set GWD_ISA=scalar in the environment to force the
// reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace gwd::simd {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

struct KernelTable {
  Isa isa;
  // y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);
  // sum_j | sum_{i<=j} (a_i - b_i) |
  double (*abs_cumulative_difference)(const double* a, const double* b, std::size_t n);
  // out_i = Godunov flux of rho(1-rho) between left_i and right_i
  void (*godunov_flux)(const double* left, const double* right, double* out, std::size_t n);
  // slack_k = cost_k - shift - psi_k; inv_slack_k = 1 / slack_k. Returns min slack.
  double (*barrier_row)(const double* cost, double shift, const double* psi, double* inv_slack, std::size_t n);
  // sum_i w_i * (r_i + s_i - 2 sqrt(r_i s_i) g_i)
  double (*cone_cost)(const double* w, const double* r, const double* s, const double* g, std::size_t n);
};

const KernelTable& scalar_kernels();
/// nullptr when the binary was built without AVX2 support or the CPU lacks it.
const KernelTable* avx2_kernels();

/// Best ISA the running CPU supports, honouring GWD_ISA.
Isa detect_isa();
const KernelTable& kernels();
/// Override the active table (tests and benchmarking). Throws if unavailable.
void select_isa(Isa isa);

inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  kernels().axpy(a, x.data(), y.data(), x.size());
}
inline double dot(std::span<const double> x, std::span<const double> y) {
  return kernels().dot(x.data(), y.data(), x.size());
}

}  // namespace gwd::simd
