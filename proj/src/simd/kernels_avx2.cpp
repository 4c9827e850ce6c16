// Compiled with -mavx2 -mfma. Only reached after a runtime CPU check.
#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "gwd/simd/kernels.hpp"

namespace gwd::simd {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

inline double hmin(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_min_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_min_sd(lo, swapped));
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

double abs_cumulative_difference_avx2(const double* a, const double* b, std::size_t n) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  __m256d carry = _mm256_setzero_pd();
  __m256d total = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    // In-register inclusive scan: [d0, d0+d1, d0+d1+d2, d0+..+d3].
    __m256d shifted1 = _mm256_blend_pd(_mm256_permute4x64_pd(d, 0x90), _mm256_setzero_pd(), 0x1);
    d = _mm256_add_pd(d, shifted1);
    __m256d shifted2 = _mm256_permute2f128_pd(d, d, 0x08);
    d = _mm256_add_pd(d, shifted2);
    d = _mm256_add_pd(d, carry);
    carry = _mm256_permute4x64_pd(d, 0xFF);
    total = _mm256_add_pd(total, _mm256_andnot_pd(sign_mask, d));
  }
  double running = _mm256_cvtsd_f64(carry);
  double s = hsum(total);
  for (; i < n; ++i) {
    running += a[i] - b[i];
    s += std::abs(running);
  }
  return s;
}

void godunov_flux_avx2(const double* left, const double* right, double* out, std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d quarter = _mm256_set1_pd(0.25);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d l = _mm256_loadu_pd(left + i);
    __m256d r = _mm256_loadu_pd(right + i);
    __m256d fl = _mm256_mul_pd(l, _mm256_sub_pd(one, l));
    __m256d fr = _mm256_mul_pd(r, _mm256_sub_pd(one, r));
    __m256d lo = _mm256_min_pd(fl, fr);
    __m256d hi = _mm256_max_pd(fl, fr);
    __m256d spans_peak = _mm256_and_pd(_mm256_cmp_pd(r, half, _CMP_LE_OQ), _mm256_cmp_pd(half, l, _CMP_LE_OQ));
    __m256d decreasing = _mm256_blendv_pd(hi, quarter, spans_peak);
    __m256d increasing = _mm256_cmp_pd(l, r, _CMP_LE_OQ);
    _mm256_storeu_pd(out + i, _mm256_blendv_pd(decreasing, lo, increasing));
  }
  for (; i < n; ++i) {
    double l = left[i], r = right[i];
    double fl = l * (1.0 - l), fr = r * (1.0 - r);
    if (l <= r) {
      out[i] = std::min(fl, fr);
    } else if (r <= 0.5 && 0.5 <= l) {
      out[i] = 0.25;
    } else {
      out[i] = std::max(fl, fr);
    }
  }
}

double barrier_row_avx2(const double* cost, double shift, const double* psi, double* inv_slack, std::size_t n) {
  const __m256d vshift = _mm256_set1_pd(shift);
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d lowest = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    __m256d s = _mm256_sub_pd(_mm256_sub_pd(_mm256_loadu_pd(cost + k), vshift), _mm256_loadu_pd(psi + k));
    lowest = _mm256_min_pd(lowest, s);
    _mm256_storeu_pd(inv_slack + k, _mm256_div_pd(one, s));
  }
  double m = hmin(lowest);
  for (; k < n; ++k) {
    double s = (cost[k] - shift) - psi[k];
    m = std::min(m, s);
    inv_slack[k] = 1.0 / s;
  }
  return m;
}

double cone_cost_avx2(const double* w, const double* r, const double* s, const double* g, std::size_t n) {
  const __m256d two = _mm256_set1_pd(2.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vr = _mm256_loadu_pd(r + i);
    __m256d vs = _mm256_loadu_pd(s + i);
    __m256d root = _mm256_sqrt_pd(_mm256_mul_pd(vr, vs));
    __m256d term = _mm256_sub_pd(_mm256_add_pd(vr, vs), _mm256_mul_pd(_mm256_mul_pd(two, root), _mm256_loadu_pd(g + i)));
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), term, acc);
  }
  double total = hsum(acc);
  for (; i < n; ++i) total += w[i] * ((r[i] + s[i]) - 2.0 * std::sqrt(r[i] * s[i]) * g[i]);
  return total;
}

}  // namespace

const KernelTable& avx2_table_impl() {
  static const KernelTable table{Isa::avx2,
                                 axpy_avx2,
                                 dot_avx2,
                                 abs_cumulative_difference_avx2,
                                 godunov_flux_avx2,
                                 barrier_row_avx2,
                                 cone_cost_avx2};
  return table;
}

}  // namespace gwd::simd
