#include "hrl/kernels.hpp"

// AVX2+FMA kernel variants (4-wide doubles). Only built into the binary
// when the toolchain targets x86-64 and real == double; selection against
// the CPU happens at runtime in kernels.cpp.

#if defined(HRL_HAVE_AVX2_TU) && !defined(HRL_REAL_FLOAT)

#include <immintrin.h>

namespace hrl::kern {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

double dot_avx2(const double* x, const double* y, size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_avx2(double* y, double a, const double* x, size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d r = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(y + i, r);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void vadd_avx2(double* z, const double* x, const double* y, size_t n) {
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(z + i, _mm256_add_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) z[i] = x[i] + y[i];
}

void vmul_avx2(double* z, const double* x, const double* y, size_t n) {
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(z + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) z[i] = x[i] * y[i];
}

void vmul_acc_avx2(double* z, const double* x, const double* y, size_t n) {
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d r = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i),
                                _mm256_loadu_pd(z + i));
    _mm256_storeu_pd(z + i, r);
  }
  for (; i < n; ++i) z[i] += x[i] * y[i];
}

inline double row_dot(const double* row, const double* x, size_t n) {
  __m256d acc = _mm256_setzero_pd();
  size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(row + j), _mm256_loadu_pd(x + j), acc);
  }
  double s = hsum(acc);
  for (; j < n; ++j) s += row[j] * x[j];
  return s;
}

void matvec_avx2(const double* a, const double* x, double* y, size_t m, size_t n) {
  for (size_t i = 0; i < m; ++i) y[i] = row_dot(a + i * n, x, n);
}

void matvec_acc_avx2(const double* a, const double* x, double* y, size_t m, size_t n) {
  for (size_t i = 0; i < m; ++i) y[i] += row_dot(a + i * n, x, n);
}

void matvec_t_acc_avx2(const double* a, const double* v, double* y, size_t m, size_t n) {
  for (size_t i = 0; i < m; ++i) axpy_avx2(y, v[i], a + i * n, n);
}

void ger_acc_avx2(double* a, const double* v, const double* x, size_t m, size_t n) {
  for (size_t i = 0; i < m; ++i) axpy_avx2(a + i * n, v[i], x, n);
}

}  // namespace

const Ops* avx2_ops_table() {
  static const Ops table = {
      "avx2",      dot_avx2,      axpy_avx2,    vadd_avx2,
      vmul_avx2,   vmul_acc_avx2, matvec_avx2,  matvec_acc_avx2,
      matvec_t_acc_avx2, ger_acc_avx2,
  };
  return &table;
}

}  // namespace hrl::kern

#else

namespace hrl::kern {
const Ops* avx2_ops_table() { return nullptr; }
}  // namespace hrl::kern

#endif
