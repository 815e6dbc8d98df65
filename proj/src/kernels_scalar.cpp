#include "hrl/kernels.hpp"

// Scalar reference kernels. Every SIMD variant is equivalence-tested
// against these loops.

namespace hrl::kern {
namespace {

real dot_scalar(const real* x, const real* y, size_t n) {
  real s = 0;
  for (size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_scalar(real* y, real a, const real* x, size_t n) {
  for (size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void vadd_scalar(real* z, const real* x, const real* y, size_t n) {
  for (size_t i = 0; i < n; ++i) z[i] = x[i] + y[i];
}

void vmul_scalar(real* z, const real* x, const real* y, size_t n) {
  for (size_t i = 0; i < n; ++i) z[i] = x[i] * y[i];
}

void vmul_acc_scalar(real* z, const real* x, const real* y, size_t n) {
  for (size_t i = 0; i < n; ++i) z[i] += x[i] * y[i];
}

void matvec_scalar(const real* a, const real* x, real* y, size_t m, size_t n) {
  for (size_t i = 0; i < m; ++i) {
    const real* row = a + i * n;
    real s = 0;
    for (size_t j = 0; j < n; ++j) s += row[j] * x[j];
    y[i] = s;
  }
}

void matvec_acc_scalar(const real* a, const real* x, real* y, size_t m, size_t n) {
  for (size_t i = 0; i < m; ++i) {
    const real* row = a + i * n;
    real s = 0;
    for (size_t j = 0; j < n; ++j) s += row[j] * x[j];
    y[i] += s;
  }
}

void matvec_t_acc_scalar(const real* a, const real* v, real* y, size_t m, size_t n) {
  // Row-major A: accumulate v[i] * row_i into y, one row at a time.
  for (size_t i = 0; i < m; ++i) {
    const real vi = v[i];
    const real* row = a + i * n;
    for (size_t j = 0; j < n; ++j) y[j] += vi * row[j];
  }
}

void ger_acc_scalar(real* a, const real* v, const real* x, size_t m, size_t n) {
  for (size_t i = 0; i < m; ++i) {
    const real vi = v[i];
    real* row = a + i * n;
    for (size_t j = 0; j < n; ++j) row[j] += vi * x[j];
  }
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops table = {
      "scalar",        dot_scalar,        axpy_scalar,    vadd_scalar,
      vmul_scalar,     vmul_acc_scalar,   matvec_scalar,  matvec_acc_scalar,
      matvec_t_acc_scalar, ger_acc_scalar,
  };
  return table;
}

}  // namespace hrl::kern
