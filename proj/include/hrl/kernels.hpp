#pragma once

#include <cstddef>
#include <string>

#include "hrl/common.hpp"

namespace hrl::kern {

// Dense kernels behind every vector/matrix operation in the library.
// Two implementations exist: portable scalar loops (the reference) and
// AVX2+FMA variants selected at runtime when the CPU supports them.
// Matrices are row-major. All lengths are element counts.
struct Ops {
  const char* name;

  real (*dot)(const real* x, const real* y, size_t n);
  // y += a * x
  void (*axpy)(real* y, real a, const real* x, size_t n);
  // z = x + y
  void (*vadd)(real* z, const real* x, const real* y, size_t n);
  // z = x .* y
  void (*vmul)(real* z, const real* x, const real* y, size_t n);
  // z += x .* y
  void (*vmul_acc)(real* z, const real* x, const real* y, size_t n);
  // y = A x            (A: m x n)
  void (*matvec)(const real* a, const real* x, real* y, size_t m, size_t n);
  // y += A x
  void (*matvec_acc)(const real* a, const real* x, real* y, size_t m, size_t n);
  // y += A^T v         (v: m, y: n)
  void (*matvec_t_acc)(const real* a, const real* v, real* y, size_t m, size_t n);
  // A += v x^T         (rank-1 update; v: m, x: n)
  void (*ger_acc)(real* a, const real* v, const real* x, size_t m, size_t n);
};

enum class Backend { kAuto, kScalar, kAvx2 };

const Ops& scalar_ops();
// Null when the binary lacks the AVX2 translation unit or the CPU lacks AVX2/FMA.
const Ops* avx2_ops();

/// Active kernel table. Resolved once (best available) unless overridden.
const Ops& ops();

/// Force a backend; throws DomainError if it is unavailable on this machine.
void set_backend(Backend b);
Backend parse_backend(const std::string& name);
const char* active_backend_name();

}  // namespace hrl::kern
