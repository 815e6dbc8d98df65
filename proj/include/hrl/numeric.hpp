#pragma once

#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "hrl/common.hpp"
#include "hrl/errors.hpp"

namespace hrl {

/// Dense vector with a fixed dimension. All values finite; debug builds
/// verify this on demand via check_finite().
class Vector {
 public:
  Vector() = default;
  explicit Vector(size_t n) : v_(n, real(0)) {}
  Vector(std::initializer_list<real> init) : v_(init) {}
  static Vector zeros(size_t n) { return Vector(n); }

  size_t size() const { return v_.size(); }
  real* data() { return v_.data(); }
  const real* data() const { return v_.data(); }
  real& operator[](size_t i) { return v_[i]; }
  real operator[](size_t i) const { return v_[i]; }

  std::span<real> span() { return v_; }
  std::span<const real> span() const { return v_; }

  void fill(real x) { v_.assign(v_.size(), x); }

  bool operator==(const Vector& o) const { return v_ == o.v_; }

 private:
  std::vector<real> v_;
};

/// Dense row-major matrix with immutable dimensions.
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}
  Matrix(size_t rows, size_t cols) : rows_(rows), cols_(cols), v_(rows * cols, real(0)) {}
  static Matrix zeros(size_t rows, size_t cols) { return Matrix(rows, cols); }

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  size_t size() const { return v_.size(); }
  real* data() { return v_.data(); }
  const real* data() const { return v_.data(); }
  real* row(size_t i) { return v_.data() + i * cols_; }
  const real* row(size_t i) const { return v_.data() + i * cols_; }
  real& at(size_t i, size_t j) { return v_[i * cols_ + j]; }
  real at(size_t i, size_t j) const { return v_[i * cols_ + j]; }

  bool operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && v_ == o.v_;
  }

 private:
  size_t rows_, cols_;
  std::vector<real> v_;
};

// ---------------------------------------------------------------------------
// Eager operations. The traced counterparts in tape.hpp run the same kernels
// in the same order, so eager and traced forward values agree bitwise.
// ---------------------------------------------------------------------------

/// Wx + b. Throws ShapeError naming both shapes on mismatch.
Vector affine(const Matrix& w, const Vector& x, const Vector& b);

/// Numerically stable logistic; total on all finite inputs.
real sigmoid(real x);
Vector sigmoid(const Vector& x);
Vector tanh_vec(const Vector& x);

/// Max-subtracted softmax; output sums to 1 and is elementwise >= 0.
Vector softmax(const Vector& v);

/// -log probs[label-1]; labels are 1-based. Probabilities are floor-clamped
/// at kProbFloor before the log.
real cross_entropy(const Vector& probs, int label);

inline constexpr real kProbFloor = real(1e-12);

Vector concat(std::span<const Vector* const> parts);
Vector concat(const Vector& a, const Vector& b);
Vector concat(const Vector& a, const Vector& b, const Vector& c);
Vector concat(const Vector& a, const Vector& b, const Vector& c, const Vector& d);

real dot(const Vector& a, const Vector& b);
real norm(const Vector& a);
void axpy(Vector& y, real a, const Vector& x);

/// Throws NumericError if any element is NaN or infinite.
void check_finite(std::span<const real> values, const char* what);

std::string shape_str(const Matrix& m);
std::string shape_str(const Vector& v);

}  // namespace hrl
