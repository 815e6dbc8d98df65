#include "hrl/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "hrl/kernels.hpp"

namespace hrl {

Vector affine(const Matrix& w, const Vector& x, const Vector& b) {
  if (w.cols() != x.size() || w.rows() != b.size()) {
    throw ShapeError("affine: W is " + shape_str(w) + ", x is " + shape_str(x) +
                     ", b is " + shape_str(b));
  }
  Vector y(w.rows());
  std::memcpy(y.data(), b.data(), b.size() * sizeof(real));
  kern::ops().matvec_acc(w.data(), x.data(), y.data(), w.rows(), w.cols());
  return y;
}

real sigmoid(real x) {
  if (x >= 0) {
    return real(1) / (real(1) + std::exp(-x));
  }
  const real e = std::exp(x);
  return e / (real(1) + e);
}

Vector sigmoid(const Vector& x) {
  Vector y(x.size());
  for (size_t i = 0; i < x.size(); ++i) y[i] = sigmoid(x[i]);
  return y;
}

Vector tanh_vec(const Vector& x) {
  Vector y(x.size());
  for (size_t i = 0; i < x.size(); ++i) y[i] = std::tanh(x[i]);
  return y;
}

Vector softmax(const Vector& v) {
  if (v.size() == 0) throw DomainError("softmax: empty input");
  real mx = v[0];
  for (size_t i = 1; i < v.size(); ++i) mx = std::max(mx, v[i]);
  Vector y(v.size());
  real sum = 0;
  for (size_t i = 0; i < v.size(); ++i) {
    y[i] = std::exp(v[i] - mx);
    sum += y[i];
  }
  for (size_t i = 0; i < v.size(); ++i) y[i] /= sum;
  return y;
}

real cross_entropy(const Vector& probs, int label) {
  if (label < 1 || static_cast<size_t>(label) > probs.size()) {
    throw DomainError("cross_entropy: label " + std::to_string(label) +
                      " outside [1, " + std::to_string(probs.size()) + "]");
  }
  const real p = std::max(probs[static_cast<size_t>(label - 1)], kProbFloor);
  return -std::log(p);
}

Vector concat(std::span<const Vector* const> parts) {
  size_t total = 0;
  for (const Vector* p : parts) total += p->size();
  Vector y(total);
  size_t off = 0;
  for (const Vector* p : parts) {
    std::memcpy(y.data() + off, p->data(), p->size() * sizeof(real));
    off += p->size();
  }
  return y;
}

Vector concat(const Vector& a, const Vector& b) {
  const Vector* parts[] = {&a, &b};
  return concat(std::span<const Vector* const>(parts));
}

Vector concat(const Vector& a, const Vector& b, const Vector& c) {
  const Vector* parts[] = {&a, &b, &c};
  return concat(std::span<const Vector* const>(parts));
}

Vector concat(const Vector& a, const Vector& b, const Vector& c, const Vector& d) {
  const Vector* parts[] = {&a, &b, &c, &d};
  return concat(std::span<const Vector* const>(parts));
}

real dot(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) {
    throw ShapeError("dot: " + shape_str(a) + " vs " + shape_str(b));
  }
  return kern::ops().dot(a.data(), b.data(), a.size());
}

real norm(const Vector& a) { return std::sqrt(dot(a, a)); }

void axpy(Vector& y, real a, const Vector& x) {
  if (y.size() != x.size()) {
    throw ShapeError("axpy: " + shape_str(y) + " vs " + shape_str(x));
  }
  kern::ops().axpy(y.data(), a, x.data(), x.size());
}

void check_finite(std::span<const real> values, const char* what) {
  for (real v : values) {
    if (!std::isfinite(v)) {
      throw NumericError(std::string("non-finite value in ") + what);
    }
  }
}

std::string shape_str(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

std::string shape_str(const Vector& v) { return std::to_string(v.size()); }

}  // namespace hrl
