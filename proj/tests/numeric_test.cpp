#include <doctest.h>

#include <cmath>

#include "hrl/lstm.hpp"
#include "hrl/numeric.hpp"
#include "hrl/tape.hpp"
#include "test_util.hpp"

using namespace hrl;
using testutil::central_diff;
using testutil::rel_err;

TEST_CASE("affine basics") {
  Matrix w(1, 2);
  w.at(0, 0) = 1;
  w.at(0, 1) = 2;
  Vector x{3, 4};
  Vector b{5};
  const Vector y = affine(w, x, b);
  CHECK(y.size() == 1);
  CHECK(y[0] == doctest::Approx(16.0).epsilon(1e-15));

  Matrix eye(2, 2);
  eye.at(0, 0) = eye.at(1, 1) = 1;
  Vector v{-7, 9};
  const Vector id = affine(eye, v, Vector(2));
  CHECK(id == v);

  CHECK_THROWS_AS(affine(w, Vector{1, 2, 3}, b), ShapeError);
}

TEST_CASE("affine matches a triple-loop oracle") {
  Rng rng(5);
  const Matrix w = testutil::random_matrix(rng, 4, 3);
  const Vector x = testutil::random_vector(rng, 3);
  const Vector b = testutil::random_vector(rng, 4);
  const Vector y = affine(w, x, b);
  for (size_t i = 0; i < 4; ++i) {
    double s = b[i];
    for (size_t j = 0; j < 3; ++j) s += w.at(i, j) * x[j];
    CHECK(rel_err(y[i], s) < 1e-12);
  }
}

TEST_CASE("sigmoid and tanh") {
  CHECK(sigmoid(real(0)) == real(0.5));
  CHECK(sigmoid(real(1e9)) == real(1));       // saturation without NaN
  CHECK(sigmoid(real(-1e9)) == real(0));
  CHECK(std::isfinite(sigmoid(real(750))));
  CHECK(std::isfinite(sigmoid(real(-750))));

  // Derivative vs central differences at x = 0.3.
  real x = real(0.3);
  const double analytic = sigmoid(x) * (1 - sigmoid(x));
  const double numeric = central_diff([&] { return static_cast<double>(sigmoid(x)); }, &x, 1e-6);
  CHECK(rel_err(analytic, numeric) < 1e-6);

  const Vector t = tanh_vec(Vector{-50, 0, 50});
  CHECK(t[0] == real(-1));
  CHECK(t[1] == real(0));
  CHECK(t[2] == real(1));
}

TEST_CASE("softmax") {
  const Vector u = softmax(Vector{0, 0, 0});
  for (size_t i = 0; i < 3; ++i) CHECK(u[i] == doctest::Approx(1.0 / 3).epsilon(1e-12));

  const Vector s = softmax(Vector{1000, 0});
  CHECK(s[0] == doctest::Approx(1.0));
  CHECK(s[1] == doctest::Approx(0.0));
  CHECK(std::isfinite(s[0]));

  // Against the naive exp/sum oracle at small magnitudes.
  const Vector v{1, 2, 3};
  const Vector p = softmax(v);
  double denom = 0;
  for (size_t i = 0; i < 3; ++i) denom += std::exp(static_cast<double>(v[i]));
  for (size_t i = 0; i < 3; ++i) {
    CHECK(rel_err(p[i], std::exp(static_cast<double>(v[i])) / denom) < 1e-12);
  }

  CHECK_THROWS_AS(softmax(Vector()), DomainError);
}

TEST_CASE("softmax distribution properties over random inputs") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const size_t n = 1 + static_cast<size_t>(rng.uniform_int(0, 7));
    const Vector p = softmax(testutil::random_vector(rng, n, -30.0, 30.0));
    double sum = 0;
    for (size_t i = 0; i < n; ++i) {
      CHECK(p[i] >= real(0));
      sum += p[i];
    }
    CHECK(std::abs(sum - 1.0) < 1e-9);
  }
}

TEST_CASE("cross entropy") {
  CHECK(cross_entropy(Vector{1, 0, 0}, 1) == real(0));
  const Vector uniform{0.2, 0.2, 0.2, 0.2, 0.2};
  for (int label = 1; label <= 5; ++label) {
    CHECK(cross_entropy(uniform, label) == doctest::Approx(std::log(5.0)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(cross_entropy(uniform, 0), DomainError);
  CHECK_THROWS_AS(cross_entropy(uniform, 6), DomainError);
}

TEST_CASE("fused softmax-CE logit gradient matches finite differences") {
  ParamRegistry reg;
  const ParamId logits = reg.add_vector("logits", 4);
  Rng rng(23);
  for (auto& v : reg.at(logits).value) v = static_cast<real>(rng.uniform(-2.0, 2.0));

  GradStore grads(reg);
  Tape tape(reg);
  const NodeId node = tape.param_vector(logits);
  const NodeId loss = tape.softmax_cross_entropy(node, 2);
  tape.backward(loss, grads);

  for (size_t k = 0; k < 4; ++k) {
    const double fd = central_diff(
        [&] {
          Tape t2(reg);
          return static_cast<double>(t2.scalar(t2.softmax_cross_entropy(t2.param_vector(logits), 2)));
        },
        &reg.at(logits).value[k]);
    CHECK(rel_err(grads.grad(logits)[k], fd) < 1e-5);
  }
}

TEST_CASE("backward of a dot product returns the other operand") {
  ParamRegistry reg;
  const ParamId w = reg.add_vector("w", 3);
  reg.at(w).value = {real(0.5), real(-1), real(2)};
  const Vector x{3, 4, 5};

  Tape tape(reg);
  const NodeId loss = tape.dot(tape.param_vector(w), tape.constant(x));
  GradStore grads(reg);
  tape.backward(loss, grads);
  for (size_t i = 0; i < 3; ++i) CHECK(grads.grad(w)[i] == x[i]);
}

TEST_CASE("unused parameter keeps a zero gradient") {
  ParamRegistry reg;
  const ParamId used = reg.add_vector("used", 2);
  const ParamId unused = reg.add_vector("unused", 2);
  reg.at(used).value = {real(1), real(2)};
  reg.at(unused).value = {real(3), real(4)};

  Tape tape(reg);
  const NodeId loss = tape.dot(tape.param_vector(used), tape.constant(Vector{1, 1}));
  GradStore grads(reg);
  tape.backward(loss, grads);
  CHECK(grads.grad(unused)[0] == real(0));
  CHECK(grads.grad(unused)[1] == real(0));
}

TEST_CASE("double backward without re-trace is an error") {
  ParamRegistry reg;
  const ParamId w = reg.add_vector("w", 2);
  Tape tape(reg);
  const NodeId loss = tape.dot(tape.param_vector(w), tape.constant(Vector{1, 1}));
  GradStore grads(reg);
  tape.backward(loss, grads);
  CHECK_THROWS_AS(tape.backward(loss, grads), StateError);

  tape.clear();
  CHECK_THROWS_AS(tape.backward(loss, grads), StateError);  // stale node id
}

namespace {

// Composite trace: one LSTM step, clause-head affine, softmax CE. Returns
// the loss value; used both for the analytic pass and the FD oracle.
struct CompositeModel {
  ParamRegistry reg;
  LstmParams cell;
  ParamId head_w, head_b;
  Vector input, h0, c0;
  int label = 2;

  explicit CompositeModel(std::uint64_t seed) {
    Rng rng(seed);
    cell = lstm::create(reg, "cell", 3, 4, rng);
    head_w = reg.add_matrix("head.w", 3, 4);
    head_b = reg.add_vector("head.b", 3);
    for (auto& v : reg.at(head_w).value) v = static_cast<real>(rng.uniform(-0.8, 0.8));
    for (auto& v : reg.at(head_b).value) v = static_cast<real>(rng.uniform(-0.2, 0.2));
    input = testutil::random_vector(rng, 3);
    h0 = testutil::random_vector(rng, 4, -0.5, 0.5);
    c0 = testutil::random_vector(rng, 4, -0.5, 0.5);
  }

  NodeId trace(Tape& tape) const {
    TracedLstmState st;
    st.h = tape.constant(h0);
    st.c = tape.constant(c0);
    st = lstm::step_traced(tape, cell, st, tape.constant(input));
    const NodeId logits = tape.affine(head_w, st.h, head_b);
    return tape.softmax_cross_entropy(logits, label);
  }

  double loss() const {
    Tape tape(reg);
    return static_cast<double>(tape.scalar(trace(tape)));
  }
};

}  // namespace

TEST_CASE("full LSTM-step + softmax + CE composite gradients match finite differences") {
  CompositeModel m(31);
  Tape tape(m.reg);
  const NodeId loss = m.trace(tape);
  GradStore grads(m.reg);
  tape.backward(loss, grads);

  for (size_t p = 0; p < m.reg.count(); ++p) {
    auto& entry = m.reg.at(static_cast<ParamId>(p));
    for (size_t k = 0; k < entry.value.size(); ++k) {
      const double fd = central_diff([&] { return m.loss(); }, &entry.value[k]);
      CHECK_MESSAGE(rel_err(grads.grad(static_cast<ParamId>(p))[k], fd) < 1e-4,
                    entry.name << "[" << k << "]");
    }
  }
}

TEST_CASE("tape replay is bitwise deterministic") {
  CompositeModel m(47);
  GradStore g1(m.reg), g2(m.reg);
  {
    Tape tape(m.reg);
    tape.backward(m.trace(tape), g1);
  }
  {
    Tape tape(m.reg);
    tape.backward(m.trace(tape), g2);
  }
  for (size_t p = 0; p < m.reg.count(); ++p) {
    CHECK(g1.grad(static_cast<ParamId>(p)) == g2.grad(static_cast<ParamId>(p)));
  }
}

TEST_CASE("property: elementwise op gradients match finite differences over 100 seeds") {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    Rng rng(seed);
    const size_t n = 1 + static_cast<size_t>(rng.uniform_int(0, 5));
    ParamRegistry reg;
    const ParamId a = reg.add_vector("a", n);
    const ParamId b = reg.add_vector("b", n);
    for (auto& v : reg.at(a).value) v = static_cast<real>(rng.uniform(-1.5, 1.5));
    for (auto& v : reg.at(b).value) v = static_cast<real>(rng.uniform(-1.5, 1.5));
    const int which = static_cast<int>(seed % 5);

    auto trace = [&](Tape& tape) {
      const NodeId na = tape.param_vector(a);
      const NodeId nb = tape.param_vector(b);
      NodeId out;
      switch (which) {
        case 0: out = tape.add(na, nb); break;
        case 1: out = tape.mul(na, nb); break;
        case 2: out = tape.sigmoid(na); break;
        case 3: out = tape.tanh(na); break;
        default: out = tape.softmax(tape.concat(na, nb)); break;
      }
      // Reduce to a scalar through a fixed weighting.
      Vector ones(tape.size(out));
      for (size_t i = 0; i < ones.size(); ++i) ones[i] = static_cast<real>(0.3 + 0.1 * i);
      return tape.dot(out, tape.constant(ones));
    };

    GradStore grads(reg);
    Tape tape(reg);
    tape.backward(trace(tape), grads);

    for (ParamId p : {a, b}) {
      auto& entry = reg.at(p);
      for (size_t k = 0; k < entry.value.size(); ++k) {
        const double fd = central_diff(
            [&] {
              Tape t2(reg);
              return static_cast<double>(t2.scalar(trace(t2)));
            },
            &entry.value[k]);
        CHECK_MESSAGE(rel_err(grads.grad(p)[k], fd) < 1e-4,
                      "seed " << seed << " op " << which << " param " << entry.name);
      }
    }
  }
}
