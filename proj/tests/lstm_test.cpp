#include <doctest.h>

#include <cmath>

#include "hrl/lstm.hpp"
#include "test_util.hpp"

using namespace hrl;
using testutil::central_diff;
using testutil::rel_err;

namespace {

// Independent single-step LSTM oracle, written directly from the gate
// equations with no shared code with the production kernels.
LstmState oracle_step(const ParamRegistry& reg, const LstmParams& p, const LstmState& s,
                      const Vector& x) {
  const size_t d = p.hidden_dim;
  const auto& wx = reg.at(p.wx).value;
  const auto& wh = reg.at(p.wh).value;
  const auto& b = reg.at(p.b).value;
  auto gate = [&](size_t g, size_t j) {
    double acc = b[g * d + j];
    for (size_t k = 0; k < p.input_dim; ++k) acc += wx[(g * d + j) * p.input_dim + k] * x[k];
    for (size_t k = 0; k < d; ++k) acc += wh[(g * d + j) * d + k] * s.h[k];
    return acc;
  };
  LstmState out(d);
  for (size_t j = 0; j < d; ++j) {
    const double ig = 1.0 / (1.0 + std::exp(-gate(0, j)));
    const double fg = 1.0 / (1.0 + std::exp(-gate(1, j)));
    const double og = 1.0 / (1.0 + std::exp(-gate(2, j)));
    const double cand = std::tanh(gate(3, j));
    out.c[j] = static_cast<real>(fg * s.c[j] + ig * cand);
    out.h[j] = static_cast<real>(og * std::tanh(static_cast<double>(out.c[j])));
  }
  return out;
}

struct CellFixture {
  ParamRegistry reg;
  LstmParams cell;

  explicit CellFixture(size_t din, size_t d, std::uint64_t seed) {
    Rng rng(seed);
    cell = lstm::create(reg, "cell", din, d, rng);
  }
};

}  // namespace

TEST_CASE("zero parameters, zero state: closed form") {
  CellFixture f(3, 4, 1);
  for (auto& v : f.reg.at(f.cell.wx).value) v = 0;
  for (auto& v : f.reg.at(f.cell.wh).value) v = 0;
  for (auto& v : f.reg.at(f.cell.b).value) v = 0;
  Rng rng(2);
  const LstmState out = lstm::step(f.reg, f.cell, LstmState(4), testutil::random_vector(rng, 3));
  // All gates sigmoid(0) = 0.5, candidate tanh(0) = 0: c' = 0, h' = 0.
  for (size_t j = 0; j < 4; ++j) {
    CHECK(out.c[j] == real(0));
    CHECK(out.h[j] == real(0));
  }
}

TEST_CASE("random instance matches the independent oracle") {
  CellFixture f(5, 6, 7);
  Rng rng(8);
  const Vector x = testutil::random_vector(rng, 5);
  LstmState s(6);
  s.h = testutil::random_vector(rng, 6, -0.7, 0.7);
  s.c = testutil::random_vector(rng, 6, -0.7, 0.7);
  const LstmState got = lstm::step(f.reg, f.cell, s, x);
  const LstmState want = oracle_step(f.reg, f.cell, s, x);
  for (size_t j = 0; j < 6; ++j) {
    CHECK(rel_err(got.h[j], want.h[j]) < 1e-12);
    CHECK(rel_err(got.c[j], want.c[j]) < 1e-12);
  }
}

TEST_CASE("forget gate bias starts at one, other parameters lie in the init range") {
  CellFixture f(4, 4, 21);
  const auto& b = f.reg.at(f.cell.b).value;
  const double bound = 1.0 / std::sqrt(4.0) + 1e-12;
  for (size_t j = 0; j < 4; ++j) {
    CHECK(b[4 + j] == real(1));
    CHECK(std::abs(b[j]) <= bound);
    CHECK(std::abs(b[8 + j]) <= bound);
    CHECK(std::abs(b[12 + j]) <= bound);
  }
  for (real v : f.reg.at(f.cell.wx).value) CHECK(std::abs(v) <= bound);
}

TEST_CASE("skip returns the state unchanged and all-skip stays at the initial state") {
  CellFixture f(3, 3, 9);
  Rng rng(10);
  LstmState s(3);
  s.h = testutil::random_vector(rng, 3);
  s.c = testutil::random_vector(rng, 3);
  CHECK(lstm::skip(s) == s);

  std::vector<Vector> seq;
  for (int i = 0; i < 5; ++i) seq.push_back(testutil::random_vector(rng, 3));
  const std::vector<std::uint8_t> mask(5, 0);
  const auto states = lstm::encode_masked(f.reg, f.cell, seq, mask, LstmState(3));
  REQUIRE(states.size() == 5);
  for (const auto& st : states) CHECK(st == LstmState(3));
}

TEST_CASE("all-ones mask equals unmasked encoding") {
  CellFixture f(4, 4, 11);
  Rng rng(12);
  std::vector<Vector> seq;
  for (int i = 0; i < 6; ++i) seq.push_back(testutil::random_vector(rng, 4));
  const std::vector<std::uint8_t> mask(6, 1);
  const auto states = lstm::encode_masked(f.reg, f.cell, seq, mask, LstmState(4));
  const LstmState plain = lstm::encode(f.reg, f.cell, seq, LstmState(4));
  CHECK(states.back() == plain);
}

TEST_CASE("mask [1,0,1] equals encoding the subsequence [x1, x3]") {
  CellFixture f(3, 4, 13);
  Rng rng(14);
  std::vector<Vector> seq = {testutil::random_vector(rng, 3), testutil::random_vector(rng, 3),
                             testutil::random_vector(rng, 3)};
  const std::vector<std::uint8_t> mask = {1, 0, 1};
  const auto states = lstm::encode_masked(f.reg, f.cell, seq, mask, LstmState(4));
  const std::vector<Vector> sub = {seq[0], seq[2]};
  CHECK(states.back() == lstm::encode(f.reg, f.cell, sub, LstmState(4)));
  CHECK(states[1] == states[0]);  // the skipped step copies bitwise
}

TEST_CASE("property: skip-equivalence over random masks, exact") {
  CellFixture f(4, 5, 15);
  Rng rng(16);
  for (int trial = 0; trial < 200; ++trial) {
    const size_t len = 1 + static_cast<size_t>(rng.uniform_int(0, 9));
    std::vector<Vector> seq;
    std::vector<std::uint8_t> mask;
    std::vector<Vector> sub;
    for (size_t t = 0; t < len; ++t) {
      seq.push_back(testutil::random_vector(rng, 4));
      mask.push_back(rng.bernoulli(0.5) ? 1 : 0);
      if (mask.back()) sub.push_back(seq.back());
    }
    const auto states = lstm::encode_masked(f.reg, f.cell, seq, mask, LstmState(5));
    const LstmState direct = lstm::encode(f.reg, f.cell, sub, LstmState(5));
    CHECK(states.back() == direct);
  }
}

TEST_CASE("gradients flow only through unmasked steps") {
  CellFixture f(3, 3, 17);
  Rng rng(18);
  std::vector<Vector> seq = {testutil::random_vector(rng, 3), testutil::random_vector(rng, 3),
                             testutil::random_vector(rng, 3)};
  const std::vector<std::uint8_t> mask = {1, 0, 1};

  auto loss_fn = [&] {
    const auto states = lstm::encode_masked(f.reg, f.cell, seq, mask, LstmState(3));
    double sq = 0;
    for (size_t j = 0; j < 3; ++j) sq += states.back().h[j] * states.back().h[j];
    return sq;
  };
  // Perturbing the skipped input leaves the loss unchanged.
  for (size_t j = 0; j < 3; ++j) {
    CHECK(central_diff(loss_fn, &seq[1][j]) == 0.0);
  }
  // Perturbing a selected input changes it.
  double movement = 0;
  for (size_t j = 0; j < 3; ++j) movement += std::abs(central_diff(loss_fn, &seq[0][j]));
  CHECK(movement > 0);
}

TEST_CASE("hidden values stay inside (-1, 1)") {
  CellFixture f(4, 4, 19);
  Rng rng(20);
  LstmState st(4);
  for (int t = 0; t < 50; ++t) {
    st = lstm::step(f.reg, f.cell, st, testutil::random_vector(rng, 4, -3.0, 3.0));
    for (size_t j = 0; j < 4; ++j) CHECK(std::abs(st.h[j]) < real(1));
  }
}

TEST_CASE("traced step gradient of |h|^2 matches finite differences") {
  CellFixture f(3, 4, 22);
  Rng rng(23);
  const Vector x = testutil::random_vector(rng, 3);

  auto trace = [&](Tape& tape) {
    TracedLstmState st = lstm::zero_state_traced(tape, 4);
    st = lstm::step_traced(tape, f.cell, st, tape.constant(x));
    return tape.dot(st.h, st.h);
  };
  Tape tape(f.reg);
  GradStore grads(f.reg);
  tape.backward(trace(tape), grads);

  for (ParamId p : {f.cell.wx, f.cell.wh, f.cell.b}) {
    auto& entry = f.reg.at(p);
    for (size_t k = 0; k < entry.value.size(); ++k) {
      const double fd = central_diff(
          [&] {
            Tape t2(f.reg);
            return static_cast<double>(t2.scalar(trace(t2)));
          },
          &entry.value[k]);
      CHECK_MESSAGE(rel_err(grads.grad(p)[k], fd) < 1e-4, entry.name << "[" << k << "]");
    }
  }
}

TEST_CASE("shape errors") {
  CellFixture f(3, 4, 24);
  CHECK_THROWS_AS(lstm::step(f.reg, f.cell, LstmState(4), Vector(5)), ShapeError);
  CHECK_THROWS_AS(lstm::step(f.reg, f.cell, LstmState(2), Vector(3)), ShapeError);
  std::vector<Vector> seq = {Vector(3)};
  std::vector<std::uint8_t> mask = {1, 0};
  CHECK_THROWS_AS(lstm::encode_masked(f.reg, f.cell, seq, mask, LstmState(4)), ShapeError);
}
