#pragma once

#include <span>
#include <vector>

#include "hrl/numeric.hpp"
#include "hrl/params.hpp"
#include "hrl/rng.hpp"
#include "hrl/tape.hpp"

namespace hrl {

/// Single-layer LSTM cell parameters, fused gate layout [input, forget,
/// output, candidate] along the first axis.
struct LstmParams {
  ParamId wx = -1;  // 4d x input_dim
  ParamId wh = -1;  // 4d x d
  ParamId b = -1;   // 4d
  size_t input_dim = 0;
  size_t hidden_dim = 0;
};

/// Hidden vector and memory cell, both of dimension d. Initial state is
/// all-zeros.
struct LstmState {
  Vector h, c;
  explicit LstmState(size_t d = 0) : h(d), c(d) {}
  bool operator==(const LstmState& o) const { return h == o.h && c == o.c; }
};

struct TracedLstmState {
  NodeId h = -1, c = -1;
};

namespace lstm {

/// Register the parameter tensors and initialize: weights and non-forget
/// biases from U(-1/sqrt(d), 1/sqrt(d)), forget-gate bias 1.0.
LstmParams create(ParamRegistry& reg, const std::string& name, size_t input_dim,
                  size_t hidden_dim, Rng& rng);

/// One standard LSTM update. Throws ShapeError on dimension mismatch.
LstmState step(const ParamRegistry& reg, const LstmParams& p, const LstmState& state,
               const Vector& x);

/// The o_i = 0 branch: the state is returned unchanged, bitwise.
inline LstmState skip(const LstmState& state) { return state; }

/// Masked recurrence: step where mask=1, copy where mask=0. Returns the
/// state after every timestep (length of seq).
std::vector<LstmState> encode_masked(const ParamRegistry& reg, const LstmParams& p,
                                     std::span<const Vector> seq,
                                     std::span<const std::uint8_t> mask,
                                     const LstmState& initial);

/// Unmasked encode; returns only the final state.
LstmState encode(const ParamRegistry& reg, const LstmParams& p, std::span<const Vector> seq,
                 const LstmState& initial);

/// Traced twin of step(); gradients flow into the gate parameters and the
/// input node.
TracedLstmState step_traced(Tape& tape, const LstmParams& p, const TracedLstmState& state,
                            NodeId x);

TracedLstmState zero_state_traced(Tape& tape, size_t d);

}  // namespace lstm
}  // namespace hrl
