#include "hrl/lstm.hpp"

#include <cmath>
#include <cstring>

#include "hrl/kernels.hpp"

namespace hrl::lstm {

LstmParams create(ParamRegistry& reg, const std::string& name, size_t input_dim,
                  size_t hidden_dim, Rng& rng) {
  LstmParams p;
  p.input_dim = input_dim;
  p.hidden_dim = hidden_dim;
  p.wx = reg.add_matrix(name + ".wx", 4 * hidden_dim, input_dim);
  p.wh = reg.add_matrix(name + ".wh", 4 * hidden_dim, hidden_dim);
  p.b = reg.add_vector(name + ".b", 4 * hidden_dim);

  const double bound = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
  for (real& v : reg.at(p.wx).value) v = static_cast<real>(rng.uniform(-bound, bound));
  for (real& v : reg.at(p.wh).value) v = static_cast<real>(rng.uniform(-bound, bound));
  auto& bias = reg.at(p.b).value;
  for (real& v : bias) v = static_cast<real>(rng.uniform(-bound, bound));
  // Forget gate opens by default so early training does not wipe the cell.
  for (size_t i = hidden_dim; i < 2 * hidden_dim; ++i) bias[i] = real(1);
  return p;
}

LstmState step(const ParamRegistry& reg, const LstmParams& p, const LstmState& state,
               const Vector& x) {
  const size_t d = p.hidden_dim;
  if (x.size() != p.input_dim) {
    throw ShapeError("lstm step: input is " + std::to_string(x.size()) + ", cell expects " +
                     std::to_string(p.input_dim));
  }
  if (state.h.size() != d || state.c.size() != d) {
    throw ShapeError("lstm step: state is " + std::to_string(state.h.size()) +
                     ", cell expects " + std::to_string(d));
  }
  const auto& k = kern::ops();
  const auto& wx = reg.at(p.wx);
  const auto& wh = reg.at(p.wh);
  const auto& b = reg.at(p.b);

  Vector gates(4 * d);
  std::memcpy(gates.data(), b.value.data(), 4 * d * sizeof(real));
  k.matvec_acc(wx.value.data(), x.data(), gates.data(), 4 * d, p.input_dim);
  k.matvec_acc(wh.value.data(), state.h.data(), gates.data(), 4 * d, d);

  LstmState out(d);
  for (size_t j = 0; j < d; ++j) {
    const real ig = sigmoid(gates[j]);
    const real fg = sigmoid(gates[d + j]);
    const real og = sigmoid(gates[2 * d + j]);
    const real cand = std::tanh(gates[3 * d + j]);
    out.c[j] = fg * state.c[j] + ig * cand;
    out.h[j] = og * std::tanh(out.c[j]);
  }
  return out;
}

std::vector<LstmState> encode_masked(const ParamRegistry& reg, const LstmParams& p,
                                     std::span<const Vector> seq,
                                     std::span<const std::uint8_t> mask,
                                     const LstmState& initial) {
  if (seq.size() != mask.size()) {
    throw ShapeError("encode_masked: sequence length " + std::to_string(seq.size()) +
                     " vs mask length " + std::to_string(mask.size()));
  }
  std::vector<LstmState> states;
  states.reserve(seq.size());
  const LstmState* prev = &initial;
  for (size_t t = 0; t < seq.size(); ++t) {
    states.push_back(mask[t] ? step(reg, p, *prev, seq[t]) : skip(*prev));
    prev = &states.back();
  }
  return states;
}

LstmState encode(const ParamRegistry& reg, const LstmParams& p, std::span<const Vector> seq,
                 const LstmState& initial) {
  LstmState state = initial;
  for (const Vector& x : seq) state = step(reg, p, state, x);
  return state;
}

TracedLstmState step_traced(Tape& tape, const LstmParams& p, const TracedLstmState& state,
                            NodeId x) {
  const size_t d = p.hidden_dim;
  NodeId gates = tape.affine(p.wx, x, p.b);
  gates = tape.affine_add(p.wh, state.h, gates);
  NodeId ig = tape.sigmoid(tape.slice(gates, 0, d));
  NodeId fg = tape.sigmoid(tape.slice(gates, d, d));
  NodeId og = tape.sigmoid(tape.slice(gates, 2 * d, d));
  NodeId cand = tape.tanh(tape.slice(gates, 3 * d, d));
  TracedLstmState out;
  out.c = tape.add(tape.mul(fg, state.c), tape.mul(ig, cand));
  out.h = tape.mul(og, tape.tanh(out.c));
  return out;
}

TracedLstmState zero_state_traced(Tape& tape, size_t d) {
  Vector zero(d);
  TracedLstmState s;
  s.h = tape.constant(zero);
  s.c = tape.constant(zero);
  return s;
}

}  // namespace hrl::lstm
