#include "hrl/predictor.hpp"

#include <algorithm>
#include <cstring>

#include "hrl/errors.hpp"
#include "hrl/kernels.hpp"

namespace hrl::predictor {

namespace {

Vector head_distribution(const ParamRegistry& reg, ParamId w, ParamId b, const Vector& x) {
  const auto& we = reg.at(w);
  const auto& be = reg.at(b);
  if (we.cols != x.size()) {
    throw ShapeError("decoder: W is " + std::to_string(we.rows) + "x" + std::to_string(we.cols) +
                     ", input is " + shape_str(x));
  }
  Vector logits(we.rows);
  std::memcpy(logits.data(), be.value.data(), be.value.size() * sizeof(real));
  kern::ops().matvec_acc(we.value.data(), x.data(), logits.data(), we.rows, we.cols);
  return softmax(logits);
}

}  // namespace

Vector document_representation(const Vector& v_hat_n, const Vector& w_hat_last) {
  if (v_hat_n.size() != w_hat_last.size()) {
    throw ShapeError("document_representation: " + shape_str(v_hat_n) + " vs " +
                     shape_str(w_hat_last));
  }
  return concat(v_hat_n, w_hat_last);
}

Prediction predict(const ParamRegistry& reg, const DecoderParams& dec, const Vector& z) {
  Prediction out;
  out.probs = head_distribution(reg, dec.w, dec.b, z);
  size_t best = 0;
  for (size_t i = 1; i < out.probs.size(); ++i) {
    if (out.probs[i] > out.probs[best]) best = i;  // ties keep the lower index
  }
  out.rating = static_cast<int>(best) + 1;
  return out;
}

real delay_prob(const ParamRegistry& reg, const DecoderParams& dec, Head head,
                const Vector& hidden, int gold) {
  if (gold < 1 || gold > dec.num_classes) {
    throw DomainError("delay_prob: gold rating " + std::to_string(gold) + " outside [1, " +
                      std::to_string(dec.num_classes) + "]");
  }
  const Vector probs = head == Head::kFinal ? head_distribution(reg, dec.w, dec.b, hidden)
                                            : head_distribution(reg, dec.cw, dec.cb, hidden);
  return std::max(probs[static_cast<size_t>(gold - 1)], kProbFloor);
}

int fallback_random_rating(Rng& rng, int num_classes) {
  if (num_classes < 2) throw DomainError("fallback_random_rating: C must be >= 2");
  return static_cast<int>(rng.uniform_int(1, static_cast<std::uint64_t>(num_classes)));
}

}  // namespace hrl::predictor
