#pragma once

#include "hrl/numeric.hpp"
#include "hrl/params.hpp"
#include "hrl/rng.hpp"

namespace hrl {

/// Softmax decoder heads. The final head reads the 2d representation z;
/// the d-wide clause head supplies the delay-reward probabilities (the two
/// input widths cannot share one weight matrix).
struct DecoderParams {
  ParamId w = -1;   // C x 2d
  ParamId b = -1;   // C
  ParamId cw = -1;  // C x d
  ParamId cb = -1;  // C
  int num_classes = 0;
};

namespace predictor {

enum class Head { kFinal, kClause };

/// z = v_hat_n ⊕ w_hat_last, clause part first.
Vector document_representation(const Vector& v_hat_n, const Vector& w_hat_last);

struct Prediction {
  Vector probs;
  int rating = 0;  // 1-based; argmax ties break toward the lower class index
};

Prediction predict(const ParamRegistry& reg, const DecoderParams& dec, const Vector& z);

/// p_theta(gold | hidden) through the chosen head, floor-clamped at 1e-12.
/// Equals the corresponding entry of the head's softmax distribution.
real delay_prob(const ParamRegistry& reg, const DecoderParams& dec, Head head,
                const Vector& hidden, int gold);

/// Uniform rating over [1, C] from the seeded stream; used when a rollout
/// selects no clause at all.
int fallback_random_rating(Rng& rng, int num_classes);

}  // namespace predictor
}  // namespace hrl
