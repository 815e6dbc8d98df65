#pragma once

#include <atomic>
#include <cstdint>
#include <vector>

#include "hrl/config.hpp"
#include "hrl/lstm.hpp"
#include "hrl/numeric.hpp"
#include "hrl/rng.hpp"

namespace hrl {

struct Model;  // model.hpp

/// Logistic selection policy: P(select | s) = sigmoid(w . s + b).
/// The high-level instance reads 4d states, the low-level 3d states.
struct LogisticPolicy {
  Vector w;
  real b = 0;

  size_t dim() const { return w.size(); }
};

/// One clause-level decision: state, sampled option, selection probability
/// and the realized cumulative reward.
struct HighStep {
  Vector state;          // s^h_i = v_prev ⊕ c_prev ⊕ v_i ⊕ v_a
  int option = 0;        // o_i
  real prob_select = 0;  // P(o_i = 1 | s)
  real coslog = 0;       // log cos(v_a, v_hat_i), clamped
  real reward = 0;       // r^h_i, filled once the trajectory completes
};

/// Word selections inside one selected clause. The reward is a delay value,
/// identical at every timestep of the clause.
struct LowTrajectory {
  std::vector<Vector> states;         // s^l_{i,j}
  std::vector<std::uint8_t> actions;  // a_{i,j}
  std::vector<real> probs;            // P(a_{i,j} = 1 | s)
  int selected = 0;                   // N'
  int length = 0;                     // N = k_i
  real clause_prob = 0;               // p_theta(y | w_hat at clause end)
  real step_reward = 0;               // r^l_{i,j}

  real clause_reward() const { return static_cast<real>(length) * step_reward; }
};

/// Full per-document record of one hierarchical rollout.
struct HighTrajectory {
  std::vector<HighStep> steps;
  std::vector<LowTrajectory> lows;  // aligned with steps; empty when skipped
  real final_prob = 0;              // p_theta(y | v_hat_n)
  Vector v_hat_n;                   // selected-clause representation
  Vector w_hat_last;                // selected-word representation
  bool any_clause_selected = false;

  size_t length() const { return steps.size(); }
};

enum class DecodeMode { kSample, kGreedy };

namespace policy {

/// s^h_i: 4d concatenation, exactly v_prev ⊕ c_prev ⊕ v_i ⊕ v_a.
Vector high_state(const LstmState& prev, const Vector& v_i, const Vector& v_a);

/// s^l_{i,j}: 3d concatenation, exactly w_prev ⊕ c_prev ⊕ w_ij.
Vector low_state(const LstmState& prev, const Vector& w_ij);

/// sigmoid(w . s + b); the complement probability is 1 minus this, exactly.
real select_prob(const LogisticPolicy& p, const Vector& s);

/// Bernoulli draw from the run's RNG stream; greedy mode selects on
/// probability >= 0.5 (tie selects).
int sample_binary(real prob_select, Rng& rng);
int greedy_binary(real prob_select);

/// log(max(cos(v_a, v_hat), eps)) with eps = 1e-4. Zero-norm inputs clamp
/// and bump the diagnostics counter.
inline constexpr real kCosineFloor = real(1e-4);
real cosine_reward(const Vector& v_a, const Vector& v_hat);

/// Zero-norm cosine clamps observed since process start (diagnostics).
std::uint64_t zero_norm_cosine_count();
void reset_zero_norm_cosine_count();

/// r^l_{i,j} = lambda'_1 log p + lambda'_2 (-N')/N. N = 0 is a domain error.
real low_reward(real clause_final_prob, int n_selected, int n_words, const Config& cfg);

/// Fills steps[i].reward with the three-term discounted sum of Eq-style
/// cumulative rewards, using steps[i].coslog, the per-clause low rewards
/// (zero for discarded clauses) and the final delay probability.
void fill_high_rewards(HighTrajectory& traj, const Config& cfg);

/// Score-function gradient accumulator for a logistic policy:
/// grad += advantage * (chosen - prob_select) * [s ; 1].
void accumulate_score_gradient(const Vector& s, int chosen, real prob_select, real advantage,
                               Vector& grad_w, real& grad_b);

/// Scale a policy gradient down to `max_norm` when it exceeds it
/// (norm taken over [w ; b] jointly).
void clip_gradient(Vector& grad_w, real& grad_b, real max_norm);

}  // namespace policy
}  // namespace hrl
