#include "hrl/policy.hpp"

#include <cmath>

#include "hrl/kernels.hpp"

namespace hrl::policy {

namespace {
std::atomic<std::uint64_t> g_zero_norm_cosine{0};
}

Vector high_state(const LstmState& prev, const Vector& v_i, const Vector& v_a) {
  const size_t d = prev.h.size();
  if (prev.c.size() != d || v_i.size() != d || v_a.size() != d) {
    throw ShapeError("high_state: parts are " + shape_str(prev.h) + ", " + shape_str(prev.c) +
                     ", " + shape_str(v_i) + ", " + shape_str(v_a));
  }
  return concat(prev.h, prev.c, v_i, v_a);
}

Vector low_state(const LstmState& prev, const Vector& w_ij) {
  const size_t d = prev.h.size();
  if (prev.c.size() != d || w_ij.size() != d) {
    throw ShapeError("low_state: parts are " + shape_str(prev.h) + ", " + shape_str(prev.c) +
                     ", " + shape_str(w_ij));
  }
  return concat(prev.h, prev.c, w_ij);
}

real select_prob(const LogisticPolicy& p, const Vector& s) {
  if (p.w.size() != s.size()) {
    throw ShapeError("select_prob: policy is " + shape_str(p.w) + ", state is " + shape_str(s));
  }
  return sigmoid(dot(p.w, s) + p.b);
}

int sample_binary(real prob_select, Rng& rng) {
  return rng.bernoulli(static_cast<double>(prob_select)) ? 1 : 0;
}

int greedy_binary(real prob_select) { return prob_select >= real(0.5) ? 1 : 0; }

real cosine_reward(const Vector& v_a, const Vector& v_hat) {
  const real na = norm(v_a);
  const real nb = norm(v_hat);
  if (na == real(0) || nb == real(0)) {
    g_zero_norm_cosine.fetch_add(1, std::memory_order_relaxed);
    return std::log(kCosineFloor);
  }
  const real cos = dot(v_a, v_hat) / (na * nb);
  return std::log(std::max(cos, kCosineFloor));
}

std::uint64_t zero_norm_cosine_count() {
  return g_zero_norm_cosine.load(std::memory_order_relaxed);
}

void reset_zero_norm_cosine_count() { g_zero_norm_cosine.store(0, std::memory_order_relaxed); }

real low_reward(real clause_final_prob, int n_selected, int n_words, const Config& cfg) {
  if (n_words < 1) throw DomainError("low_reward: clause length must be >= 1");
  const real p = std::max(clause_final_prob, kProbFloor);
  return static_cast<real>(cfg.lambda_low1) * std::log(p) +
         static_cast<real>(cfg.lambda_low2) *
             (-static_cast<real>(n_selected) / static_cast<real>(n_words));
}

void fill_high_rewards(HighTrajectory& traj, const Config& cfg) {
  const size_t n = traj.steps.size();
  if (n == 0) throw StateError("fill_high_rewards: empty trajectory");
  const real gamma = static_cast<real>(cfg.gamma);
  const real delay = static_cast<real>(cfg.lambda3) *
                     std::log(std::max(traj.final_prob, kProbFloor));
  real cos_sum = 0;  // sum_t gamma^{t-i} coslog_t, built right to left
  real low_sum = 0;  // sum_t gamma^{t-i} r^l(u_t)
  for (size_t idx = n; idx-- > 0;) {
    const real rl = traj.lows[idx].length > 0 ? traj.lows[idx].clause_reward() : real(0);
    cos_sum = traj.steps[idx].coslog + gamma * cos_sum;
    low_sum = rl + gamma * low_sum;
    traj.steps[idx].reward = static_cast<real>(cfg.lambda1) * cos_sum +
                             static_cast<real>(cfg.lambda2) * low_sum + delay;
  }
}

void accumulate_score_gradient(const Vector& s, int chosen, real prob_select, real advantage,
                               Vector& grad_w, real& grad_b) {
  if (grad_w.size() != s.size()) {
    throw ShapeError("score gradient: state is " + shape_str(s) + ", gradient is " +
                     shape_str(grad_w));
  }
  const real coeff = advantage * (static_cast<real>(chosen) - prob_select);
  kern::ops().axpy(grad_w.data(), coeff, s.data(), s.size());
  grad_b += coeff;
}

void clip_gradient(Vector& grad_w, real& grad_b, real max_norm) {
  if (max_norm <= real(0)) return;
  real sq = dot(grad_w, grad_w) + grad_b * grad_b;
  if (sq <= max_norm * max_norm) return;
  const real scale = max_norm / std::sqrt(sq);
  for (size_t i = 0; i < grad_w.size(); ++i) grad_w[i] *= scale;
  grad_b *= scale;
}

}  // namespace hrl::policy
