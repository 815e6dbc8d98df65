#pragma once

#include <span>
#include <utility>
#include <vector>

#include "hrl/model.hpp"
#include "hrl/rollout.hpp"
#include "hrl/tape.hpp"

namespace hrl {

/// Adam moment buffers mirroring a ParamRegistry.
struct AdamState {
  std::vector<std::vector<real>> m, v;
  long long t = 0;

  explicit AdamState(const ParamRegistry& reg) {
    m.resize(reg.count());
    v.resize(reg.count());
    for (size_t i = 0; i < reg.count(); ++i) {
      m[i].assign(reg.at(static_cast<ParamId>(i)).value.size(), real(0));
      v[i].assign(reg.at(static_cast<ParamId>(i)).value.size(), real(0));
    }
  }
};

inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEps = 1e-8;

/// One Adam step over the listed parameters; `grads` holds the effective
/// (already scaled and regularized) gradients. Minimizes.
void adam_step(ParamRegistry& reg, std::span<const ParamId> ids, const GradStore& grads,
               AdamState& state, double lr);

/// Plain SGD ascent for a logistic policy (the policy objective is
/// maximized, so the gradient is added).
void sgd_ascent_step(LogisticPolicy& p, const Vector& grad_w, real grad_b, double lr);

struct PolicyGradient {
  Vector w;
  real b = 0;
};

/// Eq.-7-style gradient: sum_i (r^h_i - baseline) * grad log pi^h(o_i | s^h_i).
PolicyGradient policy_gradient_high(const HighTrajectory& traj, real baseline);

/// Eq.-8-style gradient over one clause's word steps.
PolicyGradient policy_gradient_low(const LowTrajectory& traj, real baseline);

/// Per-epoch training curves.
struct TrainResult {
  std::vector<double> pretrain_low_loss;
  std::vector<double> pretrain_high_loss;
  std::vector<double> high_reward_curve;  // mean r^h_1 of the main trajectories
  std::vector<double> low_reward_curve;   // mean per-step low reward over selected clauses
};

/// Drives the three training stages in order:
///   1. pretrain LSTM^l (select-all words) against the clause head,
///   2. pretrain LSTM^h (select-all clauses) against the final decoder,
///   3. fix theta, train both policies with REINFORCE and sampled baselines.
/// Stage 3 before 1+2 is a StateError. All randomness draws from the
/// model's run stream, so runs are reproducible from (config, seed).
class Trainer {
 public:
  Trainer(Model& model, const Corpus& corpus);

  void pretrain_low(int epochs);
  void pretrain_high(int epochs);
  void train_policies(int epochs);

  /// The full schedule from the model's config.
  void run_all();

  /// Mean r^h_1 over `m_samples` fresh rollouts of the current policies.
  real estimate_high_baseline(size_t doc_index, const AspectQuery& query, int m_samples,
                              Rng& rng);
  /// Mean per-step low reward over `m_samples` word-selection rollouts from
  /// the given entry state.
  real estimate_low_baseline(const Clause& clause, int gold_rating, const LstmState& entry,
                             int m_samples, Rng& rng);

  /// Cached clause vectors (v_i) for one document; built after pretraining.
  std::span<const Vector> clause_vectors(size_t doc_index);
  void refresh_caches();

  const TrainResult& result() const { return result_; }
  size_t optimizer_steps() const { return optimizer_steps_; }
  Model& model() { return model_; }

 private:
  NodeId forward_low(Tape& tape, const Document& doc, const AspectQuery& query, bool train_mode);
  NodeId forward_high(Tape& tape, size_t doc_index, const AspectQuery& query, bool train_mode);
  NodeId maybe_dropout(Tape& tape, NodeId x, bool train_mode);
  void finalize_batch(GradStore& grads, std::span<const ParamId> active, size_t batch_count,
                      AdamState& adam);
  void train_one_document(size_t doc_index, const AspectQuery& query, double& high_reward_sum,
                          double& low_reward_sum, size_t& low_count);
  void finetune_epoch();
  void ensure_caches();

  Model& model_;
  const Corpus& corpus_;
  std::vector<std::pair<size_t, size_t>> train_pairs_;  // (document, query) indices
  std::vector<std::vector<Vector>> clause_vec_cache_;
  std::vector<Vector> chain_state_cache_;  // select-all word-chain final hidden per doc
  bool caches_valid_ = false;
  TrainResult result_;
  size_t optimizer_steps_ = 0;
};

}  // namespace hrl
