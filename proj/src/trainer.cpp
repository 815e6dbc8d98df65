#include "hrl/trainer.hpp"

#include <algorithm>
#include <cmath>

#include "hrl/kernels.hpp"

namespace hrl {

void adam_step(ParamRegistry& reg, std::span<const ParamId> ids, const GradStore& grads,
               AdamState& state, double lr) {
  ++state.t;
  const double bc1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(state.t));
  for (ParamId id : ids) {
    auto& value = reg.at(id).value;
    const auto& g = grads.grad(id);
    if (g.size() != value.size()) {
      throw ShapeError("adam_step: gradient size " + std::to_string(g.size()) +
                       " vs parameter size " + std::to_string(value.size()));
    }
    auto& m = state.m[static_cast<size_t>(id)];
    auto& v = state.v[static_cast<size_t>(id)];
    for (size_t k = 0; k < value.size(); ++k) {
      m[k] = static_cast<real>(kAdamBeta1 * m[k] + (1.0 - kAdamBeta1) * g[k]);
      v[k] = static_cast<real>(kAdamBeta2 * v[k] + (1.0 - kAdamBeta2) * g[k] * g[k]);
      const double mhat = m[k] / bc1;
      const double vhat = v[k] / bc2;
      value[k] -= static_cast<real>(lr * mhat / (std::sqrt(vhat) + kAdamEps));
    }
  }
}

void sgd_ascent_step(LogisticPolicy& p, const Vector& grad_w, real grad_b, double lr) {
  if (grad_w.size() != p.w.size()) {
    throw ShapeError("sgd_ascent_step: gradient is " + shape_str(grad_w) + ", policy is " +
                     shape_str(p.w));
  }
  kern::ops().axpy(p.w.data(), static_cast<real>(lr), grad_w.data(), grad_w.size());
  p.b += static_cast<real>(lr) * grad_b;
}

PolicyGradient policy_gradient_high(const HighTrajectory& traj, real baseline) {
  if (traj.steps.empty()) throw StateError("policy_gradient_high: empty trajectory");
  PolicyGradient g;
  g.w = Vector(traj.steps[0].state.size());
  for (const auto& step : traj.steps) {
    policy::accumulate_score_gradient(step.state, step.option, step.prob_select,
                                      step.reward - baseline, g.w, g.b);
  }
  return g;
}

PolicyGradient policy_gradient_low(const LowTrajectory& traj, real baseline) {
  if (traj.length == 0) throw StateError("policy_gradient_low: empty trajectory");
  PolicyGradient g;
  g.w = Vector(traj.states[0].size());
  const real advantage = traj.step_reward - baseline;
  for (size_t j = 0; j < traj.states.size(); ++j) {
    policy::accumulate_score_gradient(traj.states[j], traj.actions[j], traj.probs[j], advantage,
                                      g.w, g.b);
  }
  return g;
}

Trainer::Trainer(Model& model, const Corpus& corpus) : model_(model), corpus_(corpus) {
  for (size_t di = 0; di < corpus.docs.size(); ++di) {
    if (corpus.split[di] != static_cast<int>(Split::kTrain)) continue;
    for (size_t qi = 0; qi < corpus.docs[di].queries.size(); ++qi) {
      train_pairs_.emplace_back(di, qi);
    }
  }
}

NodeId Trainer::maybe_dropout(Tape& tape, NodeId x, bool train_mode) {
  if (!train_mode || model_.cfg.dropout <= 0.0) return x;
  const double keep = 1.0 - model_.cfg.dropout;
  Vector mask(tape.size(x));
  for (size_t i = 0; i < mask.size(); ++i) {
    mask[i] = model_.rng.bernoulli(keep) ? static_cast<real>(1.0 / keep) : real(0);
  }
  return tape.mul(x, tape.constant(mask));
}

NodeId Trainer::forward_low(Tape& tape, const Document& doc, const AspectQuery& query,
                            bool train_mode) {
  TracedLstmState st = lstm::zero_state_traced(tape, static_cast<size_t>(model_.cfg.d));
  for (const auto& clause : doc.clauses) {
    if (model_.cfg.reset_low_state_per_clause) {
      st = lstm::zero_state_traced(tape, static_cast<size_t>(model_.cfg.d));
    }
    for (int tok : clause.token_ids) {
      NodeId x = tape.embed_row(model_.emb, static_cast<size_t>(tok));
      x = maybe_dropout(tape, x, train_mode);
      st = lstm::step_traced(tape, model_.lstm_low, st, x);
    }
  }
  NodeId logits = tape.affine(model_.dec.cw, st.h, model_.dec.cb);
  return tape.softmax_cross_entropy(logits, query.rating);
}

NodeId Trainer::forward_high(Tape& tape, size_t doc_index, const AspectQuery& query,
                             bool train_mode) {
  TracedLstmState st = lstm::zero_state_traced(tape, static_cast<size_t>(model_.cfg.d));
  for (const Vector& v : clause_vec_cache_[doc_index]) {
    NodeId x = tape.constant(v);
    x = maybe_dropout(tape, x, train_mode);
    st = lstm::step_traced(tape, model_.lstm_high, st, x);
  }
  NodeId z = tape.concat(st.h, tape.constant(chain_state_cache_[doc_index]));
  NodeId logits = tape.affine(model_.dec.w, z, model_.dec.b);
  return tape.softmax_cross_entropy(logits, query.rating);
}

void Trainer::finalize_batch(GradStore& grads, std::span<const ParamId> active,
                             size_t batch_count, AdamState& adam) {
  const real scale = real(1) / static_cast<real>(batch_count);
  const real delta = static_cast<real>(model_.cfg.l2_weight);
  for (ParamId id : active) {
    auto& g = grads.grad(id);
    const auto& e = model_.reg.at(id);
    if (e.l2 && delta > 0) {
      for (size_t k = 0; k < g.size(); ++k) g[k] = g[k] * scale + delta * e.value[k];
    } else {
      for (size_t k = 0; k < g.size(); ++k) g[k] *= scale;
    }
  }
  adam_step(model_.reg, active, grads, adam, model_.cfg.adam_lr);
  ++optimizer_steps_;
}

void Trainer::pretrain_low(int epochs) {
  if (train_pairs_.empty()) throw DomainError("pretrain_low: empty corpus");
  const ParamId active_arr[] = {model_.emb,         model_.lstm_low.wx, model_.lstm_low.wh,
                                model_.lstm_low.b,  model_.dec.cw,      model_.dec.cb};
  const std::span<const ParamId> active(active_arr);
  AdamState adam(model_.reg);
  Tape tape(model_.reg);
  GradStore grads(model_.reg);

  for (int epoch = 0; epoch < epochs; ++epoch) {
    auto pairs = train_pairs_;
    for (size_t i = pairs.size(); i > 1; --i) {
      std::swap(pairs[i - 1], pairs[static_cast<size_t>(model_.rng.uniform_int(0, i - 1))]);
    }
    double epoch_loss = 0;
    for (size_t start = 0; start < pairs.size(); start += static_cast<size_t>(model_.cfg.batch_size)) {
      const size_t stop = std::min(pairs.size(), start + static_cast<size_t>(model_.cfg.batch_size));
      grads.zero();
      double batch_loss = 0;
      for (size_t i = start; i < stop; ++i) {
        const auto& doc = corpus_.docs[pairs[i].first];
        const auto& query = doc.queries[pairs[i].second];
        tape.clear();
        const NodeId loss = forward_low(tape, doc, query, /*train_mode=*/true);
        batch_loss += tape.scalar(loss);
        tape.backward(loss, grads);
      }
      if (!std::isfinite(batch_loss)) throw NumericError("pretrain_low: non-finite loss");
      finalize_batch(grads, active, stop - start, adam);
      epoch_loss += batch_loss;
    }
    result_.pretrain_low_loss.push_back(epoch_loss / static_cast<double>(pairs.size()));
  }
  model_.pretrained_low = true;
  model_.pretrain_epochs_done += epochs;
  caches_valid_ = false;
}

void Trainer::pretrain_high(int epochs) {
  if (train_pairs_.empty()) throw DomainError("pretrain_high: empty corpus");
  if (!model_.pretrained_low) {
    throw StateError("pretrain_high: run pretrain_low first (clause vectors need LSTM^l)");
  }
  ensure_caches();
  const ParamId active_arr[] = {model_.lstm_high.wx, model_.lstm_high.wh, model_.lstm_high.b,
                                model_.dec.w, model_.dec.b};
  const std::span<const ParamId> active(active_arr);
  AdamState adam(model_.reg);
  Tape tape(model_.reg);
  GradStore grads(model_.reg);

  for (int epoch = 0; epoch < epochs; ++epoch) {
    auto pairs = train_pairs_;
    for (size_t i = pairs.size(); i > 1; --i) {
      std::swap(pairs[i - 1], pairs[static_cast<size_t>(model_.rng.uniform_int(0, i - 1))]);
    }
    double epoch_loss = 0;
    for (size_t start = 0; start < pairs.size(); start += static_cast<size_t>(model_.cfg.batch_size)) {
      const size_t stop = std::min(pairs.size(), start + static_cast<size_t>(model_.cfg.batch_size));
      grads.zero();
      double batch_loss = 0;
      for (size_t i = start; i < stop; ++i) {
        const auto& doc = corpus_.docs[pairs[i].first];
        const auto& query = doc.queries[pairs[i].second];
        tape.clear();
        const NodeId loss = forward_high(tape, pairs[i].first, query, /*train_mode=*/true);
        batch_loss += tape.scalar(loss);
        tape.backward(loss, grads);
      }
      if (!std::isfinite(batch_loss)) throw NumericError("pretrain_high: non-finite loss");
      finalize_batch(grads, active, stop - start, adam);
      epoch_loss += batch_loss;
    }
    result_.pretrain_high_loss.push_back(epoch_loss / static_cast<double>(pairs.size()));
  }
  model_.pretrained_high = true;
}

void Trainer::ensure_caches() {
  if (caches_valid_) return;
  const size_t d = static_cast<size_t>(model_.cfg.d);
  clause_vec_cache_.assign(corpus_.docs.size(), {});
  chain_state_cache_.assign(corpus_.docs.size(), Vector(d));
  for (size_t di = 0; di < corpus_.docs.size(); ++di) {
    const auto& doc = corpus_.docs[di];
    auto& vecs = clause_vec_cache_[di];
    vecs.reserve(doc.clauses.size());
    LstmState chain(d);
    for (const auto& clause : doc.clauses) {
      vecs.push_back(model_.clause_vector(clause));
      if (model_.cfg.reset_low_state_per_clause) chain = LstmState(d);
      for (int tok : clause.token_ids) {
        chain = lstm::step(model_.reg, model_.lstm_low, chain, model_.embedding_of(tok));
      }
    }
    chain_state_cache_[di] = chain.h;
  }
  caches_valid_ = true;
}

void Trainer::refresh_caches() {
  caches_valid_ = false;
  ensure_caches();
}

std::span<const Vector> Trainer::clause_vectors(size_t doc_index) {
  ensure_caches();
  return clause_vec_cache_[doc_index];
}

real Trainer::estimate_high_baseline(size_t doc_index, const AspectQuery& query, int m_samples,
                                     Rng& rng) {
  if (m_samples < 1) throw DomainError("estimate_high_baseline: m must be >= 1");
  ensure_caches();
  const auto& doc = corpus_.docs[doc_index];
  rollout::DocRunOptions opts;
  real sum = 0;
  for (int s = 0; s < m_samples; ++s) {
    const auto traj = rollout::run_document(model_, doc, query, clause_vec_cache_[doc_index],
                                            rng, opts);
    sum += traj.steps[0].reward;
  }
  return sum / static_cast<real>(m_samples);
}

real Trainer::estimate_low_baseline(const Clause& clause, int gold_rating,
                                    const LstmState& entry, int m_samples, Rng& rng) {
  if (m_samples < 1) throw DomainError("estimate_low_baseline: m must be >= 1");
  real sum = 0;
  for (int s = 0; s < m_samples; ++s) {
    LstmState chain = entry;
    const auto low =
        rollout::run_clause(model_, clause, gold_rating, chain, rng, DecodeMode::kSample);
    sum += low.step_reward;
  }
  return sum / static_cast<real>(m_samples);
}

void Trainer::train_one_document(size_t doc_index, const AspectQuery& query,
                                 double& high_reward_sum, double& low_reward_sum,
                                 size_t& low_count) {
  const auto& doc = corpus_.docs[doc_index];
  const auto& clause_vecs = clause_vec_cache_[doc_index];
  const Vector& v_a = model_.aspects[static_cast<size_t>(query.aspect_index)].embedding;
  const size_t d = static_cast<size_t>(model_.cfg.d);
  const size_t n = doc.clauses.size();

  HighTrajectory traj;
  traj.steps.reserve(n);
  traj.lows.resize(n);
  LstmState high_st(d);
  LstmState chain(d);

  for (size_t i = 0; i < n; ++i) {
    HighStep step;
    step.state = policy::high_state(high_st, clause_vecs[i], v_a);
    step.prob_select = policy::select_prob(model_.high_policy, step.state);
    step.option = policy::sample_binary(step.prob_select, model_.rng);
    if (step.option == 1) {
      if (model_.cfg.reset_low_state_per_clause) chain = LstmState(d);
      const LstmState entry = chain;
      LowTrajectory low = rollout::run_clause(model_, doc.clauses[i], query.rating, chain,
                                              model_.rng, DecodeMode::kSample);
      // Per-clause theta^l update (the low policy learns inside the document loop).
      const real b_l = estimate_low_baseline(doc.clauses[i], query.rating, entry,
                                             model_.cfg.baseline_samples, model_.rng);
      PolicyGradient gl = policy_gradient_low(low, b_l);
      policy::clip_gradient(gl.w, gl.b, static_cast<real>(model_.cfg.grad_clip));
      sgd_ascent_step(model_.low_policy, gl.w, gl.b, model_.cfg.sgd_lr);

      low_reward_sum += low.step_reward;
      ++low_count;
      traj.lows[i] = std::move(low);
      high_st = lstm::step(model_.reg, model_.lstm_high, high_st, clause_vecs[i]);
      traj.any_clause_selected = true;
    }
    step.coslog = policy::cosine_reward(v_a, high_st.h);
    traj.steps.push_back(std::move(step));
  }

  traj.v_hat_n = high_st.h;
  traj.w_hat_last = chain.h;
  traj.final_prob = predictor::delay_prob(model_.reg, model_.dec, predictor::Head::kClause,
                                          high_st.h, query.rating);
  policy::fill_high_rewards(traj, model_.cfg);

  const real b_h =
      estimate_high_baseline(doc_index, query, model_.cfg.baseline_samples, model_.rng);
  PolicyGradient gh = policy_gradient_high(traj, b_h);
  policy::clip_gradient(gh.w, gh.b, static_cast<real>(model_.cfg.grad_clip));
  sgd_ascent_step(model_.high_policy, gh.w, gh.b, model_.cfg.sgd_lr);

  high_reward_sum += traj.steps[0].reward;
}

void Trainer::train_policies(int epochs) {
  if (!model_.pretrained_low || !model_.pretrained_high) {
    throw StateError("train_policies: both pretraining stages must run first");
  }
  if (train_pairs_.empty()) throw DomainError("train_policies: empty corpus");
  ensure_caches();
  if (model_.cfg.aspect_embeddings_trainable) model_.recompute_aspect_embeddings();

  for (int epoch = 0; epoch < epochs; ++epoch) {
    auto pairs = train_pairs_;
    for (size_t i = pairs.size(); i > 1; --i) {
      std::swap(pairs[i - 1], pairs[static_cast<size_t>(model_.rng.uniform_int(0, i - 1))]);
    }
    double high_sum = 0, low_sum = 0;
    size_t low_count = 0;
    for (const auto& [di, qi] : pairs) {
      train_one_document(di, corpus_.docs[di].queries[qi], high_sum, low_sum, low_count);
    }
    check_finite(model_.high_policy.w.span(), "high policy weights");
    check_finite(model_.low_policy.w.span(), "low policy weights");
    result_.high_reward_curve.push_back(high_sum / static_cast<double>(pairs.size()));
    result_.low_reward_curve.push_back(
        low_count > 0 ? low_sum / static_cast<double>(low_count) : 0.0);
    if (model_.cfg.finetune_interleaved) {
      finetune_epoch();
      refresh_caches();
      if (model_.cfg.aspect_embeddings_trainable) model_.recompute_aspect_embeddings();
    }
  }
  model_.policies_trained = true;
  model_.policy_epochs_done += epochs;
}

void Trainer::finetune_epoch() {
  // Re-enables Eq.-9 learning of theta under the current (sampled)
  // selections; the final decoder sees selection-shaped representations.
  std::vector<ParamId> active;
  for (size_t i = 0; i < model_.reg.count(); ++i) active.push_back(static_cast<ParamId>(i));
  AdamState adam(model_.reg);
  Tape tape(model_.reg);
  GradStore grads(model_.reg);
  const size_t d = static_cast<size_t>(model_.cfg.d);

  auto pairs = train_pairs_;
  for (size_t i = pairs.size(); i > 1; --i) {
    std::swap(pairs[i - 1], pairs[static_cast<size_t>(model_.rng.uniform_int(0, i - 1))]);
  }
  for (size_t start = 0; start < pairs.size(); start += static_cast<size_t>(model_.cfg.batch_size)) {
    const size_t stop = std::min(pairs.size(), start + static_cast<size_t>(model_.cfg.batch_size));
    grads.zero();
    size_t used = 0;
    double batch_loss = 0;
    for (size_t i = start; i < stop; ++i) {
      const auto& doc = corpus_.docs[pairs[i].first];
      const auto& query = doc.queries[pairs[i].second];
      rollout::DocRunOptions opts;
      opts.compute_rewards = false;
      const auto traj = rollout::run_document(model_, doc, query,
                                              clause_vec_cache_[pairs[i].first], model_.rng, opts);
      if (!traj.any_clause_selected) continue;

      tape.clear();
      TracedLstmState high_st = lstm::zero_state_traced(tape, d);
      TracedLstmState word_chain = lstm::zero_state_traced(tape, d);
      for (size_t ci = 0; ci < doc.clauses.size(); ++ci) {
        if (traj.steps[ci].option != 1) continue;
        // Traced clause vector: LSTM^l over all words from a zero state.
        TracedLstmState clause_enc = lstm::zero_state_traced(tape, d);
        for (int tok : doc.clauses[ci].token_ids) {
          clause_enc = lstm::step_traced(tape, model_.lstm_low, clause_enc,
                                         tape.embed_row(model_.emb, static_cast<size_t>(tok)));
        }
        if (model_.cfg.reset_low_state_per_clause) word_chain = lstm::zero_state_traced(tape, d);
        for (size_t j = 0; j < doc.clauses[ci].token_ids.size(); ++j) {
          if (!traj.lows[ci].actions[j]) continue;
          word_chain = lstm::step_traced(
              tape, model_.lstm_low, word_chain,
              tape.embed_row(model_.emb, static_cast<size_t>(doc.clauses[ci].token_ids[j])));
        }
        high_st = lstm::step_traced(tape, model_.lstm_high, high_st, clause_enc.h);
      }
      NodeId z = tape.concat(high_st.h, word_chain.h);
      NodeId logits = tape.affine(model_.dec.w, z, model_.dec.b);
      NodeId loss = tape.softmax_cross_entropy(logits, query.rating);
      batch_loss += tape.scalar(loss);
      tape.backward(loss, grads);
      ++used;
    }
    if (used == 0) continue;
    if (!std::isfinite(batch_loss)) throw NumericError("finetune: non-finite loss");
    finalize_batch(grads, active, used, adam);
  }
}

void Trainer::run_all() {
  pretrain_low(model_.cfg.pretrain_epochs);
  pretrain_high(model_.cfg.pretrain_epochs);
  train_policies(model_.cfg.policy_epochs);
}

}  // namespace hrl
