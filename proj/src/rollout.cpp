#include "hrl/rollout.hpp"

#include "hrl/errors.hpp"

namespace hrl::rollout {

using namespace policy;

LowTrajectory run_clause(const Model& m, const Clause& clause, int gold_rating,
                         LstmState& chain, Rng& rng, DecodeMode mode,
                         const std::vector<std::uint8_t>* forced) {
  if (forced != nullptr && forced->size() != clause.token_ids.size()) {
    throw ShapeError("run_clause: forced mask length " + std::to_string(forced->size()) +
                     " vs clause length " + std::to_string(clause.token_ids.size()));
  }
  LowTrajectory traj;
  traj.length = static_cast<int>(clause.token_ids.size());
  traj.states.reserve(clause.token_ids.size());
  for (size_t j = 0; j < clause.token_ids.size(); ++j) {
    const Vector w_ij = m.embedding_of(clause.token_ids[j]);
    Vector s = low_state(chain, w_ij);
    const real q = select_prob(m.low_policy, s);
    int a;
    if (forced != nullptr) {
      a = (*forced)[j] ? 1 : 0;
    } else if (mode == DecodeMode::kGreedy) {
      a = greedy_binary(q);
    } else {
      a = sample_binary(q, rng);
    }
    if (a == 1) {
      chain = lstm::step(m.reg, m.lstm_low, chain, w_ij);
      ++traj.selected;
    }
    traj.states.push_back(std::move(s));
    traj.actions.push_back(static_cast<std::uint8_t>(a));
    traj.probs.push_back(q);
  }
  traj.clause_prob = predictor::delay_prob(m.reg, m.dec, predictor::Head::kClause, chain.h,
                                           gold_rating);
  traj.step_reward = low_reward(traj.clause_prob, traj.selected, traj.length, m.cfg);
  return traj;
}

HighTrajectory run_document(const Model& m, const Document& doc, const AspectQuery& query,
                            std::span<const Vector> clause_vectors, Rng& rng,
                            const DocRunOptions& opts) {
  const size_t n = doc.clauses.size();
  if (clause_vectors.size() != n) {
    throw ShapeError("run_document: " + std::to_string(clause_vectors.size()) +
                     " clause vectors for " + std::to_string(n) + " clauses");
  }
  if (query.aspect_index < 0 || static_cast<size_t>(query.aspect_index) >= m.aspects.size()) {
    throw DomainError("run_document: aspect index " + std::to_string(query.aspect_index) +
                      " outside the inventory");
  }
  const Vector& v_a = m.aspects[static_cast<size_t>(query.aspect_index)].embedding;
  const size_t d = static_cast<size_t>(m.cfg.d);

  HighTrajectory traj;
  traj.steps.reserve(n);
  traj.lows.resize(n);
  LstmState high_state_cur(d);
  LstmState chain(d);

  for (size_t i = 0; i < n; ++i) {
    HighStep step;
    step.state = high_state(high_state_cur, clause_vectors[i], v_a);
    step.prob_select = select_prob(m.high_policy, step.state);
    if (opts.forced_options != nullptr) {
      step.option = (*opts.forced_options)[i] ? 1 : 0;
    } else if (opts.mode == DecodeMode::kGreedy) {
      step.option = greedy_binary(step.prob_select);
    } else {
      step.option = sample_binary(step.prob_select, rng);
    }
    if (step.option == 1) {
      if (m.cfg.reset_low_state_per_clause) chain = LstmState(d);
      const std::vector<std::uint8_t>* forced =
          opts.forced_actions != nullptr ? &(*opts.forced_actions)[i] : nullptr;
      traj.lows[i] =
          run_clause(m, doc.clauses[i], query.rating, chain, rng, opts.mode, forced);
      high_state_cur = lstm::step(m.reg, m.lstm_high, high_state_cur, clause_vectors[i]);
      traj.any_clause_selected = true;
    }
    step.coslog = cosine_reward(v_a, high_state_cur.h);
    traj.steps.push_back(std::move(step));
  }

  traj.v_hat_n = high_state_cur.h;
  traj.w_hat_last = chain.h;
  traj.final_prob = predictor::delay_prob(m.reg, m.dec, predictor::Head::kClause,
                                          high_state_cur.h, query.rating);
  if (opts.compute_rewards) fill_high_rewards(traj, m.cfg);
  return traj;
}

std::vector<std::uint8_t> clause_mask(const HighTrajectory& traj) {
  std::vector<std::uint8_t> mask;
  mask.reserve(traj.steps.size());
  for (const auto& s : traj.steps) mask.push_back(static_cast<std::uint8_t>(s.option));
  return mask;
}

std::vector<std::vector<std::uint8_t>> word_masks(const HighTrajectory& traj,
                                                  const Document& doc) {
  std::vector<std::vector<std::uint8_t>> masks(traj.steps.size());
  for (size_t i = 0; i < traj.steps.size(); ++i) {
    if (traj.steps[i].option == 1) {
      masks[i] = traj.lows[i].actions;
    } else {
      masks[i].assign(doc.clauses[i].token_ids.size(), 0);
    }
  }
  return masks;
}

}  // namespace hrl::rollout
