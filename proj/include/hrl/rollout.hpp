#pragma once

#include <span>

#include "hrl/model.hpp"

namespace hrl::rollout {

/// Word selection inside one selected clause. Scans words left to right,
/// building s^l from the carried chain state, choosing an action per the
/// mode, stepping or skipping LSTM^l accordingly. `chain` is updated in
/// place (the word LSTM persists across selected clauses unless the
/// per-clause reset flag is set, which the caller applies).
/// `forced` overrides sampling with a fixed action mask when non-null.
LowTrajectory run_clause(const Model& m, const Clause& clause, int gold_rating,
                         LstmState& chain, Rng& rng, DecodeMode mode,
                         const std::vector<std::uint8_t>* forced = nullptr);

struct DocRunOptions {
  DecodeMode mode = DecodeMode::kSample;
  bool compute_rewards = true;
  const std::vector<std::uint8_t>* forced_options = nullptr;
  const std::vector<std::vector<std::uint8_t>>* forced_actions = nullptr;
};

/// Full hierarchical rollout over one document and aspect query.
/// `clause_vectors` are the cached v_i (one per clause).
HighTrajectory run_document(const Model& m, const Document& doc, const AspectQuery& query,
                            std::span<const Vector> clause_vectors, Rng& rng,
                            const DocRunOptions& opts);

/// Predicted-selection masks of a trajectory, shaped like the document.
std::vector<std::uint8_t> clause_mask(const HighTrajectory& traj);
std::vector<std::vector<std::uint8_t>> word_masks(const HighTrajectory& traj,
                                                  const Document& doc);

}  // namespace hrl::rollout
