#pragma once

#include <string>
#include <vector>

#include "hrl/config.hpp"
#include "hrl/corpus.hpp"
#include "hrl/embeddings.hpp"
#include "hrl/lstm.hpp"
#include "hrl/policy.hpp"
#include "hrl/predictor.hpp"

namespace hrl {

/// Every learnable piece of the system plus its lifecycle flags.
///
/// Parameter groups:
///   theta    -- embedding table, both LSTMs, both decoder heads (registry);
///               trained by cross-entropy during pretraining, frozen after.
///   theta^h  -- high-level logistic policy, trained by policy gradient.
///   theta^l  -- low-level logistic policy, trained by policy gradient.
struct Model {
  Config cfg;
  Vocab vocab;
  std::vector<AspectSpec> aspects;

  ParamRegistry reg;
  ParamId emb = -1;  // |V| x d, excluded from the L2 regularizer
  LstmParams lstm_low, lstm_high;
  DecoderParams dec;
  LogisticPolicy high_policy, low_policy;

  bool pretrained_low = false;
  bool pretrained_high = false;
  bool policies_trained = false;
  int pretrain_epochs_done = 0;
  int policy_epochs_done = 0;
  Rng rng;  // the run stream; persisted in checkpoints

  /// Fresh model with randomized parameters (deterministic under cfg.seed).
  /// Aspect embeddings are averaged from the keyword rows at construction.
  static Model create(const Config& cfg, const Vocab& vocab,
                      const std::vector<AspectInfo>& aspect_infos);

  /// Re-average every aspect embedding from the current keyword rows
  /// (used when cfg.aspect_embeddings_trainable is set, after pretraining).
  void recompute_aspect_embeddings();

  /// LSTM^l over all words of the clause from the zero state; the final
  /// hidden state is the clause vector v_i. Throws DomainError when empty.
  Vector clause_vector(const Clause& clause) const;

  Vector embedding_of(int token_id) const {
    return embeddings::lookup(reg, emb, token_id);
  }

  /// Versioned binary container; save -> load -> save is byte-identical.
  void save(const std::string& path) const;
  static Model load(const std::string& path);

  /// Raw bytes of the theta group, for frozen-parameter assertions.
  std::string theta_fingerprint() const;
};

}  // namespace hrl
