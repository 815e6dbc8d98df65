#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hrl/common.hpp"

namespace hrl {

/// Every hyperparameter of the run. Defaults are the published values where
/// the source material states them; the rest are artifact defaults recorded
/// here so a config file plus seed reproduces a run exactly.
struct Config {
  // model
  int d = 200;           // hidden and embedding dimension
  int num_classes = 5;   // rating scale C, ratings in [1, C]

  // reward shaping
  double gamma = 0.8;
  double lambda1 = 0.25;  // cosine intermediate reward weight
  double lambda2 = 0.25;  // low-level reward weight
  double lambda3 = 0.5;   // final delay reward weight
  double lambda_low1 = 0.6;  // low-level delay reward weight
  double lambda_low2 = 0.4;  // selection penalty weight

  // optimization
  double adam_lr = 0.012;  // cross-entropy (pretraining) steps
  double sgd_lr = 0.008;   // policy-gradient steps
  int batch_size = 64;     // pretraining only; policy updates are per document
  double l2_weight = 1e-5;
  double dropout = 0.2;        // LSTM inputs, pretraining only
  double grad_clip = 5.0;      // L2 clip on policy gradients
  int baseline_samples = 5;    // m
  int pretrain_epochs = 5;
  int policy_epochs = 8;
  std::uint64_t seed = 42;

  // behavior switches
  bool aspect_embeddings_trainable = false;  // recompute v_a from trained keyword rows
  bool reset_low_state_per_clause = false;   // ablation: word LSTM state not carried
  bool finetune_interleaved = false;  // re-enable theta updates between policy epochs
  bool greedy_decode = true;          // evaluation decode mode
  int threads = 1;                    // evaluation only
  std::string kernel_backend = "auto";  // auto | scalar | avx2
  std::string connectives = "but,and,although,while,because";

  /// Parse "key = value" lines; '#' starts a comment. Unknown keys throw
  /// UsageError naming the key.
  static Config from_file(const std::string& path);
  static Config from_text(const std::string& text);

  /// Apply one "key=value" override (the --set flag).
  void set(const std::string& key, const std::string& value);

  /// Canonical text form: fixed key order, round-trip-exact numbers.
  std::string to_text() const;

  /// Basic sanity (gamma in (0,1], weights >= 0, d > 0, C >= 2, ...).
  void validate() const;

  std::vector<std::string> connective_list() const;
};

}  // namespace hrl
