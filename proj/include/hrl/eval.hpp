#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "hrl/corpus.hpp"
#include "hrl/model.hpp"
#include "hrl/policy.hpp"

namespace hrl {

struct Prf {
  double precision = 0, recall = 0, f1 = 0;
};

/// Confusion counts for binary selection masks, micro-aggregated.
struct MaskCounts {
  size_t tp = 0, fp = 0, fn = 0;

  void add(std::span<const std::uint8_t> pred, std::span<const std::uint8_t> gold);
};

/// Empty-prediction precision is 0 when gold is non-empty and 1 when both
/// sides are empty (mirrored for recall).
Prf prf_from_counts(const MaskCounts& c);

namespace eval {

/// Fraction of exact matches. Throws DomainError on empty or mismatched input.
double accuracy(std::span<const int> preds, std::span<const int> golds);

/// Mean squared difference on the integer rating values.
double mse(std::span<const int> preds, std::span<const int> golds);

/// Affine min-max map onto [eps, 1-eps], eps = 1e-3, order-preserving.
/// A constant series is a DomainError ("degenerate reward series").
std::vector<double> normalize_rewards(std::span<const double> series);

struct AspectStats {
  size_t count = 0;
  size_t correct = 0;
  double squared_error = 0;
};

struct EvalResult {
  size_t count = 0;
  double accuracy = 0;
  double mse = 0;
  std::map<std::string, AspectStats> per_aspect;
  bool has_masks = false;
  MaskCounts clause_counts, word_counts;
  Prf clause_prf, word_prf;
  size_t fallback_count = 0;
};

/// Decode every (document, query) pair of the split and score it. Greedy
/// decode by default; `threads` parallelizes across documents (read-only
/// model). Deterministic for a fixed (seed, split) regardless of thread
/// count: per-document RNG substreams, merged in document order.
EvalResult evaluate(const Model& model, const Corpus& corpus, Split split, DecodeMode mode,
                    int threads, std::uint64_t seed);

/// One line-delimited JSON record per metric group.
std::string to_json_lines(const EvalResult& r);
/// Human-readable summary table.
std::string to_table(const EvalResult& r, int rating_scale);

}  // namespace eval
}  // namespace hrl
