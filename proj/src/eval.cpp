#include "hrl/eval.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "hrl/predictor.hpp"
#include "hrl/rollout.hpp"

namespace hrl {

void MaskCounts::add(std::span<const std::uint8_t> pred, std::span<const std::uint8_t> gold) {
  if (pred.size() != gold.size()) {
    throw ShapeError("selection_metrics: predicted mask length " + std::to_string(pred.size()) +
                     " vs gold mask length " + std::to_string(gold.size()));
  }
  for (size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] && gold[i]) ++tp;
    else if (pred[i] && !gold[i]) ++fp;
    else if (!pred[i] && gold[i]) ++fn;
  }
}

Prf prf_from_counts(const MaskCounts& c) {
  Prf out;
  const bool gold_empty = c.tp + c.fn == 0;
  const bool pred_empty = c.tp + c.fp == 0;
  out.precision = !pred_empty ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp)
                              : (gold_empty ? 1.0 : 0.0);
  out.recall = !gold_empty ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn)
                           : (pred_empty ? 1.0 : 0.0);
  out.f1 = (out.precision + out.recall) > 0
               ? 2.0 * out.precision * out.recall / (out.precision + out.recall)
               : 0.0;
  return out;
}

namespace eval {

double accuracy(std::span<const int> preds, std::span<const int> golds) {
  if (preds.empty() || preds.size() != golds.size()) {
    throw DomainError("accuracy: need equal, nonzero lengths");
  }
  size_t hit = 0;
  for (size_t i = 0; i < preds.size(); ++i) {
    if (preds[i] == golds[i]) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(preds.size());
}

double mse(std::span<const int> preds, std::span<const int> golds) {
  if (preds.empty() || preds.size() != golds.size()) {
    throw DomainError("mse: need equal, nonzero lengths");
  }
  double sum = 0;
  for (size_t i = 0; i < preds.size(); ++i) {
    const double diff = static_cast<double>(preds[i] - golds[i]);
    sum += diff * diff;
  }
  return sum / static_cast<double>(preds.size());
}

std::vector<double> normalize_rewards(std::span<const double> series) {
  constexpr double kEps = 1e-3;
  if (series.size() < 2) throw DomainError("normalize_rewards: need at least two values");
  const auto [lo_it, hi_it] = std::minmax_element(series.begin(), series.end());
  if (*lo_it == *hi_it) throw DomainError("degenerate reward series");
  const double lo = *lo_it, hi = *hi_it;
  std::vector<double> out;
  out.reserve(series.size());
  for (double v : series) {
    out.push_back(kEps + (v - lo) * (1.0 - 2.0 * kEps) / (hi - lo));
  }
  return out;
}

namespace {

struct PairOutcome {
  int pred = 0;
  int gold = 0;
  std::string aspect;
  bool fallback = false;
  bool has_masks = false;
  MaskCounts clause_counts, word_counts;
};

PairOutcome evaluate_pair(const Model& model, const Corpus& corpus, size_t di, size_t qi,
                          const std::vector<Vector>& clause_vecs, DecodeMode mode,
                          std::uint64_t seed) {
  const auto& doc = corpus.docs[di];
  const auto& query = doc.queries[qi];
  Rng rng(mix_seed(mix_seed(seed ^ static_cast<std::uint64_t>(di)) ^
                   static_cast<std::uint64_t>(qi)));
  rollout::DocRunOptions opts;
  opts.mode = mode;
  opts.compute_rewards = false;
  const auto traj = rollout::run_document(model, doc, query, clause_vecs, rng, opts);

  PairOutcome out;
  out.gold = query.rating;
  out.aspect = corpus.aspects[static_cast<size_t>(query.aspect_index)].name;
  if (!traj.any_clause_selected) {
    out.pred = predictor::fallback_random_rating(rng, model.cfg.num_classes);
    out.fallback = true;
  } else {
    const Vector z = predictor::document_representation(traj.v_hat_n, traj.w_hat_last);
    out.pred = predictor::predict(model.reg, model.dec, z).rating;
  }
  if (!doc.gold_clause_mask.empty()) {
    out.has_masks = true;
    out.clause_counts.add(rollout::clause_mask(traj), doc.gold_clause_mask);
    const auto predicted_words = rollout::word_masks(traj, doc);
    for (size_t c = 0; c < doc.clauses.size(); ++c) {
      out.word_counts.add(predicted_words[c], doc.gold_word_masks[c]);
    }
  }
  return out;
}

}  // namespace

EvalResult evaluate(const Model& model, const Corpus& corpus, Split split, DecodeMode mode,
                    int threads, std::uint64_t seed) {
  std::vector<std::pair<size_t, size_t>> pairs;
  for (size_t di : corpus.indices(split)) {
    for (size_t qi = 0; qi < corpus.docs[di].queries.size(); ++qi) pairs.emplace_back(di, qi);
  }
  if (pairs.empty()) throw DomainError("evaluate: split holds no documents");
  if (corpus.num_classes != model.cfg.num_classes) {
    throw FormatError("evaluate: corpus rating scale " + std::to_string(corpus.num_classes) +
                      " vs model rating scale " + std::to_string(model.cfg.num_classes) +
                      " (dimension mismatch)");
  }

  std::vector<PairOutcome> outcomes(pairs.size());
  const size_t worker_count =
      std::max<size_t>(1, std::min<size_t>(static_cast<size_t>(threads), pairs.size()));
  auto run_range = [&](size_t begin, size_t end) {
    // Clause vectors are recomputed per document here; evaluation is not on
    // the training hot path.
    for (size_t k = begin; k < end; ++k) {
      const auto [di, qi] = pairs[k];
      std::vector<Vector> clause_vecs;
      clause_vecs.reserve(corpus.docs[di].clauses.size());
      for (const auto& clause : corpus.docs[di].clauses) {
        clause_vecs.push_back(model.clause_vector(clause));
      }
      outcomes[k] = evaluate_pair(model, corpus, di, qi, clause_vecs, mode, seed);
    }
  };
  if (worker_count == 1) {
    run_range(0, pairs.size());
  } else {
    std::vector<std::thread> workers;
    const size_t chunk = (pairs.size() + worker_count - 1) / worker_count;
    for (size_t w = 0; w < worker_count; ++w) {
      const size_t begin = w * chunk;
      const size_t end = std::min(pairs.size(), begin + chunk);
      if (begin >= end) break;
      workers.emplace_back(run_range, begin, end);
    }
    for (auto& t : workers) t.join();
  }

  EvalResult r;
  std::vector<int> preds, golds;
  preds.reserve(outcomes.size());
  golds.reserve(outcomes.size());
  for (const auto& o : outcomes) {
    preds.push_back(o.pred);
    golds.push_back(o.gold);
    auto& a = r.per_aspect[o.aspect];
    ++a.count;
    if (o.pred == o.gold) ++a.correct;
    const double diff = static_cast<double>(o.pred - o.gold);
    a.squared_error += diff * diff;
    if (o.fallback) ++r.fallback_count;
    if (o.has_masks) {
      r.has_masks = true;
      r.clause_counts.tp += o.clause_counts.tp;
      r.clause_counts.fp += o.clause_counts.fp;
      r.clause_counts.fn += o.clause_counts.fn;
      r.word_counts.tp += o.word_counts.tp;
      r.word_counts.fp += o.word_counts.fp;
      r.word_counts.fn += o.word_counts.fn;
    }
  }
  r.count = outcomes.size();
  r.accuracy = accuracy(preds, golds);
  r.mse = mse(preds, golds);
  if (r.has_masks) {
    r.clause_prf = prf_from_counts(r.clause_counts);
    r.word_prf = prf_from_counts(r.word_counts);
  }
  return r;
}

std::string to_json_lines(const EvalResult& r) {
  using nlohmann::json;
  std::ostringstream os;
  {
    json j;
    j["record"] = "overall";
    j["count"] = r.count;
    j["accuracy"] = r.accuracy;
    j["mse"] = r.mse;
    j["fallback_random_predictions"] = r.fallback_count;
    os << j.dump() << '\n';
  }
  for (const auto& [name, stats] : r.per_aspect) {
    json j;
    j["record"] = "aspect";
    j["aspect"] = name;
    j["count"] = stats.count;
    j["accuracy"] = stats.count ? static_cast<double>(stats.correct) / stats.count : 0.0;
    j["mse"] = stats.count ? stats.squared_error / stats.count : 0.0;
    os << j.dump() << '\n';
  }
  if (r.has_masks) {
    json j;
    j["record"] = "selection";
    j["clause_precision"] = r.clause_prf.precision;
    j["clause_recall"] = r.clause_prf.recall;
    j["clause_f1"] = r.clause_prf.f1;
    j["word_precision"] = r.word_prf.precision;
    j["word_recall"] = r.word_prf.recall;
    j["word_f1"] = r.word_prf.f1;
    os << j.dump() << '\n';
  }
  return os.str();
}

std::string to_table(const EvalResult& r, int rating_scale) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(4);
  os << "rating scale 1-" << rating_scale << ", " << r.count << " (document, aspect) pairs\n";
  os << "accuracy " << r.accuracy << "  mse " << r.mse << "  fallback " << r.fallback_count
     << "\n";
  for (const auto& [name, s] : r.per_aspect) {
    os << "  " << name << ": acc "
       << (s.count ? static_cast<double>(s.correct) / s.count : 0.0) << "  mse "
       << (s.count ? s.squared_error / s.count : 0.0) << "  n " << s.count << "\n";
  }
  if (r.has_masks) {
    os << "clause selection P/R/F1 " << r.clause_prf.precision << "/" << r.clause_prf.recall
       << "/" << r.clause_prf.f1 << "\n";
    os << "word selection   P/R/F1 " << r.word_prf.precision << "/" << r.word_prf.recall << "/"
       << r.word_prf.f1 << "\n";
  }
  return os.str();
}

}  // namespace eval
}  // namespace hrl
