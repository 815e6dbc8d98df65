#pragma once

#include "hrl/corpus.hpp"
#include "hrl/model.hpp"

namespace testutil {

/// Small model over a fixed toy vocabulary, for rollout-level tests.
inline hrl::Model make_tiny_model(int d = 4, int num_classes = 3, std::uint64_t seed = 123) {
  hrl::Config cfg;
  cfg.d = d;
  cfg.num_classes = num_classes;
  cfg.seed = seed;
  cfg.dropout = 0.0;
  hrl::Vocab vocab;
  for (const char* t : {"good", "bad", "location", "room", "the", "was", "very", "ugly"}) {
    vocab.add(t);
  }
  std::vector<hrl::AspectInfo> aspects = {{"location", {"location"}}, {"room", {"room"}}};
  return hrl::Model::create(cfg, vocab, aspects);
}

inline hrl::Clause make_clause(const hrl::Vocab& vocab, std::initializer_list<const char*> toks) {
  hrl::Clause c;
  for (const char* t : toks) c.token_ids.push_back(vocab.id(t));
  return c;
}

}  // namespace testutil
