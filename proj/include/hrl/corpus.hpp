#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "hrl/config.hpp"
#include "hrl/segmentation.hpp"
#include "hrl/vocab.hpp"

namespace hrl {

/// Aspect inventory entry: name plus the keyword lexicon the aspect
/// embedding is averaged from.
struct AspectInfo {
  std::string name;
  std::vector<std::string> keywords;
};

enum class Split : int { kTrain = 0, kDev = 1, kTest = 2 };

/// Documents, aspect inventory, rating scale and the 8:1:1 split assignment.
struct Corpus {
  std::vector<Document> docs;
  std::vector<AspectInfo> aspects;
  int num_classes = 5;
  Vocab vocab;
  std::vector<int> split;  // per document, values of Split

  std::vector<size_t> indices(Split s) const {
    std::vector<size_t> out;
    for (size_t i = 0; i < docs.size(); ++i) {
      if (split[i] == static_cast<int>(s)) out.push_back(i);
    }
    return out;
  }

  int aspect_index(const std::string& name) const {
    for (size_t i = 0; i < aspects.size(); ++i) {
      if (aspects[i].name == name) return static_cast<int>(i);
    }
    return -1;
  }
};

/// Synthetic corpus recipe with planted ground-truth selections.
struct SyntheticSpec {
  struct Aspect {
    std::string name;
    std::vector<std::string> keywords;
    // sentiment_words[r-1] lists the words planted for rating r.
    std::vector<std::vector<std::string>> sentiment_words;
  };

  int num_documents = 200;
  std::array<int, 2> clauses_per_doc = {3, 5};
  std::array<int, 2> words_per_clause = {4, 8};
  double noise_clause_ratio = 0.5;
  double noise_word_ratio = 0.5;
  int num_classes = 5;
  std::uint64_t seed = 7;
  std::vector<Aspect> aspects;
  std::vector<std::string> fillers;

  static SyntheticSpec from_file(const std::string& path);
  std::string to_json() const;
  void validate() const;
};

namespace data {

/// Line-delimited JSON, one document per line after a header record that
/// names the aspects file and the rating scale. Pre-segmented clause lists
/// are accepted verbatim; raw text passes through segmentation. When
/// `fixed_vocab` is given (evaluation against a checkpoint) tokens outside
/// it map to the unknown id; otherwise the vocab is built from the corpus.
Corpus load_corpus(const std::string& path, const Config& cfg,
                   const Vocab* fixed_vocab = nullptr);

/// Writes corpus.jsonl plus the referenced aspects file.
void save_corpus(const Corpus& corpus, const std::string& corpus_path,
                 const std::string& aspects_path);

std::vector<AspectInfo> load_aspects_file(const std::string& path);

/// Deterministic 8:1:1 assignment; a pure function of (count, seed),
/// remainders go to train.
std::vector<int> assign_splits(size_t count, std::uint64_t seed);

/// Build a corpus with planted gold clause/word masks. Every document gets
/// one aspect query; gold clauses hold the aspect keyword and exactly one
/// sentiment word for the gold rating, noise clauses mention other aspects
/// or pure filler and never carry sentiment words.
Corpus generate_synthetic(const SyntheticSpec& spec);

/// A ready-made recipe: `num_aspects` aspects with three keywords each and
/// two sentiment words per rating level, plus a shared filler lexicon.
SyntheticSpec default_spec(int num_documents, int num_aspects, int num_classes,
                           double noise_clause_ratio, double noise_word_ratio,
                           std::uint64_t seed);

}  // namespace data
}  // namespace hrl
