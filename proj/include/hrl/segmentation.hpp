#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hrl/common.hpp"

namespace hrl {

/// Ordered token-id list for one clause, with its source character span.
struct Clause {
  std::vector<int> token_ids;
  size_t char_begin = 0, char_end = 0;
};

/// One (aspect, gold rating) query against a document.
struct AspectQuery {
  int aspect_index = -1;
  int rating = 0;  // in [1, C]
};

/// A review: ordered clause sequence plus its aspect queries. Gold selection
/// masks are present for synthetic data only.
struct Document {
  std::string id;
  std::vector<Clause> clauses;
  std::vector<AspectQuery> queries;
  std::vector<std::uint8_t> gold_clause_mask;             // empty or size n
  std::vector<std::vector<std::uint8_t>> gold_word_masks; // empty or per clause
  size_t total_words() const {
    size_t k = 0;
    for (const auto& c : clauses) k += c.token_ids.size();
    return k;
  }
};

namespace segmentation {

struct Token {
  std::string text;
  size_t begin = 0, end = 0;  // byte offsets into the source text
};

/// Lowercased whitespace-and-punctuation split; punctuation characters are
/// kept as separate single tokens ("don't" -> don ' t). ASCII-lowercasing;
/// non-ASCII codepoints other than CJK punctuation count as word characters.
std::vector<Token> tokenize_spans(const std::string& text);
std::vector<std::string> tokenize(const std::string& text);

/// Token index ranges [begin, end) of the clauses of one document.
struct ClauseBoundary {
  size_t token_begin = 0, token_end = 0;
};

/// Rule-based clause splitting over a token stream: hard boundaries after
/// sentence terminators (. ! ? and CJK equivalents), soft boundaries after
/// commas/semicolons and before connectives -- soft boundaries apply only
/// once the open clause holds at least two word tokens. Clauses shorter than
/// two tokens merge into the preceding clause. Deterministic.
std::vector<ClauseBoundary> split_clauses(const std::vector<Token>& tokens,
                                          const std::vector<std::string>& connectives);

/// Convenience: tokenize then split. Throws DomainError on all-whitespace
/// input. Returns clauses as grouped token text.
std::vector<std::vector<std::string>> split_clauses_text(
    const std::string& text, const std::vector<std::string>& connectives);

std::vector<std::string> default_connectives();

}  // namespace segmentation
}  // namespace hrl
