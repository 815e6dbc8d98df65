#pragma once

#include <string>
#include <vector>

#include "hrl/numeric.hpp"
#include "hrl/params.hpp"
#include "hrl/rng.hpp"
#include "hrl/vocab.hpp"

namespace hrl {

/// A rated facet of the reviewed item. The aspect embedding is the
/// arithmetic mean of its keywords' embedding rows.
struct AspectSpec {
  std::string name;
  std::vector<std::string> keywords;
  std::vector<int> keyword_ids;
  Vector embedding;  // v_a, dimension d
};

namespace embeddings {

/// Fill a |V| x d table with U(-0.1, 0.1) draws; deterministic under seed.
void init_random(Matrix& table, Rng& rng);
void init_random(std::vector<real>& table, Rng& rng);

/// Embedding row copy. Throws DomainError when id >= |V|.
Vector lookup(const ParamRegistry& reg, ParamId table, int token_id);

/// Elementwise mean of the keyword rows; permutation-invariant. Throws
/// DomainError on an empty keyword list.
Vector aspect_embedding(const ParamRegistry& reg, ParamId table,
                        const std::vector<int>& keyword_ids);

/// Read "token v1 .. vd" lines into rows of `table` for tokens present in
/// `vocab`; remaining rows are drawn from U(-0.1, 0.1) with `seed`. A line
/// whose vector length differs from d raises FormatError with its number.
/// Returns the count of rows taken from the file.
size_t load_embeddings(const std::string& path, const Vocab& vocab,
                       ParamRegistry& reg, ParamId table, std::uint64_t seed);

}  // namespace embeddings
}  // namespace hrl
