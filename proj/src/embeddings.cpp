#include "hrl/embeddings.hpp"

#include <fstream>
#include <sstream>

#include "hrl/errors.hpp"

namespace hrl::embeddings {

void init_random(std::vector<real>& table, Rng& rng) {
  for (real& v : table) v = static_cast<real>(rng.uniform(-0.1, 0.1));
}

void init_random(Matrix& table, Rng& rng) {
  for (size_t i = 0; i < table.size(); ++i) table.data()[i] = static_cast<real>(rng.uniform(-0.1, 0.1));
}

Vector lookup(const ParamRegistry& reg, ParamId table, int token_id) {
  const auto& e = reg.at(table);
  if (token_id < 0 || static_cast<size_t>(token_id) >= e.rows) {
    throw DomainError("embedding lookup: id " + std::to_string(token_id) +
                      " outside vocab of size " + std::to_string(e.rows));
  }
  Vector out(e.cols);
  const real* row = e.value.data() + static_cast<size_t>(token_id) * e.cols;
  for (size_t j = 0; j < e.cols; ++j) out[j] = row[j];
  return out;
}

Vector aspect_embedding(const ParamRegistry& reg, ParamId table,
                        const std::vector<int>& keyword_ids) {
  if (keyword_ids.empty()) throw DomainError("aspect_embedding: empty keyword list");
  const auto& e = reg.at(table);
  Vector out(e.cols);
  for (int id : keyword_ids) {
    if (id < 0 || static_cast<size_t>(id) >= e.rows) {
      throw DomainError("aspect_embedding: keyword id " + std::to_string(id) +
                        " outside vocab of size " + std::to_string(e.rows));
    }
    const real* row = e.value.data() + static_cast<size_t>(id) * e.cols;
    for (size_t j = 0; j < e.cols; ++j) out[j] += row[j];
  }
  const real inv = real(1) / static_cast<real>(keyword_ids.size());
  for (size_t j = 0; j < out.size(); ++j) out[j] *= inv;
  return out;
}

size_t load_embeddings(const std::string& path, const Vocab& vocab,
                       ParamRegistry& reg, ParamId table, std::uint64_t seed) {
  auto& e = reg.at(table);
  if (e.rows != vocab.size()) {
    throw ShapeError("load_embeddings: table has " + std::to_string(e.rows) +
                     " rows, vocab has " + std::to_string(vocab.size()));
  }
  std::ifstream in(path);
  if (!in) throw FormatError("load_embeddings: cannot open '" + path + "'");

  // Random-init everything first, then overwrite rows found in the file.
  Rng rng(mix_seed(seed ^ 0x656d62ULL));  // "emb"
  init_random(e.value, rng);

  std::string line;
  size_t lineno = 0;
  size_t loaded = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream is(line);
    std::string token;
    is >> token;
    std::vector<real> row;
    double v;
    while (is >> v) row.push_back(static_cast<real>(v));
    if (row.size() != e.cols) {
      throw FormatError("load_embeddings: line " + std::to_string(lineno) + ": expected " +
                        std::to_string(e.cols) + " values, got " + std::to_string(row.size()));
    }
    if (!vocab.contains(token)) continue;
    const size_t id = static_cast<size_t>(vocab.id(token));
    std::copy(row.begin(), row.end(), e.value.begin() + id * e.cols);
    ++loaded;
  }
  return loaded;
}

}  // namespace hrl::embeddings
