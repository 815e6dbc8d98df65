#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "hrl/common.hpp"

namespace hrl {

/// Token-to-id map with dense ids in [0, size). Id 0 is reserved for unknown
/// tokens and is stable across runs.
class Vocab {
 public:
  static constexpr int kUnknownId = 0;

  Vocab() { add(unknown_token()); }
  static const std::string& unknown_token() {
    static const std::string tok = "<unk>";
    return tok;
  }

  /// Inserts the token if absent; returns its id.
  int add(const std::string& token) {
    auto it = index_.find(token);
    if (it != index_.end()) return it->second;
    const int id = static_cast<int>(tokens_.size());
    tokens_.push_back(token);
    index_.emplace(tokens_.back(), id);
    return id;
  }

  /// Id for a token; unknown tokens map to kUnknownId.
  int id(const std::string& token) const {
    auto it = index_.find(token);
    return it == index_.end() ? kUnknownId : it->second;
  }

  bool contains(const std::string& token) const { return index_.count(token) != 0; }
  const std::string& token(int id) const { return tokens_.at(static_cast<size_t>(id)); }
  size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

}  // namespace hrl
