#pragma once

#include <string>
#include <vector>

#include "hrl/common.hpp"
#include "hrl/errors.hpp"

namespace hrl {

using ParamId = int;

/// Owns the trainable parameters of the theta group (both LSTMs, the
/// embedding table, decoder heads). Registration order is the serialization
/// and optimizer iteration order, so runs are reproducible byte for byte.
class ParamRegistry {
 public:
  struct Entry {
    std::string name;
    size_t rows = 0, cols = 0;  // cols == 0 marks a vector of length `rows`
    std::vector<real> value;
    bool l2 = true;  // participates in the L2 regularizer
  };

  ParamId add_matrix(const std::string& name, size_t rows, size_t cols, bool l2 = true) {
    entries_.push_back({name, rows, cols, std::vector<real>(rows * cols, real(0)), l2});
    return static_cast<ParamId>(entries_.size() - 1);
  }

  ParamId add_vector(const std::string& name, size_t n, bool l2 = true) {
    entries_.push_back({name, n, 0, std::vector<real>(n, real(0)), l2});
    return static_cast<ParamId>(entries_.size() - 1);
  }

  Entry& at(ParamId id) { return entries_.at(static_cast<size_t>(id)); }
  const Entry& at(ParamId id) const { return entries_.at(static_cast<size_t>(id)); }
  size_t count() const { return entries_.size(); }

  size_t elements() const {
    size_t total = 0;
    for (const auto& e : entries_) total += e.value.size();
    return total;
  }

 private:
  std::vector<Entry> entries_;
};

/// Gradient buffers mirroring a ParamRegistry. Parameters untouched by a
/// backward pass keep zero gradients.
class GradStore {
 public:
  explicit GradStore(const ParamRegistry& reg) : reg_(&reg) {
    grads_.resize(reg.count());
    for (size_t i = 0; i < grads_.size(); ++i) {
      grads_[i].assign(reg.at(static_cast<ParamId>(i)).value.size(), real(0));
    }
  }

  void zero() {
    for (auto& g : grads_) g.assign(g.size(), real(0));
  }

  std::vector<real>& grad(ParamId id) { return grads_.at(static_cast<size_t>(id)); }
  const std::vector<real>& grad(ParamId id) const { return grads_.at(static_cast<size_t>(id)); }
  const ParamRegistry& registry() const { return *reg_; }

 private:
  const ParamRegistry* reg_;
  std::vector<std::vector<real>> grads_;
};

}  // namespace hrl
