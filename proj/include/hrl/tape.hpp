#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hrl/numeric.hpp"
#include "hrl/params.hpp"

namespace hrl {

using NodeId = std::int32_t;

/// Append-only record of primitive operations for reverse-mode gradient
/// computation. Forward values are computed eagerly at record time with the
/// same kernels the eager API uses, so traced and untraced forward passes
/// agree bitwise. One tape per example; single-owner, single-threaded.
///
/// Usage: record ops, call backward(loss, grads) once, then clear() before
/// the next trace. Parameters referenced by the tape must not change between
/// recording and backward.
class Tape {
 public:
  explicit Tape(const ParamRegistry& reg) : reg_(&reg) {}

  /// Drops all nodes and reopens the tape; buffer capacity is retained.
  void clear();

  size_t node_count() const { return nodes_.size(); }

  // --- leaves ---
  NodeId constant(std::span<const real> v);
  NodeId constant(const Vector& v) { return constant(v.span()); }
  NodeId param_vector(ParamId p);
  /// Row of a matrix parameter (embedding lookup). Gradients scatter into
  /// that row only.
  NodeId embed_row(ParamId table, size_t row);

  // --- ops ---
  NodeId affine(ParamId w, NodeId x, ParamId b);      // W x + b
  NodeId affine_add(ParamId w, NodeId x, NodeId prev);  // W x + prev
  NodeId add(NodeId a, NodeId b);
  NodeId mul(NodeId a, NodeId b);
  NodeId sigmoid(NodeId a);
  NodeId tanh(NodeId a);
  NodeId slice(NodeId a, size_t offset, size_t len);
  NodeId concat(NodeId a, NodeId b);
  NodeId dot(NodeId a, NodeId b);
  NodeId softmax(NodeId a);
  /// Fused softmax + cross-entropy against a 1-based label; scalar output.
  /// Logit gradient is probs - onehot(label).
  NodeId softmax_cross_entropy(NodeId logits, int label);

  std::span<const real> value(NodeId n) const;
  real scalar(NodeId n) const;
  size_t size(NodeId n) const;

  /// Reverse sweep from a recorded scalar; accumulates parameter gradients
  /// into `grads`. A second call without clear() throws StateError, as does
  /// a node id this tape never produced.
  void backward(NodeId loss, GradStore& grads);

 private:
  enum class Op : std::uint8_t {
    kConst,
    kParamVec,
    kEmbedRow,
    kAffine,
    kAffineAdd,
    kAdd,
    kMul,
    kSigmoid,
    kTanh,
    kSlice,
    kConcat,
    kDot,
    kSoftmax,
    kSoftmaxCE,
  };

  struct Node {
    Op op;
    NodeId a = -1, b = -1;
    ParamId pw = -1, pb = -1;
    std::uint32_t off = 0;   // offset into the value arena
    std::uint32_t len = 0;   // value length
    std::uint32_t aux = 0;   // slice offset / embed row / CE label / stash offset
  };

  NodeId push(Op op, size_t len);
  real* val(NodeId n) { return values_.data() + nodes_[static_cast<size_t>(n)].off; }
  const real* val(NodeId n) const { return values_.data() + nodes_[static_cast<size_t>(n)].off; }
  real* adj(NodeId n) { return adjoints_.data() + nodes_[static_cast<size_t>(n)].off; }
  void check_node(NodeId n) const;

  const ParamRegistry* reg_;
  std::vector<Node> nodes_;
  std::vector<real> values_;
  std::vector<real> adjoints_;
  std::vector<real> stash_;  // softmax probabilities saved for CE backward
  bool backward_done_ = false;
};

}  // namespace hrl
