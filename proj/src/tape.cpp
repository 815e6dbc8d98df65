#include "hrl/tape.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "hrl/kernels.hpp"

namespace hrl {

namespace {

void shape_mismatch(const char* op, size_t a, size_t b) {
  throw ShapeError(std::string(op) + ": " + std::to_string(a) + " vs " + std::to_string(b));
}

}  // namespace

void Tape::clear() {
  nodes_.clear();
  values_.clear();
  stash_.clear();
  backward_done_ = false;
}

NodeId Tape::push(Op op, size_t len) {
  Node n;
  n.op = op;
  n.off = static_cast<std::uint32_t>(values_.size());
  n.len = static_cast<std::uint32_t>(len);
  values_.resize(values_.size() + len, real(0));
  nodes_.push_back(n);
  return static_cast<NodeId>(nodes_.size() - 1);
}

void Tape::check_node(NodeId n) const {
  if (n < 0 || static_cast<size_t>(n) >= nodes_.size()) {
    throw StateError("tape: node " + std::to_string(n) + " was not recorded on this tape");
  }
}

NodeId Tape::constant(std::span<const real> v) {
  NodeId id = push(Op::kConst, v.size());
  std::memcpy(val(id), v.data(), v.size() * sizeof(real));
  return id;
}

NodeId Tape::param_vector(ParamId p) {
  const auto& e = reg_->at(p);
  NodeId id = push(Op::kParamVec, e.value.size());
  nodes_.back().pw = p;
  std::memcpy(val(id), e.value.data(), e.value.size() * sizeof(real));
  return id;
}

NodeId Tape::embed_row(ParamId table, size_t row) {
  const auto& e = reg_->at(table);
  if (e.cols == 0 || row >= e.rows) {
    throw DomainError("embed_row: row " + std::to_string(row) + " outside " +
                      std::to_string(e.rows) + "x" + std::to_string(e.cols));
  }
  NodeId id = push(Op::kEmbedRow, e.cols);
  nodes_.back().pw = table;
  nodes_.back().aux = static_cast<std::uint32_t>(row);
  std::memcpy(val(id), e.value.data() + row * e.cols, e.cols * sizeof(real));
  return id;
}

NodeId Tape::affine(ParamId w, NodeId x, ParamId b) {
  check_node(x);
  const auto& we = reg_->at(w);
  const auto& be = reg_->at(b);
  if (we.cols != size(x) || we.rows != be.value.size()) {
    throw ShapeError("affine: W is " + std::to_string(we.rows) + "x" + std::to_string(we.cols) +
                     ", x is " + std::to_string(size(x)) + ", b is " +
                     std::to_string(be.value.size()));
  }
  NodeId id = push(Op::kAffine, we.rows);
  Node& n = nodes_.back();
  n.a = x;
  n.pw = w;
  n.pb = b;
  std::memcpy(val(id), be.value.data(), be.value.size() * sizeof(real));
  kern::ops().matvec_acc(we.value.data(), val(x), val(id), we.rows, we.cols);
  return id;
}

NodeId Tape::affine_add(ParamId w, NodeId x, NodeId prev) {
  check_node(x);
  check_node(prev);
  const auto& we = reg_->at(w);
  if (we.cols != size(x) || we.rows != size(prev)) {
    throw ShapeError("affine_add: W is " + std::to_string(we.rows) + "x" +
                     std::to_string(we.cols) + ", x is " + std::to_string(size(x)) +
                     ", prev is " + std::to_string(size(prev)));
  }
  NodeId id = push(Op::kAffineAdd, we.rows);
  Node& n = nodes_.back();
  n.a = x;
  n.b = prev;
  n.pw = w;
  std::memcpy(val(id), val(prev), size(prev) * sizeof(real));
  kern::ops().matvec_acc(we.value.data(), val(x), val(id), we.rows, we.cols);
  return id;
}

NodeId Tape::add(NodeId a, NodeId b) {
  check_node(a);
  check_node(b);
  if (size(a) != size(b)) shape_mismatch("add", size(a), size(b));
  NodeId id = push(Op::kAdd, size(a));
  nodes_.back().a = a;
  nodes_.back().b = b;
  kern::ops().vadd(val(id), val(a), val(b), size(a));
  return id;
}

NodeId Tape::mul(NodeId a, NodeId b) {
  check_node(a);
  check_node(b);
  if (size(a) != size(b)) shape_mismatch("mul", size(a), size(b));
  NodeId id = push(Op::kMul, size(a));
  nodes_.back().a = a;
  nodes_.back().b = b;
  kern::ops().vmul(val(id), val(a), val(b), size(a));
  return id;
}

NodeId Tape::sigmoid(NodeId a) {
  check_node(a);
  NodeId id = push(Op::kSigmoid, size(a));
  nodes_.back().a = a;
  const real* in = val(a);
  real* out = val(id);
  for (size_t i = 0; i < size(a); ++i) out[i] = hrl::sigmoid(in[i]);
  return id;
}

NodeId Tape::tanh(NodeId a) {
  check_node(a);
  NodeId id = push(Op::kTanh, size(a));
  nodes_.back().a = a;
  const real* in = val(a);
  real* out = val(id);
  for (size_t i = 0; i < size(a); ++i) out[i] = std::tanh(in[i]);
  return id;
}

NodeId Tape::slice(NodeId a, size_t offset, size_t len) {
  check_node(a);
  if (offset + len > size(a)) {
    throw ShapeError("slice: [" + std::to_string(offset) + ", " + std::to_string(offset + len) +
                     ") outside vector of size " + std::to_string(size(a)));
  }
  NodeId id = push(Op::kSlice, len);
  nodes_.back().a = a;
  nodes_.back().aux = static_cast<std::uint32_t>(offset);
  std::memcpy(val(id), val(a) + offset, len * sizeof(real));
  return id;
}

NodeId Tape::concat(NodeId a, NodeId b) {
  check_node(a);
  check_node(b);
  NodeId id = push(Op::kConcat, size(a) + size(b));
  nodes_.back().a = a;
  nodes_.back().b = b;
  std::memcpy(val(id), val(a), size(a) * sizeof(real));
  std::memcpy(val(id) + size(a), val(b), size(b) * sizeof(real));
  return id;
}

NodeId Tape::dot(NodeId a, NodeId b) {
  check_node(a);
  check_node(b);
  if (size(a) != size(b)) shape_mismatch("dot", size(a), size(b));
  NodeId id = push(Op::kDot, 1);
  nodes_.back().a = a;
  nodes_.back().b = b;
  *val(id) = kern::ops().dot(val(a), val(b), size(a));
  return id;
}

NodeId Tape::softmax(NodeId a) {
  check_node(a);
  if (size(a) == 0) throw DomainError("softmax: empty input");
  NodeId id = push(Op::kSoftmax, size(a));
  nodes_.back().a = a;
  const real* in = val(a);
  real* out = val(id);
  const size_t n = size(a);
  real mx = in[0];
  for (size_t i = 1; i < n; ++i) mx = std::max(mx, in[i]);
  real sum = 0;
  for (size_t i = 0; i < n; ++i) {
    out[i] = std::exp(in[i] - mx);
    sum += out[i];
  }
  for (size_t i = 0; i < n; ++i) out[i] /= sum;
  return id;
}

NodeId Tape::softmax_cross_entropy(NodeId logits, int label) {
  check_node(logits);
  const size_t c = size(logits);
  if (label < 1 || static_cast<size_t>(label) > c) {
    throw DomainError("softmax_cross_entropy: label " + std::to_string(label) + " outside [1, " +
                      std::to_string(c) + "]");
  }
  NodeId id = push(Op::kSoftmaxCE, 1);
  Node& n = nodes_.back();
  n.a = logits;
  n.b = static_cast<NodeId>(label);
  n.aux = static_cast<std::uint32_t>(stash_.size());
  stash_.resize(stash_.size() + c);
  const real* in = val(logits);
  real* probs = stash_.data() + n.aux;
  real mx = in[0];
  for (size_t i = 1; i < c; ++i) mx = std::max(mx, in[i]);
  real sum = 0;
  for (size_t i = 0; i < c; ++i) {
    probs[i] = std::exp(in[i] - mx);
    sum += probs[i];
  }
  for (size_t i = 0; i < c; ++i) probs[i] /= sum;
  const real p = std::max(probs[static_cast<size_t>(label - 1)], kProbFloor);
  *val(id) = -std::log(p);
  return id;
}

std::span<const real> Tape::value(NodeId n) const {
  check_node(n);
  return {val(n), nodes_[static_cast<size_t>(n)].len};
}

real Tape::scalar(NodeId n) const {
  check_node(n);
  if (nodes_[static_cast<size_t>(n)].len != 1) {
    throw ShapeError("scalar: node has length " +
                     std::to_string(nodes_[static_cast<size_t>(n)].len));
  }
  return *val(n);
}

size_t Tape::size(NodeId n) const {
  check_node(n);
  return nodes_[static_cast<size_t>(n)].len;
}

void Tape::backward(NodeId loss, GradStore& grads) {
  check_node(loss);
  if (backward_done_) {
    throw StateError("tape: backward already ran; re-trace before calling it again");
  }
  if (nodes_[static_cast<size_t>(loss)].len != 1) {
    throw StateError("tape: backward requires a recorded scalar loss");
  }
  backward_done_ = true;

  adjoints_.assign(values_.size(), real(0));
  adjoints_[nodes_[static_cast<size_t>(loss)].off] = real(1);
  const auto& k = kern::ops();

  for (NodeId i = static_cast<NodeId>(nodes_.size()) - 1; i >= 0; --i) {
    const Node& n = nodes_[static_cast<size_t>(i)];
    const real* ybar = adjoints_.data() + n.off;
    switch (n.op) {
      case Op::kConst:
        break;
      case Op::kParamVec:
        k.axpy(grads.grad(n.pw).data(), real(1), ybar, n.len);
        break;
      case Op::kEmbedRow: {
        const auto& e = reg_->at(n.pw);
        k.axpy(grads.grad(n.pw).data() + static_cast<size_t>(n.aux) * e.cols, real(1), ybar,
               n.len);
        break;
      }
      case Op::kAffine: {
        const auto& we = reg_->at(n.pw);
        k.ger_acc(grads.grad(n.pw).data(), ybar, val(n.a), we.rows, we.cols);
        k.axpy(grads.grad(n.pb).data(), real(1), ybar, we.rows);
        k.matvec_t_acc(we.value.data(), ybar, adj(n.a), we.rows, we.cols);
        break;
      }
      case Op::kAffineAdd: {
        const auto& we = reg_->at(n.pw);
        k.ger_acc(grads.grad(n.pw).data(), ybar, val(n.a), we.rows, we.cols);
        k.matvec_t_acc(we.value.data(), ybar, adj(n.a), we.rows, we.cols);
        k.axpy(adj(n.b), real(1), ybar, n.len);
        break;
      }
      case Op::kAdd:
        k.axpy(adj(n.a), real(1), ybar, n.len);
        k.axpy(adj(n.b), real(1), ybar, n.len);
        break;
      case Op::kMul:
        k.vmul_acc(adj(n.a), ybar, val(n.b), n.len);
        k.vmul_acc(adj(n.b), ybar, val(n.a), n.len);
        break;
      case Op::kSigmoid: {
        real* xbar = adj(n.a);
        const real* y = val(i);
        for (size_t j = 0; j < n.len; ++j) xbar[j] += ybar[j] * y[j] * (real(1) - y[j]);
        break;
      }
      case Op::kTanh: {
        real* xbar = adj(n.a);
        const real* y = val(i);
        for (size_t j = 0; j < n.len; ++j) xbar[j] += ybar[j] * (real(1) - y[j] * y[j]);
        break;
      }
      case Op::kSlice:
        k.axpy(adj(n.a) + n.aux, real(1), ybar, n.len);
        break;
      case Op::kConcat: {
        const size_t la = nodes_[static_cast<size_t>(n.a)].len;
        k.axpy(adj(n.a), real(1), ybar, la);
        k.axpy(adj(n.b), real(1), ybar + la, n.len - la);
        break;
      }
      case Op::kDot:
        k.axpy(adj(n.a), ybar[0], val(n.b), nodes_[static_cast<size_t>(n.a)].len);
        k.axpy(adj(n.b), ybar[0], val(n.a), nodes_[static_cast<size_t>(n.a)].len);
        break;
      case Op::kSoftmax: {
        const real* y = val(i);
        real inner = 0;
        for (size_t j = 0; j < n.len; ++j) inner += ybar[j] * y[j];
        real* xbar = adj(n.a);
        for (size_t j = 0; j < n.len; ++j) xbar[j] += y[j] * (ybar[j] - inner);
        break;
      }
      case Op::kSoftmaxCE: {
        const size_t c = nodes_[static_cast<size_t>(n.a)].len;
        const real* probs = stash_.data() + n.aux;
        const size_t gold = static_cast<size_t>(n.b) - 1;
        real* xbar = adj(n.a);
        const real lbar = ybar[0];
        for (size_t j = 0; j < c; ++j) {
          xbar[j] += lbar * (probs[j] - (j == gold ? real(1) : real(0)));
        }
        break;
      }
    }
  }
}

}  // namespace hrl
