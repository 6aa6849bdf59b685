#pragma once

#include <memory>
#include <vector>

#include "paaconv/ops.hpp"

namespace paaconv {

// Reverse-mode tape over the ops in ops.hpp. Forward calls record a node
// per result; backward() replays the records in reverse and accumulates
// gradients, so values feeding several consumers (fan-out) sum the
// contributions of all of them. Parameter gradients are accumulated into
// caller-owned buffers passed at record time (nullptr skips them, which is
// what inference does).
class Tape {
 public:
  using NodeId = int;

  // Constructor and destructor live in the .cpp where Record is complete.
  Tape();
  ~Tape();
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  NodeId leaf(Tensor2D value);

  NodeId atrous_conv(NodeId input, std::shared_ptr<const CellLayout> layout,
                     const KernelWeights& kernel, KernelWeights* kernel_grad,
                     int stride,
                     std::shared_ptr<const NeighborTable> neighbors = nullptr);
  NodeId relu(NodeId input);
  NodeId spatial_attention(NodeId input, const SpatialAttentionParams& params,
                           SpatialAttentionParams* param_grad);
  NodeId apply_spatial_attention(NodeId input, NodeId weights);
  NodeId channel_attention(NodeId input, const ChannelAttentionParams& params,
                           ChannelAttentionParams* param_grad);
  NodeId apply_channel_attention(NodeId input, NodeId weights);
  NodeId concat(const std::vector<NodeId>& inputs);

  const Tensor2D& value(NodeId id) const;

  // Seeds node with the given gradient and propagates to every recorded
  // input and parameter buffer. Single use per tape.
  void backward(NodeId node, const Tensor2D& seed);

  // Gradient of a node after backward(). Zero tensor for nodes the seed
  // does not reach.
  const Tensor2D& grad(NodeId id) const;

  int node_count() const { return static_cast<int>(values_.size()); }

 private:
  struct Record;
  struct ConvRecord;
  struct ReluRecord;
  struct SpatialRecord;
  struct ApplySpatialRecord;
  struct ChannelRecord;
  struct ApplyChannelRecord;
  struct ConcatRecord;

  NodeId push_value(Tensor2D value);
  void check_node(NodeId id) const;
  void accumulate_grad(NodeId id, Tensor2D delta);
  Tensor2D& grad_slot(NodeId id);

  std::vector<Tensor2D> values_;
  std::vector<Tensor2D> grads_;
  std::vector<char> grad_live_;
  std::vector<std::unique_ptr<Record>> records_;
  bool backward_done_ = false;
};

}  // namespace paaconv
