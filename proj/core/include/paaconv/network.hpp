#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "paaconv/ops.hpp"
#include "paaconv/point_cloud.hpp"
#include "paaconv/tape.hpp"

namespace paaconv {

// Topology and voxel settings of the segmentation network: a cascade of
// conv blocks feeding parallel dilated branches whose outputs are
// concatenated, reweighted by channel attention, and classified by a final
// stride-1 conv.
struct NetworkConfig {
  int in_channels = 9;
  int class_count = 13;
  std::vector<int> cascade_strides = {1, 2, 3};
  std::vector<int> cascade_widths = {32, 32, 64};
  std::vector<int> parallel_strides = {2, 4, 8};
  int parallel_width = 64;
  double cell_size = 0.05;
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
};

// One conv block: atrous conv -> relu -> spatial attention.
struct ConvBlock {
  KernelWeights conv;
  SpatialAttentionParams attention;
};

// Every learnable tensor of the network, in declaration order. The same
// struct doubles as the gradient buffer, a velocity buffer, etc.
struct NetworkParams {
  std::vector<ConvBlock> cascade;
  std::vector<ConvBlock> parallel;
  ChannelAttentionParams channel_attention;
  KernelWeights classifier;
};

// Flat list of the tensors of a parameter struct, declaration order. This
// single order defines checkpoint layout, init draw order, and optimizer
// slot alignment.
std::vector<Tensor2D*> tensor_list(NetworkParams& params);
std::vector<const Tensor2D*> tensor_list(const NetworkParams& params);

struct ForwardResult {
  Tensor2D logits;            // input order, n x class_count
  std::vector<int> order;     // order[s] = input index at sorted position s
  Tape::NodeId logits_node = -1;  // sorted order; -1 when no tape was passed
};

class Network {
 public:
  // Weights drawn uniform in +-sqrt(6/(fan_in+fan_out)) from the config
  // seed, biases zero.
  static Network build(const NetworkConfig& config);

  const NetworkConfig& config() const { return config_; }
  NetworkParams& params() { return params_; }
  const NetworkParams& params() const { return params_; }

  NetworkParams zero_grads() const;
  std::size_t parameter_count() const;

  // Sorts the block canonically, voxelizes it, runs the pipeline, and
  // returns logits mapped back to input order. With a tape, records every
  // op and accumulates parameter gradients into *grads on backward.
  ForwardResult run_forward(const PointCloud& block, Tape* tape = nullptr,
                            NetworkParams* grads = nullptr) const;

  Tensor2D forward(const PointCloud& block) const;
  std::vector<int> predict(const PointCloud& block) const;  // ties: smaller id

 private:
  NetworkConfig config_;
  NetworkParams params_;
};

}  // namespace paaconv
