#include "paaconv/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "paaconv/blocks.hpp"
#include "paaconv/errors.hpp"
#include "paaconv/rng.hpp"
#include "paaconv/voxel_grid.hpp"

namespace paaconv {

void NetworkConfig::validate() const {
  if (in_channels < 1) throw ConfigError("network: in_channels must be >= 1");
  if (class_count < 1) throw ConfigError("network: class_count must be >= 1");
  if (cascade_strides.empty()) {
    throw ConfigError("network: need at least one cascade block");
  }
  if (cascade_strides.size() != cascade_widths.size()) {
    throw ConfigError("network: cascade strides and widths differ in length");
  }
  if (parallel_strides.empty()) {
    throw ConfigError("network: need at least one parallel branch");
  }
  for (int s : cascade_strides) {
    if (s < 1) throw ConfigError("network: cascade stride must be >= 1");
  }
  for (int w : cascade_widths) {
    if (w < 1) throw ConfigError("network: cascade width must be >= 1");
  }
  for (int s : parallel_strides) {
    if (s < 1) throw ConfigError("network: parallel stride must be >= 1");
  }
  if (parallel_width < 1) {
    throw ConfigError("network: parallel_width must be >= 1");
  }
  if (!(cell_size > 0.0) || !std::isfinite(cell_size)) {
    throw ConfigError("network: cell_size must be positive");
  }
}

std::vector<Tensor2D*> tensor_list(NetworkParams& params) {
  std::vector<Tensor2D*> list;
  auto add_block = [&](ConvBlock& b) {
    for (auto& tap : b.conv.taps) list.push_back(&tap);
    list.push_back(&b.conv.bias);
    list.push_back(&b.attention.kernel);
    list.push_back(&b.attention.bias);
  };
  for (auto& b : params.cascade) add_block(b);
  for (auto& b : params.parallel) add_block(b);
  list.push_back(&params.channel_attention.dense1);
  list.push_back(&params.channel_attention.bias1);
  list.push_back(&params.channel_attention.dense2);
  list.push_back(&params.channel_attention.bias2);
  for (auto& tap : params.classifier.taps) list.push_back(&tap);
  list.push_back(&params.classifier.bias);
  return list;
}

std::vector<const Tensor2D*> tensor_list(const NetworkParams& params) {
  auto mutable_list = tensor_list(const_cast<NetworkParams&>(params));
  return {mutable_list.begin(), mutable_list.end()};
}

namespace {

void init_uniform(Tensor2D& t, int fan_in, int fan_out, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (double& v : t.data()) v = rng.uniform(-bound, bound);
}

void init_block(ConvBlock& block, int c_in, int c_out, Rng& rng) {
  block.conv = KernelWeights::zeros(c_in, c_out);
  for (auto& tap : block.conv.taps) init_uniform(tap, c_in, c_out, rng);
  block.attention = SpatialAttentionParams::zeros();
  init_uniform(block.attention.kernel, 10, 1, rng);  // 5 taps x 2 stats in
}

}  // namespace

Network Network::build(const NetworkConfig& config) {
  config.validate();
  Network net;
  net.config_ = config;

  Rng rng(config.seed);
  int c = config.in_channels;
  for (std::size_t i = 0; i < config.cascade_strides.size(); ++i) {
    ConvBlock block;
    init_block(block, c, config.cascade_widths[i], rng);
    net.params_.cascade.push_back(std::move(block));
    c = config.cascade_widths[i];
  }
  const int cascade_out = c;
  for (std::size_t i = 0; i < config.parallel_strides.size(); ++i) {
    ConvBlock block;
    init_block(block, cascade_out, config.parallel_width, rng);
    net.params_.parallel.push_back(std::move(block));
  }
  const int merged =
      config.parallel_width * static_cast<int>(config.parallel_strides.size());
  net.params_.channel_attention = ChannelAttentionParams::zeros(merged);
  init_uniform(net.params_.channel_attention.dense1, merged, merged, rng);
  init_uniform(net.params_.channel_attention.dense2, merged, merged, rng);
  net.params_.classifier = KernelWeights::zeros(merged, config.class_count);
  for (auto& tap : net.params_.classifier.taps) {
    init_uniform(tap, merged, config.class_count, rng);
  }
  return net;
}

NetworkParams Network::zero_grads() const {
  NetworkParams grads = params_;
  for (Tensor2D* t : tensor_list(grads)) t->fill(0.0);
  return grads;
}

std::size_t Network::parameter_count() const {
  std::size_t total = 0;
  for (const Tensor2D* t : tensor_list(params_)) total += t->size();
  return total;
}

ForwardResult Network::run_forward(const PointCloud& block, Tape* tape,
                                   NetworkParams* grads) const {
  const int n = block.size();
  if (n == 0) throw InvalidInputError("Network::forward: empty block");
  if (block.channels() != config_.in_channels) {
    throw ShapeError("Network::forward: block has " +
                     std::to_string(block.channels()) + " channels, expected " +
                     std::to_string(config_.in_channels));
  }

  std::vector<int> order = canonical_order(block.positions, config_.cell_size);

  PointCloud sorted;
  sorted.positions.resize(n);
  sorted.features = Tensor2D(n, block.channels());
  for (int s = 0; s < n; ++s) {
    sorted.positions[s] = block.positions[order[s]];
    const double* src = block.features.row(order[s]);
    std::copy(src, src + block.channels(), sorted.features.row(s));
  }

  const VoxelGrid grid = build_grid(sorted, config_.cell_size);
  auto layout = std::make_shared<CellLayout>(make_cell_layout(grid));

  std::map<int, std::shared_ptr<const NeighborTable>> tables;
  auto table_for = [&](int stride) {
    auto& entry = tables[stride];
    if (!entry) entry = make_neighbor_table(*layout, stride);
    return entry;
  };

  Tape local_tape;
  Tape& tp = tape ? *tape : local_tape;

  Tape::NodeId x = tp.leaf(std::move(sorted.features));
  for (std::size_t b = 0; b < params_.cascade.size(); ++b) {
    const ConvBlock& blk = params_.cascade[b];
    const int stride = config_.cascade_strides[b];
    Tape::NodeId conv = tp.atrous_conv(
        x, layout, blk.conv, grads ? &grads->cascade[b].conv : nullptr, stride,
        table_for(stride));
    Tape::NodeId act = tp.relu(conv);
    Tape::NodeId attn = tp.spatial_attention(
        act, blk.attention, grads ? &grads->cascade[b].attention : nullptr);
    x = tp.apply_spatial_attention(act, attn);
  }

  std::vector<Tape::NodeId> branches;
  for (std::size_t b = 0; b < params_.parallel.size(); ++b) {
    const ConvBlock& blk = params_.parallel[b];
    const int stride = config_.parallel_strides[b];
    Tape::NodeId conv = tp.atrous_conv(
        x, layout, blk.conv, grads ? &grads->parallel[b].conv : nullptr, stride,
        table_for(stride));
    Tape::NodeId act = tp.relu(conv);
    Tape::NodeId attn = tp.spatial_attention(
        act, blk.attention, grads ? &grads->parallel[b].attention : nullptr);
    branches.push_back(tp.apply_spatial_attention(act, attn));
  }

  Tape::NodeId merged = branches.size() == 1 ? branches[0] : tp.concat(branches);
  Tape::NodeId attn = tp.channel_attention(
      merged, params_.channel_attention,
      grads ? &grads->channel_attention : nullptr);
  Tape::NodeId weighted = tp.apply_channel_attention(merged, attn);
  Tape::NodeId logits_node =
      tp.atrous_conv(weighted, layout, params_.classifier,
                     grads ? &grads->classifier : nullptr, 1, table_for(1));

  ForwardResult result;
  result.logits_node = tape ? logits_node : -1;
  const Tensor2D& sorted_logits = tp.value(logits_node);
  result.logits = Tensor2D(n, config_.class_count);
  for (int s = 0; s < n; ++s) {
    const double* src = sorted_logits.row(s);
    std::copy(src, src + config_.class_count, result.logits.row(order[s]));
  }
  result.order = std::move(order);
  return result;
}

Tensor2D Network::forward(const PointCloud& block) const {
  return run_forward(block).logits;
}

std::vector<int> Network::predict(const PointCloud& block) const {
  const Tensor2D logits = forward(block);
  std::vector<int> labels(logits.rows());
  for (int i = 0; i < logits.rows(); ++i) {
    const double* row = logits.row(i);
    int best = 0;
    for (int j = 1; j < logits.cols(); ++j) {
      if (row[j] > row[best]) best = j;  // ties keep the smaller class id
    }
    labels[i] = best;
  }
  return labels;
}

}  // namespace paaconv
