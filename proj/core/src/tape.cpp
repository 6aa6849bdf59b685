#include "paaconv/tape.hpp"

#include <string>

#include "paaconv/errors.hpp"

namespace paaconv {

struct Tape::Record {
  virtual ~Record() = default;
  virtual void run(Tape& tape) = 0;
};

struct Tape::ConvRecord : Tape::Record {
  NodeId input, out;
  AtrousConvContext ctx;
  KernelWeights* kernel_grad;
  void run(Tape& tape) override {
    AtrousConvGrads g = atrous_conv_backward(tape.grad_slot(out), ctx);
    tape.accumulate_grad(input, std::move(g.input));
    if (kernel_grad) accumulate(*kernel_grad, g.kernel);
  }
};

struct Tape::ReluRecord : Tape::Record {
  NodeId input, out;
  ReluContext ctx;
  void run(Tape& tape) override {
    tape.accumulate_grad(input, relu_backward(tape.grad_slot(out), ctx));
  }
};

struct Tape::SpatialRecord : Tape::Record {
  NodeId input, out;
  SpatialAttentionContext ctx;
  SpatialAttentionParams* param_grad;
  void run(Tape& tape) override {
    SpatialAttentionGrads g =
        spatial_attention_backward(tape.grad_slot(out), ctx);
    tape.accumulate_grad(input, std::move(g.input));
    if (param_grad) accumulate(*param_grad, g.params);
  }
};

struct Tape::ApplySpatialRecord : Tape::Record {
  NodeId input, weights, out;
  void run(Tape& tape) override {
    ApplySpatialGrads g = apply_spatial_attention_backward(
        tape.grad_slot(out), tape.value(input), tape.value(weights));
    tape.accumulate_grad(input, std::move(g.input));
    tape.accumulate_grad(weights, std::move(g.weights));
  }
};

struct Tape::ChannelRecord : Tape::Record {
  NodeId input, out;
  ChannelAttentionContext ctx;
  ChannelAttentionParams* param_grad;
  void run(Tape& tape) override {
    ChannelAttentionGrads g =
        channel_attention_backward(tape.grad_slot(out), ctx);
    tape.accumulate_grad(input, std::move(g.input));
    if (param_grad) accumulate(*param_grad, g.params);
  }
};

struct Tape::ApplyChannelRecord : Tape::Record {
  NodeId input, weights, out;
  void run(Tape& tape) override {
    ApplyChannelGrads g = apply_channel_attention_backward(
        tape.grad_slot(out), tape.value(input), tape.value(weights));
    tape.accumulate_grad(input, std::move(g.input));
    tape.accumulate_grad(weights, std::move(g.weights));
  }
};

struct Tape::ConcatRecord : Tape::Record {
  std::vector<NodeId> inputs;
  std::vector<int> widths;
  NodeId out;
  void run(Tape& tape) override {
    std::vector<Tensor2D> parts =
        concat_channels_backward(tape.grad_slot(out), widths);
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      tape.accumulate_grad(inputs[i], std::move(parts[i]));
    }
  }
};

Tape::Tape() = default;
Tape::~Tape() = default;

Tape::NodeId Tape::push_value(Tensor2D value) {
  values_.push_back(std::move(value));
  grads_.emplace_back();
  grad_live_.push_back(0);
  return static_cast<NodeId>(values_.size()) - 1;
}

void Tape::check_node(NodeId id) const {
  if (id < 0 || id >= node_count()) {
    throw StateError("Tape: unknown node " + std::to_string(id));
  }
}

Tensor2D& Tape::grad_slot(NodeId id) {
  if (!grad_live_[id]) {
    grads_[id] = Tensor2D::zeros_like(values_[id]);
    grad_live_[id] = 1;
  }
  return grads_[id];
}

void Tape::accumulate_grad(NodeId id, Tensor2D delta) {
  if (!grad_live_[id]) {
    grads_[id] = std::move(delta);
    grad_live_[id] = 1;
    return;
  }
  add_in_place(grads_[id], delta);
}

Tape::NodeId Tape::leaf(Tensor2D value) { return push_value(std::move(value)); }

Tape::NodeId Tape::atrous_conv(NodeId input,
                               std::shared_ptr<const CellLayout> layout,
                               const KernelWeights& kernel,
                               KernelWeights* kernel_grad, int stride,
                               std::shared_ptr<const NeighborTable> neighbors) {
  check_node(input);
  auto rec = std::make_unique<ConvRecord>();
  Tensor2D out = atrous_conv_forward(values_[input], std::move(layout), kernel,
                                     stride, &rec->ctx, std::move(neighbors));
  rec->input = input;
  rec->kernel_grad = kernel_grad;
  rec->out = push_value(std::move(out));
  const NodeId id = rec->out;
  records_.push_back(std::move(rec));
  return id;
}

Tape::NodeId Tape::relu(NodeId input) {
  check_node(input);
  auto rec = std::make_unique<ReluRecord>();
  Tensor2D out = relu_forward(values_[input], &rec->ctx);
  rec->input = input;
  rec->out = push_value(std::move(out));
  const NodeId id = rec->out;
  records_.push_back(std::move(rec));
  return id;
}

Tape::NodeId Tape::spatial_attention(NodeId input,
                                     const SpatialAttentionParams& params,
                                     SpatialAttentionParams* param_grad) {
  check_node(input);
  auto rec = std::make_unique<SpatialRecord>();
  Tensor2D out = spatial_attention_forward(values_[input], params, &rec->ctx);
  rec->input = input;
  rec->param_grad = param_grad;
  rec->out = push_value(std::move(out));
  const NodeId id = rec->out;
  records_.push_back(std::move(rec));
  return id;
}

Tape::NodeId Tape::apply_spatial_attention(NodeId input, NodeId weights) {
  check_node(input);
  check_node(weights);
  auto rec = std::make_unique<ApplySpatialRecord>();
  Tensor2D out = paaconv::apply_spatial_attention(values_[input], values_[weights]);
  rec->input = input;
  rec->weights = weights;
  rec->out = push_value(std::move(out));
  const NodeId id = rec->out;
  records_.push_back(std::move(rec));
  return id;
}

Tape::NodeId Tape::channel_attention(NodeId input,
                                     const ChannelAttentionParams& params,
                                     ChannelAttentionParams* param_grad) {
  check_node(input);
  auto rec = std::make_unique<ChannelRecord>();
  Tensor2D out = channel_attention_forward(values_[input], params, &rec->ctx);
  rec->input = input;
  rec->param_grad = param_grad;
  rec->out = push_value(std::move(out));
  const NodeId id = rec->out;
  records_.push_back(std::move(rec));
  return id;
}

Tape::NodeId Tape::apply_channel_attention(NodeId input, NodeId weights) {
  check_node(input);
  check_node(weights);
  auto rec = std::make_unique<ApplyChannelRecord>();
  Tensor2D out = paaconv::apply_channel_attention(values_[input], values_[weights]);
  rec->input = input;
  rec->weights = weights;
  rec->out = push_value(std::move(out));
  const NodeId id = rec->out;
  records_.push_back(std::move(rec));
  return id;
}

Tape::NodeId Tape::concat(const std::vector<NodeId>& inputs) {
  if (inputs.empty()) throw InvalidArgumentError("Tape::concat: no inputs");
  std::vector<const Tensor2D*> maps;
  std::vector<int> widths;
  maps.reserve(inputs.size());
  for (NodeId id : inputs) {
    check_node(id);
    maps.push_back(&values_[id]);
    widths.push_back(values_[id].cols());
  }
  auto rec = std::make_unique<ConcatRecord>();
  Tensor2D out = concat_channels(maps);
  rec->inputs = inputs;
  rec->widths = std::move(widths);
  rec->out = push_value(std::move(out));
  const NodeId id = rec->out;
  records_.push_back(std::move(rec));
  return id;
}

const Tensor2D& Tape::value(NodeId id) const {
  check_node(id);
  return values_[id];
}

void Tape::backward(NodeId node, const Tensor2D& seed) {
  if (values_.empty()) {
    throw StateError("Tape::backward: no forward pass recorded");
  }
  check_node(node);
  if (backward_done_) {
    throw StateError("Tape::backward: already ran on this tape");
  }
  if (!seed.same_shape(values_[node])) {
    throw ShapeError("Tape::backward: seed shape does not match node value");
  }
  backward_done_ = true;
  accumulate_grad(node, seed);
  for (auto it = records_.rbegin(); it != records_.rend(); ++it) {
    (*it)->run(*this);
  }
}

const Tensor2D& Tape::grad(NodeId id) const {
  check_node(id);
  if (!backward_done_) {
    throw StateError("Tape::grad: backward has not run");
  }
  if (!grad_live_[id]) {
    // Unreached nodes legitimately have zero gradient; materialize lazily.
    const_cast<Tape*>(this)->grad_slot(id);
  }
  return grads_[id];
}

}  // namespace paaconv
