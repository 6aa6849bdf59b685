#include "paaconv/training.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <string>

#include "paaconv/blocks.hpp"
#include "paaconv/errors.hpp"
#include "paaconv/parallel.hpp"
#include "paaconv/rng.hpp"

namespace paaconv {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("train: learning_rate must be positive");
  }
  if (momentum < 0.0 || momentum >= 1.0 || !std::isfinite(momentum)) {
    throw ConfigError("train: momentum must be in [0, 1)");
  }
  if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
  if (epochs < 1) throw ConfigError("train: epochs must be >= 1");
  if (checkpoint_every < 0) {
    throw ConfigError("train: checkpoint_every must be >= 0");
  }
}

void sgd_momentum_step(Tensor2D& param, Tensor2D& velocity,
                       const Tensor2D& grad, double learning_rate,
                       double momentum) {
  if (!param.same_shape(velocity) || !param.same_shape(grad)) {
    throw ShapeError("sgd_momentum_step: shape mismatch");
  }
  auto& v = velocity.data();
  auto& p = param.data();
  const auto& g = grad.data();
  for (std::size_t i = 0; i < p.size(); ++i) {
    v[i] = momentum * v[i] + g[i];
    p[i] -= learning_rate * v[i];
  }
}

namespace {

struct BlockPass {
  double loss = 0.0;
  int correct = 0;
  NetworkParams grads;
};

BlockPass run_block(const Network& network, const Block& block) {
  BlockPass pass;
  pass.grads = network.zero_grads();

  Tape tape;
  const ForwardResult fwd =
      network.run_forward(block.cloud, &tape, &pass.grads);

  const int n = block.cloud.size();
  std::vector<int> sorted_labels(n);
  for (int s = 0; s < n; ++s) {
    sorted_labels[s] = block.cloud.labels[fwd.order[s]];
  }

  const SoftmaxCrossEntropy ce =
      softmax_cross_entropy(tape.value(fwd.logits_node), sorted_labels);
  tape.backward(fwd.logits_node, ce.dlogits);
  pass.loss = ce.loss;

  for (int i = 0; i < n; ++i) {
    const double* row = fwd.logits.row(i);
    int best = 0;
    for (int j = 1; j < fwd.logits.cols(); ++j) {
      if (row[j] > row[best]) best = j;
    }
    if (best == block.cloud.labels[i]) ++pass.correct;
  }
  return pass;
}

}  // namespace

TrainResult train(Network& network, const std::vector<Block>& blocks,
                  const TrainConfig& config, const SnapshotFn& snapshot) {
  config.validate();
  if (blocks.empty()) throw InvalidInputError("train: no blocks");

  const int classes = network.config().class_count;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const Block& block = blocks[b];
    if (block.cloud.size() == 0) {
      throw InvalidInputError("train: block " + std::to_string(b) + " is empty");
    }
    for (int i = 0; i < block.cloud.size(); ++i) {
      const int label = block.cloud.labels[i];
      if (label < 0) {
        throw InvalidInputError("train: block " + std::to_string(b) +
                                " point " + std::to_string(i) + " is unlabeled");
      }
      if (label >= classes) {
        throw InvalidInputError("train: block " + std::to_string(b) +
                                " point " + std::to_string(i) + " has label " +
                                std::to_string(label) + " >= class count " +
                                std::to_string(classes));
      }
    }
  }

  auto param_ptrs = tensor_list(network.params());

  TrainResult result;
  result.state.velocity.reserve(param_ptrs.size());
  for (const Tensor2D* t : param_ptrs) {
    result.state.velocity.push_back(Tensor2D::zeros_like(*t));
  }

  Rng rng(config.seed);
  std::vector<int> order(blocks.size());
  std::iota(order.begin(), order.end(), 0);

  const int block_count = static_cast<int>(blocks.size());
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.shuffle(order);

    double loss_sum = 0.0;
    long long correct = 0;
    long long total = 0;

    for (int start = 0; start < block_count; start += config.batch_size) {
      const int m = std::min(config.batch_size, block_count - start);

      std::vector<BlockPass> passes(m);
      parallel_for(m, [&](int j) {
        passes[j] = run_block(network, blocks[order[start + j]]);
      });

      // Fixed-order reduction keeps training bitwise reproducible.
      NetworkParams batch_grads = std::move(passes[0].grads);
      for (int j = 1; j < m; ++j) {
        auto into = tensor_list(batch_grads);
        auto from = tensor_list(passes[j].grads);
        for (std::size_t t = 0; t < into.size(); ++t) {
          add_in_place(*into[t], *from[t]);
        }
      }
      const double inv_m = 1.0 / static_cast<double>(m);
      for (Tensor2D* t : tensor_list(batch_grads)) scale_in_place(*t, inv_m);

      auto grad_ptrs = tensor_list(batch_grads);
      for (std::size_t t = 0; t < param_ptrs.size(); ++t) {
        sgd_momentum_step(*param_ptrs[t], result.state.velocity[t],
                          *grad_ptrs[t], config.learning_rate, config.momentum);
      }

      for (int j = 0; j < m; ++j) {
        loss_sum += passes[j].loss;
        correct += passes[j].correct;
        total += blocks[order[start + j]].cloud.size();
      }
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.mean_loss = loss_sum / static_cast<double>(block_count);
    stats.train_oa = static_cast<double>(correct) / static_cast<double>(total);
    result.history.push_back(stats);
    result.state.epochs_completed = epoch;

    if (snapshot && config.checkpoint_every > 0 &&
        epoch % config.checkpoint_every == 0) {
      snapshot(network, epoch);
    }
  }
  return result;
}

void write_history_csv(const std::string& path,
                       const std::vector<EpochStats>& history) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("history: cannot open for writing: " + path);
  out << "epoch,mean_loss,train_oa\n";
  char buf[96];
  for (const EpochStats& row : history) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g\n", row.epoch,
                  row.mean_loss, row.train_oa);
    out << buf;
  }
  if (!out.flush()) throw IoError("history: write failed: " + path);
}

}  // namespace paaconv
