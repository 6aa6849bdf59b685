#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "paaconv/network.hpp"

namespace paaconv {

struct Block;  // blocks.hpp

struct TrainConfig {
  double learning_rate = 0.01;
  double momentum = 0.9;
  int batch_size = 4;
  int epochs = 1;
  std::uint64_t seed = 0;
  int checkpoint_every = 0;  // 0 = no periodic snapshots

  void validate() const;  // throws ConfigError
};

struct EpochStats {
  int epoch = 0;       // 1-based
  double mean_loss = 0.0;
  double train_oa = 0.0;
};

// Optimizer slots, one per parameter tensor in declaration order.
struct TrainState {
  std::vector<Tensor2D> velocity;
  int epochs_completed = 0;
};

struct TrainResult {
  std::vector<EpochStats> history;
  TrainState state;
};

// Classical momentum: v <- momentum * v + grad; param <- param - lr * v.
void sgd_momentum_step(Tensor2D& param, Tensor2D& velocity,
                       const Tensor2D& grad, double learning_rate,
                       double momentum);

// Mini-batch SGD with momentum over whole blocks. Block order is
// reshuffled every epoch from the config seed; batch gradients are the
// mean over the blocks of the batch, accumulated in a fixed order so runs
// are bitwise reproducible. The per-epoch snapshot callback (may be empty)
// fires after every checkpoint_every-th epoch.
using SnapshotFn = std::function<void(const Network&, int epoch)>;
TrainResult train(Network& network, const std::vector<Block>& blocks,
                  const TrainConfig& config, const SnapshotFn& snapshot = {});

// "epoch,mean_loss,train_oa" CSV, one row per epoch, doubles printed
// with enough digits to round-trip.
void write_history_csv(const std::string& path,
                       const std::vector<EpochStats>& history);

}  // namespace paaconv
