#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "paaconv/blocks.hpp"
#include "paaconv/errors.hpp"
#include "paaconv/network.hpp"
#include "paaconv/rng.hpp"
#include "paaconv/training.hpp"
#include "test_util.hpp"

using namespace paaconv;

namespace {

NetworkConfig tiny_config() {
  NetworkConfig cfg;
  cfg.in_channels = 3;
  cfg.class_count = 3;
  cfg.cascade_strides = {1};
  cfg.cascade_widths = {4};
  cfg.parallel_strides = {2};
  cfg.parallel_width = 4;
  cfg.cell_size = 0.3;
  cfg.seed = 11;
  return cfg;
}

std::vector<Block> tiny_blocks(int count, int points, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Block> blocks;
  for (int b = 0; b < count; ++b) {
    Block block;
    block.cloud = testutil::random_cloud(rng, points, 3, 1.0);
    for (int i = 0; i < points; ++i) {
      block.cloud.labels[i] = rng.below_int(3);
      block.source_indices.push_back(i);
    }
    blocks.push_back(std::move(block));
  }
  return blocks;
}

}  // namespace

TEST_CASE("the momentum update follows the classical recurrence") {
  Tensor2D w(1, 1), v(1, 1), g(1, 1);

  SUBCASE("no momentum is plain gradient descent") {
    w(0, 0) = 1.0;
    g(0, 0) = 2.0;
    sgd_momentum_step(w, v, g, 0.1, 0.0);
    CHECK(w(0, 0) == doctest::Approx(0.8).epsilon(1e-15));
  }

  SUBCASE("two steps with constant gradient") {
    w(0, 0) = 1.0;
    g(0, 0) = 1.0;
    sgd_momentum_step(w, v, g, 0.1, 0.9);
    CHECK(v(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(w(0, 0) == doctest::Approx(0.9).epsilon(1e-15));
    sgd_momentum_step(w, v, g, 0.1, 0.9);
    CHECK(v(0, 0) == doctest::Approx(1.9).epsilon(1e-15));
    CHECK(w(0, 0) == doctest::Approx(0.71).epsilon(1e-15));
  }

  SUBCASE("zero gradient decays the velocity geometrically") {
    w(0, 0) = 1.0;
    v(0, 0) = 1.0;
    sgd_momentum_step(w, v, g, 0.1, 0.9);
    CHECK(v(0, 0) == doctest::Approx(0.9).epsilon(1e-15));
    sgd_momentum_step(w, v, g, 0.1, 0.9);
    CHECK(v(0, 0) == doctest::Approx(0.81).epsilon(1e-15));
  }

  SUBCASE("shape mismatches are refused") {
    Tensor2D bad(2, 1);
    CHECK_THROWS_AS(sgd_momentum_step(w, v, bad, 0.1, 0.9), ShapeError);
  }
}

TEST_CASE("train config validation") {
  TrainConfig cfg;
  cfg.epochs = 1;
  cfg.validate();

  TrainConfig bad = cfg;
  bad.learning_rate = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.momentum = 1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.momentum = -0.1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.batch_size = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.epochs = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("training is deterministic and velocity mirrors parameters") {
  const auto blocks = tiny_blocks(3, 10, 900);
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.batch_size = 2;
  cfg.seed = 42;

  Network net1 = Network::build(tiny_config());
  Network net2 = Network::build(tiny_config());
  const TrainResult r1 = train(net1, blocks, cfg);
  const TrainResult r2 = train(net2, blocks, cfg);

  const auto p1 = tensor_list(net1.params());
  const auto p2 = tensor_list(net2.params());
  REQUIRE(p1.size() == p2.size());
  for (std::size_t i = 0; i < p1.size(); ++i) {
    CHECK(max_abs_diff(*p1[i], *p2[i]) == 0.0);
  }

  REQUIRE(r1.history.size() == 3);
  for (std::size_t e = 0; e < 3; ++e) {
    CHECK(r1.history[e].mean_loss == r2.history[e].mean_loss);
    CHECK(r1.history[e].train_oa == r2.history[e].train_oa);
    CHECK(r1.history[e].epoch == static_cast<int>(e) + 1);
  }

  // velocity slots line up with the parameter tensors
  REQUIRE(r1.state.velocity.size() == p1.size());
  for (std::size_t i = 0; i < p1.size(); ++i) {
    CHECK(r1.state.velocity[i].same_shape(*p1[i]));
  }
  CHECK(r1.state.epochs_completed == 3);
}

TEST_CASE("a tiny learning rate decreases the loss on one batch") {
  const auto blocks = tiny_blocks(1, 12, 901);
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.batch_size = 1;
  cfg.learning_rate = 1e-4;
  cfg.momentum = 0.0;

  Network net = Network::build(tiny_config());
  const TrainResult result = train(net, blocks, cfg);
  REQUIRE(result.history.size() == 2);
  // one block per epoch: epoch means are the loss before each step
  CHECK(result.history[1].mean_loss < result.history[0].mean_loss);
}

TEST_CASE("unlabeled or out-of-range labels abort training upfront") {
  auto blocks = tiny_blocks(2, 8, 902);
  blocks[1].cloud.labels[3] = -1;
  TrainConfig cfg;
  cfg.epochs = 1;

  Network net = Network::build(tiny_config());
  try {
    train(net, blocks, cfg);
    FAIL("expected InvalidInputError");
  } catch (const InvalidInputError& e) {
    const std::string what = e.what();
    CHECK(what.find("block 1") != std::string::npos);
    CHECK(what.find("point 3") != std::string::npos);
  }

  blocks[1].cloud.labels[3] = 3;  // class_count is 3, so 3 is out of range
  CHECK_THROWS_AS(train(net, blocks, cfg), InvalidInputError);

  CHECK_THROWS_AS(train(net, std::vector<Block>{}, cfg), InvalidInputError);
}

TEST_CASE("snapshots fire on the configured cadence") {
  const auto blocks = tiny_blocks(1, 8, 903);
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.checkpoint_every = 2;

  Network net = Network::build(tiny_config());
  std::vector<int> fired;
  train(net, blocks, cfg,
        [&](const Network&, int epoch) { fired.push_back(epoch); });
  CHECK(fired == std::vector<int>{2, 4});
}

TEST_CASE("history csv round-trips every digit") {
  testutil::TempDir dir;
  std::vector<EpochStats> history = {{1, 2.5676712559901063, 0.108203125},
                                     {2, 2.5108042111155759, 0.14667968749999999}};
  const std::string path = dir.file("history.csv");
  write_history_csv(path, history);

  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "epoch,mean_loss,train_oa");
  int rows = 0;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string epoch, loss, oa;
    std::getline(ss, epoch, ',');
    std::getline(ss, loss, ',');
    std::getline(ss, oa, ',');
    CHECK(std::atoi(epoch.c_str()) == history[rows].epoch);
    CHECK(std::strtod(loss.c_str(), nullptr) == history[rows].mean_loss);
    CHECK(std::strtod(oa.c_str(), nullptr) == history[rows].train_oa);
    ++rows;
  }
  CHECK(rows == 2);
}
