#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "paaconv/network.hpp"
#include "paaconv/synthetic.hpp"
#include "paaconv/training.hpp"

namespace paaconv {

// Everything a CLI run can configure. Defaults here are the tool
// defaults; a config file and then command-line flags override them in
// that order.
struct RunConfig {
  std::uint64_t seed = 0;
  double cell_size = 0.05;
  int channels = 9;  // 9 or 12 (12 = with normals)
  int k_neighbors = 16;
  double block_size = 1.0;
  int points_per_block = 4096;

  // network topology
  int classes = 13;
  std::vector<int> cascade_strides = {1, 2, 3};
  std::vector<int> cascade_widths = {32, 32, 64};
  std::vector<int> parallel_strides = {2, 4, 8};
  int parallel_width = 64;

  TrainConfig train;

  // synthetic data generation
  int synth_rooms = 1;
  RoomSpec synth;

  NetworkConfig network_config() const;  // assembles and validates
  void validate() const;                 // throws ConfigError
};

// Line-oriented "key = value" file with '#' comments. Unknown keys and
// unparsable values throw ConfigError naming the line. List values are
// comma-separated. Keys mirror the struct: seed, cell_size, channels,
// k_neighbors, block_size, points_per_block, net.classes,
// net.cascade_strides, net.cascade_widths, net.parallel_strides,
// net.parallel_width, train.lr, train.momentum, train.batch_size,
// train.epochs, train.checkpoint_every, synth.rooms, synth.points,
// synth.classes, synth.objects, synth.noise, synth.width, synth.depth,
// synth.height, synth.floor_only.
void apply_config_file(RunConfig& config, const std::string& path);

}  // namespace paaconv
