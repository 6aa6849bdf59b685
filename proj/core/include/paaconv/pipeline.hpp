#pragma once

#include <string>
#include <vector>

#include "paaconv/blocks.hpp"
#include "paaconv/config.hpp"
#include "paaconv/metrics.hpp"
#include "paaconv/network.hpp"
#include "paaconv/room_cloud.hpp"

namespace paaconv {

// Sorted *.txt paths directly inside dir. Throws IoError when dir does
// not exist or is not a directory.
std::vector<std::string> list_cloud_files(const std::string& directory);

struct LoadedDataset {
  std::vector<Block> blocks;  // canonically sorted, 9 or 12 channels
  int rooms = 0;
  int normal_fallbacks = 0;
};

// Full data pipeline from room files to training-ready blocks: load, then
// normals when channels is 12 (file normals if present, estimated
// otherwise), partition (per-room stream seeded seed + room index), and
// canonical sort. Room files are processed in the given order.
LoadedDataset load_dataset(const std::vector<std::string>& files,
                           const RunConfig& config);

// Labels every point of the room: partitions with min occupancy 1, runs
// the network per block, sums logits per source point over duplicates,
// and assigns points that the sampling never covered the label of their
// nearest covered neighbor. Deterministic for fixed inputs.
std::vector<int> predict_room(const Network& network, const RoomCloud& room,
                              const RunConfig& config);

// predict_room + confusion accumulation against room labels. Unlabeled
// points are skipped by the matrix; out-of-range labels throw.
ConfusionMatrix evaluate_rooms(const Network& network,
                               const std::vector<RoomCloud>& rooms,
                               const RunConfig& config);

}  // namespace paaconv
