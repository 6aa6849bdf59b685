#include "paaconv/pipeline.hpp"

#include <algorithm>
#include <filesystem>

#include "paaconv/errors.hpp"
#include "paaconv/kdtree.hpp"
#include "paaconv/normals.hpp"

namespace paaconv {

namespace fs = std::filesystem;

std::vector<std::string> list_cloud_files(const std::string& directory) {
  std::error_code ec;
  if (!fs::is_directory(directory, ec)) {
    throw IoError("dataset: not a directory: " + directory);
  }
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(directory)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") {
      files.push_back(entry.path().string());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

LoadedDataset load_dataset(const std::vector<std::string>& files,
                           const RunConfig& config) {
  LoadedDataset dataset;
  for (std::size_t ri = 0; ri < files.size(); ++ri) {
    const RoomCloud room = load_cloud(files[ri]);

    PartitionOptions options;
    options.block_size = config.block_size;
    options.points_per_block = config.points_per_block;
    options.seed = config.seed + ri;
    std::vector<Block> blocks = partition_blocks(room, options);

    if (config.channels == 12) {
      dataset.normal_fallbacks +=
          attach_normals(blocks, room, config.k_neighbors);
    }
    for (Block& block : blocks) {
      dataset.blocks.push_back(
          canonical_sort(std::move(block), config.cell_size));
    }
    ++dataset.rooms;
  }
  return dataset;
}

std::vector<int> predict_room(const Network& network, const RoomCloud& room,
                              const RunConfig& config) {
  const int needed = network.config().in_channels;
  if (needed != 9 && needed != 12) {
    throw ConfigError("predict: checkpoint expects " + std::to_string(needed) +
                      " channels; only 9 or 12 can be assembled from room data");
  }
  if (room.size() == 0) return {};

  PartitionOptions options;
  options.block_size = config.block_size;
  options.points_per_block = config.points_per_block;
  options.min_points = 1;  // prediction must reach sparse tiles too
  options.seed = config.seed;
  std::vector<Block> blocks = partition_blocks(room, options);
  if (needed == 12) attach_normals(blocks, room, config.k_neighbors);

  const int classes = network.config().class_count;
  Tensor2D logit_sums(room.size(), classes);
  std::vector<char> covered(room.size(), 0);

  for (Block& block : blocks) {
    Block sorted = canonical_sort(std::move(block), config.cell_size);
    const Tensor2D logits = network.forward(sorted.cloud);
    for (int i = 0; i < sorted.cloud.size(); ++i) {
      const int src = sorted.source_indices[i];
      const double* row = logits.row(i);
      double* acc = logit_sums.row(src);
      for (int j = 0; j < classes; ++j) acc[j] += row[j];
      covered[src] = 1;
    }
  }

  std::vector<int> labels(room.size(), -1);
  std::vector<Vec3> covered_positions;
  std::vector<int> covered_indices;
  for (int i = 0; i < room.size(); ++i) {
    if (!covered[i]) continue;
    const double* row = logit_sums.row(i);
    int best = 0;
    for (int j = 1; j < classes; ++j) {
      if (row[j] > row[best]) best = j;
    }
    labels[i] = best;
    covered_positions.push_back(room.positions[i]);
    covered_indices.push_back(i);
  }

  // Down-sampling can leave points without a block; inherit the nearest
  // covered label so every input point gets an answer.
  if (covered_indices.empty()) {
    throw StateError("predict: no point was covered by any block");
  }
  if (covered_indices.size() < static_cast<std::size_t>(room.size())) {
    const KdTree tree(covered_positions);
    for (int i = 0; i < room.size(); ++i) {
      if (covered[i]) continue;
      const auto nearest = tree.knn(room.positions[i], 1);
      labels[i] = labels[covered_indices[nearest[0]]];
    }
  }
  return labels;
}

ConfusionMatrix evaluate_rooms(const Network& network,
                               const std::vector<RoomCloud>& rooms,
                               const RunConfig& config) {
  ConfusionMatrix cm(network.config().class_count);
  for (const RoomCloud& room : rooms) {
    const std::vector<int> predicted = predict_room(network, room, config);
    cm.accumulate(room.labels, predicted);
  }
  return cm;
}

}  // namespace paaconv
