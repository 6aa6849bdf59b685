// Microbenchmarks for the hot paths: voxel grid construction, k-d tree
// queries, the atrous convolution, and a whole-network forward pass.
//
// Run with --benchmark_filter=conv etc.; sizes are picked to resemble one
// training block (4096 points) unless the range says otherwise.

#include <benchmark/benchmark.h>

#include <memory>
#include <vector>

#include "paaconv/kdtree.hpp"
#include "paaconv/network.hpp"
#include "paaconv/ops.hpp"
#include "paaconv/point_cloud.hpp"
#include "paaconv/rng.hpp"
#include "paaconv/voxel_grid.hpp"

namespace {

using namespace paaconv;

PointCloud make_cloud(int n, int channels, double extent, std::uint64_t seed) {
  Rng rng(seed);
  PointCloud cloud;
  cloud.features = Tensor2D(n, channels);
  for (int i = 0; i < n; ++i) {
    cloud.positions.push_back({rng.uniform(0.0, extent), rng.uniform(0.0, extent),
                               rng.uniform(0.0, extent)});
    cloud.labels.push_back(0);
    for (int j = 0; j < channels; ++j) {
      cloud.features(i, j) = rng.uniform(-1.0, 1.0);
    }
  }
  return cloud;
}

KernelWeights make_kernel(int c_in, int c_out, std::uint64_t seed) {
  Rng rng(seed);
  KernelWeights kernel = KernelWeights::zeros(c_in, c_out);
  for (auto& tap : kernel.taps) {
    for (int i = 0; i < tap.rows(); ++i) {
      for (int j = 0; j < tap.cols(); ++j) tap(i, j) = rng.uniform(-0.5, 0.5);
    }
  }
  return kernel;
}

void grid_build(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const PointCloud cloud = make_cloud(n, 1, 1.0, 11);
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_grid(cloud, 0.05));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(grid_build)->Arg(1024)->Arg(4096)->Arg(16384);

void kdtree_knn(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const PointCloud cloud = make_cloud(n, 1, 2.0, 12);
  const KdTree tree(cloud.positions);
  int q = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tree.knn(cloud.positions[q], 16));
    q = (q + 1) % n;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(kdtree_knn)->Arg(4096)->Arg(16384);

void conv_forward(benchmark::State& state) {
  const int n = 4096;
  const int stride = static_cast<int>(state.range(0));
  const PointCloud cloud = make_cloud(n, 32, 1.0, 13);
  const auto layout = std::make_shared<const CellLayout>(
      make_cell_layout(build_grid(cloud, 0.05)));
  const KernelWeights kernel = make_kernel(32, 32, 14);
  const auto neighbors = make_neighbor_table(*layout, stride);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        atrous_conv_forward(cloud.features, layout, kernel, stride, nullptr,
                            neighbors));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(conv_forward)->Arg(1)->Arg(2)->Arg(8);

void network_forward(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  NetworkConfig config;
  config.in_channels = 9;
  config.class_count = 13;
  config.cell_size = 0.05;
  config.seed = 15;
  const Network network = Network::build(config);
  const PointCloud cloud = make_cloud(n, 9, 1.0, 16);
  for (auto _ : state) {
    benchmark::DoNotOptimize(network.forward(cloud));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(network_forward)->Arg(1024)->Arg(4096);

}  // namespace

BENCHMARK_MAIN();
