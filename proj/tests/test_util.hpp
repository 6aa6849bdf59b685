#pragma once

// Small helpers shared across the test files.

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "paaconv/point_cloud.hpp"
#include "paaconv/rng.hpp"
#include "paaconv/tensor.hpp"

namespace testutil {

inline paaconv::Tensor2D random_tensor(paaconv::Rng& rng, int rows, int cols,
                                       double lo = -1.0, double hi = 1.0) {
  paaconv::Tensor2D t(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) t(i, j) = rng.uniform(lo, hi);
  }
  return t;
}

inline std::vector<paaconv::Vec3> random_positions(paaconv::Rng& rng, int n,
                                                   double extent = 1.0) {
  std::vector<paaconv::Vec3> p(n);
  for (auto& v : p) {
    v = {rng.uniform(0.0, extent), rng.uniform(0.0, extent),
         rng.uniform(0.0, extent)};
  }
  return p;
}

inline paaconv::PointCloud random_cloud(paaconv::Rng& rng, int n, int channels,
                                        double extent = 1.0) {
  paaconv::PointCloud cloud;
  cloud.positions = random_positions(rng, n, extent);
  cloud.features = random_tensor(rng, n, channels);
  cloud.labels.assign(n, 0);
  return cloud;
}

// Fresh directory under the system temp root, removed when the object
// goes out of scope. Each instance gets a unique path.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    const auto base = std::filesystem::temp_directory_path();
    do {
      path_ = base / ("paaconv_test_" + std::to_string(::getpid()) + "_" +
                      std::to_string(counter++));
    } while (std::filesystem::exists(path_));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const {
    return (path_ / name).string();
  }

 private:
  std::filesystem::path path_;
};

inline std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

}  // namespace testutil
