#include <fstream>
#include <string>

#include "doctest.h"
#include "paaconv/checkpoint.hpp"
#include "paaconv/errors.hpp"
#include "paaconv/network.hpp"
#include "test_util.hpp"

using namespace paaconv;

namespace {

NetworkConfig small_config() {
  NetworkConfig cfg;
  cfg.in_channels = 3;
  cfg.class_count = 4;
  cfg.cascade_strides = {1, 2};
  cfg.cascade_widths = {4, 6};
  cfg.parallel_strides = {2, 4};
  cfg.parallel_width = 5;
  cfg.cell_size = 0.2;
  cfg.seed = 77;
  return cfg;
}

}  // namespace

TEST_CASE("checkpoints round-trip parameters and topology bitwise") {
  testutil::TempDir dir;
  const Network net = Network::build(small_config());
  const std::string path = dir.file("model.ckpt");
  save_checkpoint(net, path);

  const Network loaded = load_checkpoint(path);
  CHECK(loaded.config().in_channels == 3);
  CHECK(loaded.config().class_count == 4);
  CHECK(loaded.config().cascade_strides == std::vector<int>{1, 2});
  CHECK(loaded.config().cascade_widths == std::vector<int>{4, 6});
  CHECK(loaded.config().parallel_strides == std::vector<int>{2, 4});
  CHECK(loaded.config().parallel_width == 5);
  CHECK(loaded.config().cell_size == 0.2);
  CHECK(loaded.config().seed == 77);

  const auto a = tensor_list(net.params());
  const auto b = tensor_list(loaded.params());
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(max_abs_diff(*a[i], *b[i]) == 0.0);
  }

  // save -> load -> save reproduces the file byte for byte
  const std::string again = dir.file("model2.ckpt");
  save_checkpoint(loaded, again);
  CHECK(testutil::read_file_bytes(path) == testutil::read_file_bytes(again));
}

TEST_CASE("checkpoint loading rejects damage") {
  testutil::TempDir dir;
  const Network net = Network::build(small_config());
  const std::string path = dir.file("model.ckpt");
  save_checkpoint(net, path);
  const std::string good = testutil::read_file_bytes(path);

  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_checkpoint(dir.file("nope.ckpt")), IoError);
  }
  SUBCASE("bad magic") {
    std::string bytes = good;
    bytes[0] = 'X';
    std::ofstream(path, std::ios::binary) << bytes;
    CHECK_THROWS_AS(load_checkpoint(path), ParseError);
  }
  SUBCASE("truncated header") {
    std::ofstream(path, std::ios::binary) << good.substr(0, 9);
    CHECK_THROWS_AS(load_checkpoint(path), ParseError);
  }
  SUBCASE("truncated parameters") {
    std::ofstream(path, std::ios::binary) << good.substr(0, good.size() - 5);
    CHECK_THROWS_AS(load_checkpoint(path), ParseError);
  }
  SUBCASE("trailing bytes") {
    std::ofstream(path, std::ios::binary) << (good + "XX");
    CHECK_THROWS_AS(load_checkpoint(path), ParseError);
  }
}

TEST_CASE("the header is little-endian with the documented magic") {
  testutil::TempDir dir;
  const Network net = Network::build(small_config());
  const std::string path = dir.file("model.ckpt");
  save_checkpoint(net, path);
  const std::string bytes = testutil::read_file_bytes(path);

  REQUIRE(bytes.size() > 13);
  CHECK(bytes.substr(0, 5) == "PAAC1");
  // in_channels = 3 as little-endian u32
  CHECK(static_cast<unsigned char>(bytes[5]) == 3);
  CHECK(static_cast<unsigned char>(bytes[6]) == 0);
  CHECK(static_cast<unsigned char>(bytes[7]) == 0);
  CHECK(static_cast<unsigned char>(bytes[8]) == 0);
  // class_count = 4
  CHECK(static_cast<unsigned char>(bytes[9]) == 4);
}
