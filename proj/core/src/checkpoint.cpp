#include "paaconv/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <limits>

#include "paaconv/errors.hpp"

namespace paaconv {

namespace {

constexpr char kMagic[5] = {'P', 'A', 'A', 'C', '1'};

void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 8);
}

void put_f64(std::ostream& out, double v) {
  put_u64(out, std::bit_cast<std::uint64_t>(v));
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) {
    throw ParseError("checkpoint: truncated file");
  }
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) {
    throw ParseError("checkpoint: truncated file");
  }
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

int checked_int(std::uint32_t v, const char* what) {
  if (v > static_cast<std::uint32_t>(std::numeric_limits<int>::max())) {
    throw ParseError(std::string("checkpoint: ") + what + " out of range");
  }
  return static_cast<int>(v);
}

}  // namespace

void save_checkpoint(const Network& network, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("checkpoint: cannot open for writing: " + path);

  const NetworkConfig& cfg = network.config();
  out.write(kMagic, sizeof(kMagic));
  put_u32(out, static_cast<std::uint32_t>(cfg.in_channels));
  put_u32(out, static_cast<std::uint32_t>(cfg.class_count));
  put_u32(out, static_cast<std::uint32_t>(cfg.cascade_strides.size()));
  for (std::size_t i = 0; i < cfg.cascade_strides.size(); ++i) {
    put_u32(out, static_cast<std::uint32_t>(cfg.cascade_strides[i]));
    put_u32(out, static_cast<std::uint32_t>(cfg.cascade_widths[i]));
  }
  put_u32(out, static_cast<std::uint32_t>(cfg.parallel_strides.size()));
  for (int s : cfg.parallel_strides) put_u32(out, static_cast<std::uint32_t>(s));
  put_u32(out, static_cast<std::uint32_t>(cfg.parallel_width));
  put_f64(out, cfg.cell_size);
  put_u64(out, cfg.seed);

  for (const Tensor2D* t : tensor_list(network.params())) {
    for (double v : t->data()) put_f64(out, v);
  }
  out.flush();
  if (!out) throw IoError("checkpoint: write failed: " + path);
}

Network load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("checkpoint: cannot open: " + path);

  char magic[5];
  if (!in.read(magic, sizeof(magic)) ||
      !std::equal(magic, magic + sizeof(magic), kMagic)) {
    throw ParseError("checkpoint: bad magic, not a checkpoint file");
  }

  NetworkConfig cfg;
  cfg.in_channels = checked_int(get_u32(in), "in_channels");
  cfg.class_count = checked_int(get_u32(in), "class_count");
  const int cascade_count = checked_int(get_u32(in), "cascade_count");
  if (cascade_count < 1 || cascade_count > 1024) {
    throw ParseError("checkpoint: implausible cascade count");
  }
  cfg.cascade_strides.clear();
  cfg.cascade_widths.clear();
  for (int i = 0; i < cascade_count; ++i) {
    cfg.cascade_strides.push_back(checked_int(get_u32(in), "cascade stride"));
    cfg.cascade_widths.push_back(checked_int(get_u32(in), "cascade width"));
  }
  const int parallel_count = checked_int(get_u32(in), "parallel_count");
  if (parallel_count < 1 || parallel_count > 1024) {
    throw ParseError("checkpoint: implausible parallel count");
  }
  cfg.parallel_strides.clear();
  for (int i = 0; i < parallel_count; ++i) {
    cfg.parallel_strides.push_back(checked_int(get_u32(in), "parallel stride"));
  }
  cfg.parallel_width = checked_int(get_u32(in), "parallel_width");
  cfg.cell_size = get_f64(in);
  cfg.seed = get_u64(in);

  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ParseError(std::string("checkpoint: invalid config: ") + e.what());
  }

  Network network = Network::build(cfg);
  for (Tensor2D* t : tensor_list(network.params())) {
    for (double& v : t->data()) v = get_f64(in);
  }
  char extra;
  if (in.read(&extra, 1)) {
    throw ParseError("checkpoint: trailing bytes after parameters");
  }
  return network;
}

}  // namespace paaconv
