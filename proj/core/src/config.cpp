#include "paaconv/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>

#include "paaconv/errors.hpp"

namespace paaconv {

NetworkConfig RunConfig::network_config() const {
  NetworkConfig net;
  net.in_channels = channels;
  net.class_count = classes;
  net.cascade_strides = cascade_strides;
  net.cascade_widths = cascade_widths;
  net.parallel_strides = parallel_strides;
  net.parallel_width = parallel_width;
  net.cell_size = cell_size;
  net.seed = seed;
  net.validate();
  return net;
}

void RunConfig::validate() const {
  if (channels != 9 && channels != 12) {
    throw ConfigError("config: channels must be 9 or 12");
  }
  if (k_neighbors < 3) throw ConfigError("config: k_neighbors must be >= 3");
  if (!(block_size > 0.0) || !std::isfinite(block_size)) {
    throw ConfigError("config: block_size must be positive");
  }
  if (points_per_block < 1) {
    throw ConfigError("config: points_per_block must be >= 1");
  }
  if (synth_rooms < 1) throw ConfigError("config: synth.rooms must be >= 1");
  network_config();
  train.validate();
  synth.validate();
}

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t");
  return s.substr(begin, end - begin + 1);
}

[[noreturn]] void fail(long line_no, const std::string& what) {
  throw ConfigError("config line " + std::to_string(line_no) + ": " + what);
}

long long parse_ll(const std::string& value, long line_no) {
  long long out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    fail(line_no, "expected an integer, got '" + value + "'");
  }
  return out;
}

std::uint64_t parse_u64(const std::string& value, long line_no) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    fail(line_no, "expected an unsigned integer, got '" + value + "'");
  }
  return out;
}

double parse_f64(const std::string& value, long line_no) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() ||
      !std::isfinite(out)) {
    fail(line_no, "expected a number, got '" + value + "'");
  }
  return out;
}

bool parse_bool(const std::string& value, long line_no) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  fail(line_no, "expected true/false, got '" + value + "'");
}

std::vector<int> parse_int_list(const std::string& value, long line_no) {
  std::vector<int> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    const std::size_t comma = value.find(',', start);
    const std::string item =
        trim(comma == std::string::npos ? value.substr(start)
                                        : value.substr(start, comma - start));
    if (item.empty()) fail(line_no, "empty list element");
    out.push_back(static_cast<int>(parse_ll(item, line_no)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (out.empty()) fail(line_no, "empty list");
  return out;
}

}  // namespace

void apply_config_file(RunConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("config: cannot open: " + path);

  using Setter = std::function<void(const std::string&, long)>;
  const std::map<std::string, Setter> setters = {
      {"seed", [&](const std::string& v, long n) { config.seed = parse_u64(v, n); }},
      {"cell_size",
       [&](const std::string& v, long n) { config.cell_size = parse_f64(v, n); }},
      {"channels",
       [&](const std::string& v, long n) {
         config.channels = static_cast<int>(parse_ll(v, n));
       }},
      {"k_neighbors",
       [&](const std::string& v, long n) {
         config.k_neighbors = static_cast<int>(parse_ll(v, n));
       }},
      {"block_size",
       [&](const std::string& v, long n) { config.block_size = parse_f64(v, n); }},
      {"points_per_block",
       [&](const std::string& v, long n) {
         config.points_per_block = static_cast<int>(parse_ll(v, n));
       }},
      {"net.classes",
       [&](const std::string& v, long n) {
         config.classes = static_cast<int>(parse_ll(v, n));
       }},
      {"net.cascade_strides",
       [&](const std::string& v, long n) {
         config.cascade_strides = parse_int_list(v, n);
       }},
      {"net.cascade_widths",
       [&](const std::string& v, long n) {
         config.cascade_widths = parse_int_list(v, n);
       }},
      {"net.parallel_strides",
       [&](const std::string& v, long n) {
         config.parallel_strides = parse_int_list(v, n);
       }},
      {"net.parallel_width",
       [&](const std::string& v, long n) {
         config.parallel_width = static_cast<int>(parse_ll(v, n));
       }},
      {"train.lr",
       [&](const std::string& v, long n) {
         config.train.learning_rate = parse_f64(v, n);
       }},
      {"train.momentum",
       [&](const std::string& v, long n) {
         config.train.momentum = parse_f64(v, n);
       }},
      {"train.batch_size",
       [&](const std::string& v, long n) {
         config.train.batch_size = static_cast<int>(parse_ll(v, n));
       }},
      {"train.epochs",
       [&](const std::string& v, long n) {
         config.train.epochs = static_cast<int>(parse_ll(v, n));
       }},
      {"train.checkpoint_every",
       [&](const std::string& v, long n) {
         config.train.checkpoint_every = static_cast<int>(parse_ll(v, n));
       }},
      {"synth.rooms",
       [&](const std::string& v, long n) {
         config.synth_rooms = static_cast<int>(parse_ll(v, n));
       }},
      {"synth.points",
       [&](const std::string& v, long n) {
         config.synth.points = static_cast<int>(parse_ll(v, n));
       }},
      {"synth.classes",
       [&](const std::string& v, long n) {
         config.synth.classes = static_cast<int>(parse_ll(v, n));
       }},
      {"synth.objects",
       [&](const std::string& v, long n) {
         config.synth.objects = static_cast<int>(parse_ll(v, n));
       }},
      {"synth.noise",
       [&](const std::string& v, long n) { config.synth.noise = parse_f64(v, n); }},
      {"synth.width",
       [&](const std::string& v, long n) { config.synth.width = parse_f64(v, n); }},
      {"synth.depth",
       [&](const std::string& v, long n) { config.synth.depth = parse_f64(v, n); }},
      {"synth.height",
       [&](const std::string& v, long n) { config.synth.height = parse_f64(v, n); }},
      {"synth.floor_only",
       [&](const std::string& v, long n) {
         config.synth.floor_only = parse_bool(v, n);
       }},
  };

  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;

    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      fail(line_no, "expected 'key = value'");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) fail(line_no, "missing key");
    if (value.empty()) fail(line_no, "missing value for '" + key + "'");

    const auto it = setters.find(key);
    if (it == setters.end()) fail(line_no, "unknown key '" + key + "'");
    it->second(value, line_no);
  }
}

}  // namespace paaconv
