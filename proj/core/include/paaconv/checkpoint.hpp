#pragma once

#include <string>

#include "paaconv/network.hpp"

namespace paaconv {

// Binary checkpoint, little-endian regardless of host:
//
//   magic "PAAC1" (5 bytes)
//   u32 in_channels, u32 class_count
//   u32 cascade_count, then per block u32 stride + u32 width
//   u32 parallel_count, then per branch u32 stride
//   u32 parallel_width
//   f64 cell_size, u64 seed
//   f64[] every parameter tensor row-major, declaration order
//
// save/load round-trip byte-identically. load throws ParseError on a bad
// magic, truncated or oversized payload, or a config that fails
// validation; IoError when the file cannot be opened.
void save_checkpoint(const Network& network, const std::string& path);
Network load_checkpoint(const std::string& path);

}  // namespace paaconv
