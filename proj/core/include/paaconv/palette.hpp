#pragma once

#include <array>
#include <cstdint>

namespace paaconv {

inline constexpr int kPaletteSize = 13;

// Fixed color per class id, shared by the synthetic generator and the PLY
// exporter so round-trips are exact.
const std::array<std::array<std::uint8_t, 3>, kPaletteSize>& class_palette();

// Palette color for a label; mid-gray for -1 (unlabeled) or out-of-range.
std::array<std::uint8_t, 3> color_for_label(int label);

}  // namespace paaconv
