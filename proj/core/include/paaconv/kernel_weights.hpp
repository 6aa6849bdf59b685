#pragma once

#include <array>
#include <cstddef>

#include "paaconv/tensor.hpp"

namespace paaconv {

// Weights of one pointwise atrous convolution: one c_in x c_out matrix per
// neighborhood offset (same order as atrous_offsets) plus a bias row. The
// parameter count is independent of the stride; dilation only changes
// which cells the taps read.
struct KernelWeights {
  std::array<Tensor2D, 27> taps;
  Tensor2D bias;  // 1 x c_out

  static KernelWeights zeros(int in_channels, int out_channels);

  int in_channels() const { return taps[0].rows(); }
  int out_channels() const { return taps[0].cols(); }

  std::size_t parameter_count() const {
    return 27 * taps[0].size() + bias.size();
  }
};

void accumulate(KernelWeights& into, const KernelWeights& grads);

inline KernelWeights KernelWeights::zeros(int in_channels, int out_channels) {
  KernelWeights k;
  for (auto& tap : k.taps) tap = Tensor2D(in_channels, out_channels);
  k.bias = Tensor2D(1, out_channels);
  return k;
}

inline void accumulate(KernelWeights& into, const KernelWeights& grads) {
  for (int t = 0; t < 27; ++t) add_in_place(into.taps[t], grads.taps[t]);
  add_in_place(into.bias, grads.bias);
}

}  // namespace paaconv
