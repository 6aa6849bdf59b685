#pragma once

#include <array>
#include <memory>
#include <span>
#include <vector>

#include "paaconv/kernel_weights.hpp"
#include "paaconv/tensor.hpp"
#include "paaconv/voxel_grid.hpp"

namespace paaconv {

// ---------------------------------------------------------------------------
// Cell layout: a compact, index-based view of a voxel grid used by the conv
// ops. Cell order matches the grid's sorted cell order, so layouts built
// from the same point set are identical regardless of how it was produced.
// ---------------------------------------------------------------------------

struct CellLayout {
  std::vector<CellCoord> coords;          // sorted ascending
  std::vector<std::vector<int>> members;  // point indices per cell
  std::vector<int> point_cell;            // per point: row into coords

  int cell_count() const { return static_cast<int>(coords.size()); }
  int point_count() const { return static_cast<int>(point_cell.size()); }
  int lookup(const CellCoord& c) const;   // -1 when absent
};

CellLayout make_cell_layout(const VoxelGrid& grid);

// Per-cell neighbor rows for one stride: entry t is the row of the cell at
// atrous_offsets(stride)[t], or -1 when that cell is empty.
using NeighborTable = std::vector<std::array<int, 27>>;
std::shared_ptr<const NeighborTable> make_neighbor_table(const CellLayout& layout,
                                                         int stride);

// ---------------------------------------------------------------------------
// Learnable parameter bundles for the attention ops.
// ---------------------------------------------------------------------------

// Length-5 kernel over the (max, avg) row statistics plus a scalar bias.
struct SpatialAttentionParams {
  Tensor2D kernel;  // 5 x 2
  Tensor2D bias;    // 1 x 1

  static SpatialAttentionParams zeros() {
    SpatialAttentionParams p;
    p.kernel = Tensor2D(5, 2);
    p.bias = Tensor2D(1, 1);
    return p;
  }
  std::size_t parameter_count() const { return kernel.size() + bias.size(); }
};

// Two dense layers of size c shared between the avg and max branches.
struct ChannelAttentionParams {
  Tensor2D dense1;  // c x c
  Tensor2D bias1;   // 1 x c
  Tensor2D dense2;  // c x c
  Tensor2D bias2;   // 1 x c

  static ChannelAttentionParams zeros(int channels) {
    ChannelAttentionParams p;
    p.dense1 = Tensor2D(channels, channels);
    p.bias1 = Tensor2D(1, channels);
    p.dense2 = Tensor2D(channels, channels);
    p.bias2 = Tensor2D(1, channels);
    return p;
  }
  int channels() const { return dense1.rows(); }
  std::size_t parameter_count() const {
    return dense1.size() + bias1.size() + dense2.size() + bias2.size();
  }
};

void accumulate(SpatialAttentionParams& into, const SpatialAttentionParams& g);
void accumulate(ChannelAttentionParams& into, const ChannelAttentionParams& g);

// ---------------------------------------------------------------------------
// Pointwise atrous convolution.
//
// Every point in cell q receives bias + sum over the 27 offsets d of
// mean(q + d) * W_d, where mean() is the per-cell feature mean of the
// current input map and empty cells contribute nothing. All points sharing
// a cell therefore share an output row.
// ---------------------------------------------------------------------------

struct AtrousConvContext {
  std::shared_ptr<const CellLayout> layout;
  std::shared_ptr<const NeighborTable> neighbors;
  Tensor2D cell_means;  // cell_count x c_in
  KernelWeights kernel; // copy taken at forward time
  int stride = 1;
};

struct AtrousConvGrads {
  Tensor2D input;
  KernelWeights kernel;
};

Tensor2D atrous_conv_forward(const Tensor2D& features,
                             std::shared_ptr<const CellLayout> layout,
                             const KernelWeights& kernel, int stride,
                             AtrousConvContext* ctx = nullptr,
                             std::shared_ptr<const NeighborTable> neighbors = nullptr);

// Convenience overload taking the grid plus explicit per-point cells.
Tensor2D atrous_conv_forward(const Tensor2D& features, const VoxelGrid& grid,
                             const std::vector<CellCoord>& cells,
                             const KernelWeights& kernel, int stride,
                             AtrousConvContext* ctx = nullptr);

AtrousConvGrads atrous_conv_backward(const Tensor2D& upstream,
                                     const AtrousConvContext& ctx);

// ---------------------------------------------------------------------------
// ReLU.
// ---------------------------------------------------------------------------

struct ReluContext {
  Tensor2D input;
};

Tensor2D relu_forward(const Tensor2D& x, ReluContext* ctx = nullptr);
Tensor2D relu_backward(const Tensor2D& upstream, const ReluContext& ctx);

// ---------------------------------------------------------------------------
// 1-d convolution along the point sequence: n x c_in -> n x 1, zero padding
// of (len-1)/2 on both sides so the length is preserved.
// ---------------------------------------------------------------------------

struct Conv1dContext {
  Tensor2D input;
  Tensor2D kernel;
};

struct Conv1dGrads {
  Tensor2D input;
  Tensor2D kernel;
  double bias = 0.0;
};

Tensor2D conv1d_forward(const Tensor2D& sequence, const Tensor2D& kernel,
                        double bias, Conv1dContext* ctx = nullptr);
Conv1dGrads conv1d_backward(const Tensor2D& upstream, const Conv1dContext& ctx);

// ---------------------------------------------------------------------------
// Spatial attention: sigmoid(conv1d([rowmax ; rowavg])) -> n x 1 weights.
// The input must already be in canonical point order; the conv runs along
// that sequence.
// ---------------------------------------------------------------------------

struct SpatialAttentionContext {
  Tensor2D pooled;             // n x 2 (max, avg)
  std::vector<int> row_argmax; // column index of each row max (first on ties)
  int input_cols = 0;
  Conv1dContext conv;
  Tensor2D output;             // n x 1, post sigmoid
};

struct SpatialAttentionGrads {
  Tensor2D input;
  SpatialAttentionParams params;
};

Tensor2D spatial_attention_forward(const Tensor2D& features,
                                   const SpatialAttentionParams& params,
                                   SpatialAttentionContext* ctx = nullptr);
SpatialAttentionGrads spatial_attention_backward(const Tensor2D& upstream,
                                                 const SpatialAttentionContext& ctx);

Tensor2D apply_spatial_attention(const Tensor2D& features, const Tensor2D& weights);

struct ApplySpatialGrads {
  Tensor2D input;
  Tensor2D weights;
};
ApplySpatialGrads apply_spatial_attention_backward(const Tensor2D& upstream,
                                                   const Tensor2D& features,
                                                   const Tensor2D& weights);

// ---------------------------------------------------------------------------
// Shared dense pair: v (1 x c) -> relu(v W1 + b1) W2 + b2 (1 x c).
// ---------------------------------------------------------------------------

struct DensePairContext {
  Tensor2D input;    // 1 x c
  Tensor2D pre_act;  // 1 x c, before relu
  Tensor2D hidden;   // 1 x c, after relu
};

struct DensePairGrads {
  Tensor2D input;
  ChannelAttentionParams params;
};

Tensor2D dense_pair_forward(const Tensor2D& v, const ChannelAttentionParams& params,
                            DensePairContext* ctx = nullptr);
DensePairGrads dense_pair_backward(const Tensor2D& upstream,
                                   const DensePairContext& ctx,
                                   const ChannelAttentionParams& params);

// ---------------------------------------------------------------------------
// Channel attention: sigmoid(dense_pair(colavg) + dense_pair(colmax)),
// the dense pair shared between branches -> 1 x c weights.
// ---------------------------------------------------------------------------

struct ChannelAttentionContext {
  Tensor2D col_avg;             // 1 x c
  Tensor2D col_max;             // 1 x c
  std::vector<int> col_argmax;  // row index of each column max (first on ties)
  int input_rows = 0;
  DensePairContext avg_branch;
  DensePairContext max_branch;
  ChannelAttentionParams params;  // copy taken at forward time
  Tensor2D output;                // 1 x c, post sigmoid
};

struct ChannelAttentionGrads {
  Tensor2D input;
  ChannelAttentionParams params;
};

Tensor2D channel_attention_forward(const Tensor2D& features,
                                   const ChannelAttentionParams& params,
                                   ChannelAttentionContext* ctx = nullptr);
ChannelAttentionGrads channel_attention_backward(const Tensor2D& upstream,
                                                 const ChannelAttentionContext& ctx);

Tensor2D apply_channel_attention(const Tensor2D& features, const Tensor2D& weights);

struct ApplyChannelGrads {
  Tensor2D input;
  Tensor2D weights;
};
ApplyChannelGrads apply_channel_attention_backward(const Tensor2D& upstream,
                                                   const Tensor2D& features,
                                                   const Tensor2D& weights);

// ---------------------------------------------------------------------------
// Channel concatenation.
// ---------------------------------------------------------------------------

Tensor2D concat_channels(const std::vector<const Tensor2D*>& maps);
std::vector<Tensor2D> concat_channels_backward(const Tensor2D& upstream,
                                               const std::vector<int>& widths);

// ---------------------------------------------------------------------------
// Softmax cross-entropy over rows. Labels must be in [0, cols). Loss is the
// mean over rows; dlogits is (softmax - onehot) / rows. Probabilities are
// clamped at 1e-12 before the log so the loss stays finite.
// ---------------------------------------------------------------------------

struct SoftmaxCrossEntropy {
  double loss = 0.0;
  Tensor2D dlogits;
  Tensor2D probabilities;
};

SoftmaxCrossEntropy softmax_cross_entropy(const Tensor2D& logits,
                                          std::span<const int> labels);

}  // namespace paaconv
