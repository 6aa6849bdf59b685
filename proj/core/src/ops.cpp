#include "paaconv/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "paaconv/errors.hpp"
#include "paaconv/parallel.hpp"

namespace paaconv {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

// ---------------------------------------------------------------------------
// Cell layout.
// ---------------------------------------------------------------------------

int CellLayout::lookup(const CellCoord& c) const {
  auto it = std::lower_bound(coords.begin(), coords.end(), c);
  if (it == coords.end() || *it != c) return -1;
  return static_cast<int>(it - coords.begin());
}

CellLayout make_cell_layout(const VoxelGrid& grid) {
  CellLayout layout;
  layout.coords.reserve(grid.cells().size());
  layout.members.reserve(grid.cells().size());
  layout.point_cell.assign(grid.point_count(), -1);
  for (const auto& [coord, members] : grid.cells()) {  // map order = sorted
    const int row = layout.cell_count();
    layout.coords.push_back(coord);
    layout.members.push_back(members);
    for (int idx : members) layout.point_cell[idx] = row;
  }
  return layout;
}

std::shared_ptr<const NeighborTable> make_neighbor_table(const CellLayout& layout,
                                                         int stride) {
  const auto offsets = atrous_offsets(stride);
  auto table = std::make_shared<NeighborTable>(layout.cell_count());
  for (int r = 0; r < layout.cell_count(); ++r) {
    for (int t = 0; t < 27; ++t) {
      (*table)[r][t] = layout.lookup(layout.coords[r].offset_by(offsets[t]));
    }
  }
  return table;
}

void accumulate(SpatialAttentionParams& into, const SpatialAttentionParams& g) {
  add_in_place(into.kernel, g.kernel);
  add_in_place(into.bias, g.bias);
}

void accumulate(ChannelAttentionParams& into, const ChannelAttentionParams& g) {
  add_in_place(into.dense1, g.dense1);
  add_in_place(into.bias1, g.bias1);
  add_in_place(into.dense2, g.dense2);
  add_in_place(into.bias2, g.bias2);
}

// ---------------------------------------------------------------------------
// Pointwise atrous convolution.
// ---------------------------------------------------------------------------

Tensor2D atrous_conv_forward(const Tensor2D& features,
                             std::shared_ptr<const CellLayout> layout,
                             const KernelWeights& kernel, int stride,
                             AtrousConvContext* ctx,
                             std::shared_ptr<const NeighborTable> neighbors) {
  if (!layout) throw InvalidArgumentError("atrous_conv: null layout");
  if (features.rows() != layout->point_count()) {
    throw ShapeError("atrous_conv: feature rows " +
                     std::to_string(features.rows()) + " != layout points " +
                     std::to_string(layout->point_count()));
  }
  const int c_in = kernel.in_channels();
  const int c_out = kernel.out_channels();
  if (features.cols() != c_in) {
    throw ShapeError("atrous_conv: feature cols " +
                     std::to_string(features.cols()) + " != kernel input " +
                     std::to_string(c_in));
  }
  if (kernel.bias.rows() != 1 || kernel.bias.cols() != c_out) {
    throw ShapeError("atrous_conv: bias shape mismatch");
  }
  if (!neighbors) neighbors = make_neighbor_table(*layout, stride);
  if (static_cast<int>(neighbors->size()) != layout->cell_count()) {
    throw ShapeError("atrous_conv: neighbor table size mismatch");
  }

  const int n_cells = layout->cell_count();

  // Per-cell feature means of the current map.
  Tensor2D means(n_cells, c_in);
  for (int r = 0; r < n_cells; ++r) {
    double* m = means.row(r);
    const auto& members = layout->members[r];
    for (int idx : members) {
      const double* src = features.row(idx);
      for (int j = 0; j < c_in; ++j) m[j] += src[j];
    }
    const double inv = 1.0 / static_cast<double>(members.size());
    for (int j = 0; j < c_in; ++j) m[j] *= inv;
  }

  // One output row per cell, then broadcast to the member points.
  Tensor2D cell_out(n_cells, c_out);
  parallel_for(n_cells, [&](int r) {
    double* out = cell_out.row(r);
    const double* bias = kernel.bias.row(0);
    for (int j = 0; j < c_out; ++j) out[j] = bias[j];
    for (int t = 0; t < 27; ++t) {
      const int nbr = (*neighbors)[r][t];
      if (nbr < 0) continue;  // empty cell contributes nothing
      const double* m = means.row(nbr);
      const Tensor2D& w = kernel.taps[t];
      for (int a = 0; a < c_in; ++a) {
        const double ma = m[a];
        if (ma == 0.0) continue;
        const double* wrow = w.row(a);
        for (int j = 0; j < c_out; ++j) out[j] += ma * wrow[j];
      }
    }
  });

  Tensor2D out(features.rows(), c_out);
  for (int i = 0; i < features.rows(); ++i) {
    const double* src = cell_out.row(layout->point_cell[i]);
    std::copy(src, src + c_out, out.row(i));
  }

  if (ctx) {
    ctx->layout = layout;
    ctx->neighbors = neighbors;
    ctx->cell_means = std::move(means);
    ctx->kernel = kernel;
    ctx->stride = stride;
  }
  return out;
}

Tensor2D atrous_conv_forward(const Tensor2D& features, const VoxelGrid& grid,
                             const std::vector<CellCoord>& cells,
                             const KernelWeights& kernel, int stride,
                             AtrousConvContext* ctx) {
  if (static_cast<int>(cells.size()) != features.rows()) {
    throw ShapeError("atrous_conv: cells size != feature rows");
  }
  auto layout = std::make_shared<CellLayout>(make_cell_layout(grid));
  // The explicit per-point cells must agree with the grid's membership.
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const int row = layout->lookup(cells[i]);
    if (row < 0 || layout->point_cell[i] != row) {
      throw InvalidInputError("atrous_conv: cell of point " + std::to_string(i) +
                              " does not match the grid");
    }
  }
  return atrous_conv_forward(features, std::move(layout), kernel, stride, ctx);
}

AtrousConvGrads atrous_conv_backward(const Tensor2D& upstream,
                                     const AtrousConvContext& ctx) {
  if (!ctx.layout) throw StateError("atrous_conv_backward: missing context");
  const CellLayout& layout = *ctx.layout;
  const int c_in = ctx.kernel.in_channels();
  const int c_out = ctx.kernel.out_channels();
  if (upstream.rows() != layout.point_count() || upstream.cols() != c_out) {
    throw ShapeError("atrous_conv_backward: upstream shape mismatch");
  }

  const int n_cells = layout.cell_count();

  // Upstream summed per cell: every member row shares the cell output.
  Tensor2D dcell(n_cells, c_out);
  for (int r = 0; r < n_cells; ++r) {
    double* d = dcell.row(r);
    for (int idx : layout.members[r]) {
      const double* u = upstream.row(idx);
      for (int j = 0; j < c_out; ++j) d[j] += u[j];
    }
  }

  AtrousConvGrads grads;
  grads.kernel = KernelWeights::zeros(c_in, c_out);
  Tensor2D dmeans(n_cells, c_in);

  double* dbias = grads.kernel.bias.row(0);
  for (int r = 0; r < n_cells; ++r) {
    const double* d = dcell.row(r);
    for (int j = 0; j < c_out; ++j) dbias[j] += d[j];

    for (int t = 0; t < 27; ++t) {
      const int nbr = (*ctx.neighbors)[r][t];
      if (nbr < 0) continue;
      const double* m = ctx.cell_means.row(nbr);
      Tensor2D& dw = grads.kernel.taps[t];
      const Tensor2D& w = ctx.kernel.taps[t];
      double* dm = dmeans.row(nbr);
      for (int a = 0; a < c_in; ++a) {
        double* dwrow = dw.row(a);
        const double* wrow = w.row(a);
        const double ma = m[a];
        double acc = 0.0;
        for (int j = 0; j < c_out; ++j) {
          dwrow[j] += ma * d[j];
          acc += d[j] * wrow[j];
        }
        dm[a] += acc;
      }
    }
  }

  // Mean backward: each member receives its cell's gradient over the count.
  grads.input = Tensor2D(layout.point_count(), c_in);
  for (int r = 0; r < n_cells; ++r) {
    const double* dm = dmeans.row(r);
    const double inv = 1.0 / static_cast<double>(layout.members[r].size());
    for (int idx : layout.members[r]) {
      double* di = grads.input.row(idx);
      for (int a = 0; a < c_in; ++a) di[a] = dm[a] * inv;
    }
  }
  return grads;
}

// ---------------------------------------------------------------------------
// ReLU.
// ---------------------------------------------------------------------------

Tensor2D relu_forward(const Tensor2D& x, ReluContext* ctx) {
  Tensor2D out = x;
  for (double& v : out.data()) v = v > 0.0 ? v : 0.0;
  if (ctx) ctx->input = x;
  return out;
}

Tensor2D relu_backward(const Tensor2D& upstream, const ReluContext& ctx) {
  if (!upstream.same_shape(ctx.input)) {
    throw ShapeError("relu_backward: upstream shape mismatch");
  }
  Tensor2D dx = upstream;
  const auto& in = ctx.input.data();
  auto& d = dx.data();
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (in[i] <= 0.0) d[i] = 0.0;
  }
  return dx;
}

// ---------------------------------------------------------------------------
// 1-d convolution along the sequence.
// ---------------------------------------------------------------------------

Tensor2D conv1d_forward(const Tensor2D& sequence, const Tensor2D& kernel,
                        double bias, Conv1dContext* ctx) {
  const int len = kernel.rows();
  if (len < 1 || len % 2 == 0) {
    throw ShapeError("conv1d: kernel length must be odd and positive");
  }
  if (kernel.cols() != sequence.cols()) {
    throw ShapeError("conv1d: kernel cols != sequence cols");
  }
  const int n = sequence.rows();
  const int c = sequence.cols();
  const int pad = (len - 1) / 2;

  Tensor2D out(n, 1);
  for (int i = 0; i < n; ++i) {
    double acc = bias;
    for (int t = 0; t < len; ++t) {
      const int r = i + t - pad;
      if (r < 0 || r >= n) continue;  // zero padding
      const double* seq = sequence.row(r);
      const double* k = kernel.row(t);
      for (int j = 0; j < c; ++j) acc += seq[j] * k[j];
    }
    out(i, 0) = acc;
  }
  if (ctx) {
    ctx->input = sequence;
    ctx->kernel = kernel;
  }
  return out;
}

Conv1dGrads conv1d_backward(const Tensor2D& upstream, const Conv1dContext& ctx) {
  const int n = ctx.input.rows();
  const int c = ctx.input.cols();
  const int len = ctx.kernel.rows();
  const int pad = (len - 1) / 2;
  if (upstream.rows() != n || upstream.cols() != 1) {
    throw ShapeError("conv1d_backward: upstream shape mismatch");
  }

  Conv1dGrads grads;
  grads.input = Tensor2D(n, c);
  grads.kernel = Tensor2D(len, c);
  for (int i = 0; i < n; ++i) {
    const double u = upstream(i, 0);
    grads.bias += u;
    for (int t = 0; t < len; ++t) {
      const int r = i + t - pad;
      if (r < 0 || r >= n) continue;
      const double* seq = ctx.input.row(r);
      const double* k = ctx.kernel.row(t);
      double* dk = grads.kernel.row(t);
      double* ds = grads.input.row(r);
      for (int j = 0; j < c; ++j) {
        dk[j] += u * seq[j];
        ds[j] += u * k[j];
      }
    }
  }
  return grads;
}

// ---------------------------------------------------------------------------
// Spatial attention.
// ---------------------------------------------------------------------------

Tensor2D spatial_attention_forward(const Tensor2D& features,
                                   const SpatialAttentionParams& params,
                                   SpatialAttentionContext* ctx) {
  if (features.cols() < 1) {
    throw ShapeError("spatial_attention: need at least one channel");
  }
  if (params.kernel.rows() != 5 || params.kernel.cols() != 2 ||
      params.bias.rows() != 1 || params.bias.cols() != 1) {
    throw ShapeError("spatial_attention: bad parameter shapes");
  }
  const int n = features.rows();
  const int c = features.cols();

  Tensor2D pooled(n, 2);
  std::vector<int> argmax(n, 0);
  for (int i = 0; i < n; ++i) {
    const double* row = features.row(i);
    double best = row[0];
    int best_j = 0;
    double sum = row[0];
    for (int j = 1; j < c; ++j) {
      sum += row[j];
      if (row[j] > best) {
        best = row[j];
        best_j = j;
      }
    }
    pooled(i, 0) = best;
    pooled(i, 1) = sum / static_cast<double>(c);
    argmax[i] = best_j;
  }

  Conv1dContext conv_ctx;
  Tensor2D pre = conv1d_forward(pooled, params.kernel, params.bias(0, 0),
                                ctx ? &conv_ctx : nullptr);
  Tensor2D weights(n, 1);
  for (int i = 0; i < n; ++i) weights(i, 0) = sigmoid(pre(i, 0));

  if (ctx) {
    ctx->pooled = std::move(pooled);
    ctx->row_argmax = std::move(argmax);
    ctx->input_cols = c;
    ctx->conv = std::move(conv_ctx);
    ctx->output = weights;
  }
  return weights;
}

SpatialAttentionGrads spatial_attention_backward(const Tensor2D& upstream,
                                                 const SpatialAttentionContext& ctx) {
  const int n = ctx.pooled.rows();
  const int c = ctx.input_cols;
  if (upstream.rows() != n || upstream.cols() != 1) {
    throw ShapeError("spatial_attention_backward: upstream shape mismatch");
  }

  Tensor2D dpre(n, 1);
  for (int i = 0; i < n; ++i) {
    const double s = ctx.output(i, 0);
    dpre(i, 0) = upstream(i, 0) * s * (1.0 - s);
  }
  Conv1dGrads conv = conv1d_backward(dpre, ctx.conv);

  SpatialAttentionGrads grads;
  grads.params.kernel = std::move(conv.kernel);
  grads.params.bias = Tensor2D(1, 1);
  grads.params.bias(0, 0) = conv.bias;

  grads.input = Tensor2D(n, c);
  const double inv_c = 1.0 / static_cast<double>(c);
  for (int i = 0; i < n; ++i) {
    double* d = grads.input.row(i);
    const double davg = conv.input(i, 1) * inv_c;
    for (int j = 0; j < c; ++j) d[j] = davg;
    d[ctx.row_argmax[i]] += conv.input(i, 0);
  }
  return grads;
}

Tensor2D apply_spatial_attention(const Tensor2D& features,
                                 const Tensor2D& weights) {
  if (weights.rows() != features.rows() || weights.cols() != 1) {
    throw ShapeError("apply_spatial_attention: weights must be rows x 1");
  }
  Tensor2D out = features;
  for (int i = 0; i < out.rows(); ++i) {
    const double s = weights(i, 0);
    double* row = out.row(i);
    for (int j = 0; j < out.cols(); ++j) row[j] *= s;
  }
  return out;
}

ApplySpatialGrads apply_spatial_attention_backward(const Tensor2D& upstream,
                                                   const Tensor2D& features,
                                                   const Tensor2D& weights) {
  if (!upstream.same_shape(features)) {
    throw ShapeError("apply_spatial_attention_backward: shape mismatch");
  }
  ApplySpatialGrads grads;
  grads.input = Tensor2D(features.rows(), features.cols());
  grads.weights = Tensor2D(features.rows(), 1);
  for (int i = 0; i < features.rows(); ++i) {
    const double s = weights(i, 0);
    const double* u = upstream.row(i);
    const double* f = features.row(i);
    double* di = grads.input.row(i);
    double acc = 0.0;
    for (int j = 0; j < features.cols(); ++j) {
      di[j] = u[j] * s;
      acc += u[j] * f[j];
    }
    grads.weights(i, 0) = acc;
  }
  return grads;
}

// ---------------------------------------------------------------------------
// Dense pair.
// ---------------------------------------------------------------------------

Tensor2D dense_pair_forward(const Tensor2D& v, const ChannelAttentionParams& params,
                            DensePairContext* ctx) {
  const int c = params.channels();
  if (v.rows() != 1 || v.cols() != c) {
    throw ShapeError("dense_pair: input must be 1 x channels");
  }
  if (params.dense1.cols() != c || params.dense2.rows() != c ||
      params.dense2.cols() != c || params.bias1.cols() != c ||
      params.bias2.cols() != c) {
    throw ShapeError("dense_pair: bad parameter shapes");
  }

  Tensor2D pre(1, c);
  for (int j = 0; j < c; ++j) {
    double acc = params.bias1(0, j);
    for (int a = 0; a < c; ++a) acc += v(0, a) * params.dense1(a, j);
    pre(0, j) = acc;
  }
  Tensor2D hidden = pre;
  for (double& h : hidden.data()) h = h > 0.0 ? h : 0.0;

  Tensor2D out(1, c);
  for (int j = 0; j < c; ++j) {
    double acc = params.bias2(0, j);
    for (int a = 0; a < c; ++a) acc += hidden(0, a) * params.dense2(a, j);
    out(0, j) = acc;
  }
  if (ctx) {
    ctx->input = v;
    ctx->pre_act = std::move(pre);
    ctx->hidden = std::move(hidden);
  }
  return out;
}

DensePairGrads dense_pair_backward(const Tensor2D& upstream,
                                   const DensePairContext& ctx,
                                   const ChannelAttentionParams& params) {
  const int c = params.channels();
  if (upstream.rows() != 1 || upstream.cols() != c) {
    throw ShapeError("dense_pair_backward: upstream shape mismatch");
  }

  DensePairGrads grads;
  grads.params = ChannelAttentionParams::zeros(c);
  grads.params.bias2 = upstream;
  for (int a = 0; a < c; ++a) {
    const double h = ctx.hidden(0, a);
    double* dw = grads.params.dense2.row(a);
    for (int j = 0; j < c; ++j) dw[j] = h * upstream(0, j);
  }

  Tensor2D dhidden(1, c);
  for (int a = 0; a < c; ++a) {
    double acc = 0.0;
    for (int j = 0; j < c; ++j) acc += upstream(0, j) * params.dense2(a, j);
    dhidden(0, a) = acc;
  }
  Tensor2D dpre = dhidden;
  for (int a = 0; a < c; ++a) {
    if (ctx.pre_act(0, a) <= 0.0) dpre(0, a) = 0.0;
  }

  grads.params.bias1 = dpre;
  for (int a = 0; a < c; ++a) {
    const double vi = ctx.input(0, a);
    double* dw = grads.params.dense1.row(a);
    for (int j = 0; j < c; ++j) dw[j] = vi * dpre(0, j);
  }

  grads.input = Tensor2D(1, c);
  for (int a = 0; a < c; ++a) {
    double acc = 0.0;
    for (int j = 0; j < c; ++j) acc += dpre(0, j) * params.dense1(a, j);
    grads.input(0, a) = acc;
  }
  return grads;
}

// ---------------------------------------------------------------------------
// Channel attention.
// ---------------------------------------------------------------------------

Tensor2D channel_attention_forward(const Tensor2D& features,
                                   const ChannelAttentionParams& params,
                                   ChannelAttentionContext* ctx) {
  const int n = features.rows();
  const int c = features.cols();
  if (n < 1) {
    throw InvalidInputError("channel_attention: empty feature map");
  }
  if (c != params.channels()) {
    throw ShapeError("channel_attention: feature cols " + std::to_string(c) +
                     " != parameter channels " +
                     std::to_string(params.channels()));
  }

  Tensor2D col_avg(1, c);
  Tensor2D col_max(1, c);
  std::vector<int> argmax(c, 0);
  for (int j = 0; j < c; ++j) {
    double best = features(0, j);
    int best_i = 0;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double v = features(i, j);
      sum += v;
      if (v > best) {
        best = v;
        best_i = i;
      }
    }
    col_avg(0, j) = sum / static_cast<double>(n);
    col_max(0, j) = best;
    argmax[j] = best_i;
  }

  DensePairContext avg_ctx, max_ctx;
  Tensor2D pa = dense_pair_forward(col_avg, params, ctx ? &avg_ctx : nullptr);
  Tensor2D pm = dense_pair_forward(col_max, params, ctx ? &max_ctx : nullptr);

  Tensor2D weights(1, c);
  for (int j = 0; j < c; ++j) weights(0, j) = sigmoid(pa(0, j) + pm(0, j));

  if (ctx) {
    ctx->col_avg = std::move(col_avg);
    ctx->col_max = std::move(col_max);
    ctx->col_argmax = std::move(argmax);
    ctx->input_rows = n;
    ctx->avg_branch = std::move(avg_ctx);
    ctx->max_branch = std::move(max_ctx);
    ctx->params = params;
    ctx->output = weights;
  }
  return weights;
}

ChannelAttentionGrads channel_attention_backward(const Tensor2D& upstream,
                                                 const ChannelAttentionContext& ctx) {
  const int c = ctx.params.channels();
  const int n = ctx.input_rows;
  if (upstream.rows() != 1 || upstream.cols() != c) {
    throw ShapeError("channel_attention_backward: upstream shape mismatch");
  }

  Tensor2D dpre(1, c);
  for (int j = 0; j < c; ++j) {
    const double s = ctx.output(0, j);
    dpre(0, j) = upstream(0, j) * s * (1.0 - s);
  }

  DensePairGrads ga = dense_pair_backward(dpre, ctx.avg_branch, ctx.params);
  DensePairGrads gm = dense_pair_backward(dpre, ctx.max_branch, ctx.params);

  ChannelAttentionGrads grads;
  grads.params = std::move(ga.params);
  accumulate(grads.params, gm.params);  // the dense pair is shared

  grads.input = Tensor2D(n, c);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (int j = 0; j < c; ++j) {
    const double davg = ga.input(0, j) * inv_n;
    for (int i = 0; i < n; ++i) grads.input(i, j) = davg;
    grads.input(ctx.col_argmax[j], j) += gm.input(0, j);
  }
  return grads;
}

Tensor2D apply_channel_attention(const Tensor2D& features,
                                 const Tensor2D& weights) {
  if (weights.rows() != 1 || weights.cols() != features.cols()) {
    throw ShapeError("apply_channel_attention: weights must be 1 x cols");
  }
  Tensor2D out = features;
  for (int i = 0; i < out.rows(); ++i) {
    double* row = out.row(i);
    for (int j = 0; j < out.cols(); ++j) row[j] *= weights(0, j);
  }
  return out;
}

ApplyChannelGrads apply_channel_attention_backward(const Tensor2D& upstream,
                                                   const Tensor2D& features,
                                                   const Tensor2D& weights) {
  if (!upstream.same_shape(features)) {
    throw ShapeError("apply_channel_attention_backward: shape mismatch");
  }
  ApplyChannelGrads grads;
  grads.input = Tensor2D(features.rows(), features.cols());
  grads.weights = Tensor2D(1, features.cols());
  for (int i = 0; i < features.rows(); ++i) {
    const double* u = upstream.row(i);
    const double* f = features.row(i);
    double* di = grads.input.row(i);
    for (int j = 0; j < features.cols(); ++j) {
      di[j] = u[j] * weights(0, j);
      grads.weights(0, j) += u[j] * f[j];
    }
  }
  return grads;
}

// ---------------------------------------------------------------------------
// Concatenation.
// ---------------------------------------------------------------------------

Tensor2D concat_channels(const std::vector<const Tensor2D*>& maps) {
  if (maps.empty()) {
    throw InvalidArgumentError("concat_channels: no inputs");
  }
  const int n = maps[0]->rows();
  int total = 0;
  for (const Tensor2D* m : maps) {
    if (m->rows() != n) {
      throw ShapeError("concat_channels: row count mismatch");
    }
    total += m->cols();
  }
  Tensor2D out(n, total);
  for (int i = 0; i < n; ++i) {
    double* dst = out.row(i);
    for (const Tensor2D* m : maps) {
      const double* src = m->row(i);
      dst = std::copy(src, src + m->cols(), dst);
    }
  }
  return out;
}

std::vector<Tensor2D> concat_channels_backward(const Tensor2D& upstream,
                                               const std::vector<int>& widths) {
  int total = 0;
  for (int w : widths) total += w;
  if (total != upstream.cols()) {
    throw ShapeError("concat_channels_backward: widths do not sum to cols");
  }
  std::vector<Tensor2D> grads;
  grads.reserve(widths.size());
  int offset = 0;
  for (int w : widths) {
    Tensor2D g(upstream.rows(), w);
    for (int i = 0; i < upstream.rows(); ++i) {
      const double* src = upstream.row(i) + offset;
      std::copy(src, src + w, g.row(i));
    }
    grads.push_back(std::move(g));
    offset += w;
  }
  return grads;
}

// ---------------------------------------------------------------------------
// Softmax cross-entropy.
// ---------------------------------------------------------------------------

SoftmaxCrossEntropy softmax_cross_entropy(const Tensor2D& logits,
                                          std::span<const int> labels) {
  const int n = logits.rows();
  const int c = logits.cols();
  if (n < 1 || c < 1) {
    throw InvalidInputError("softmax_cross_entropy: empty logits");
  }
  if (static_cast<int>(labels.size()) != n) {
    throw ShapeError("softmax_cross_entropy: labels size != rows");
  }

  SoftmaxCrossEntropy result;
  result.probabilities = Tensor2D(n, c);
  result.dlogits = Tensor2D(n, c);

  double loss_sum = 0.0;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (int i = 0; i < n; ++i) {
    const int y = labels[i];
    if (y < 0 || y >= c) {
      throw InvalidInputError("softmax_cross_entropy: label " +
                              std::to_string(y) + " at row " +
                              std::to_string(i) + " out of range [0, " +
                              std::to_string(c) + ")");
    }
    const double* row = logits.row(i);
    double peak = row[0];
    for (int j = 1; j < c; ++j) peak = std::max(peak, row[j]);

    double* p = result.probabilities.row(i);
    double z = 0.0;
    for (int j = 0; j < c; ++j) {
      p[j] = std::exp(row[j] - peak);
      z += p[j];
    }
    const double inv_z = 1.0 / z;
    for (int j = 0; j < c; ++j) p[j] *= inv_z;

    loss_sum += -std::log(std::max(p[y], 1e-12));

    double* d = result.dlogits.row(i);
    for (int j = 0; j < c; ++j) d[j] = p[j] * inv_n;
    d[y] -= inv_n;
  }
  result.loss = loss_sum * inv_n;
  return result;
}

}  // namespace paaconv
