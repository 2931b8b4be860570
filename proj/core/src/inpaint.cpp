// Copyright (C) 2026 the gapfill authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "gapfill/inpaint.hpp"

#include <algorithm>
#include <cmath>

#include "gapfill/common.hpp"

namespace gapfill::nn {

namespace {

Tensor context_input(const ContextTensor& ctx) {
  Tensor input({1, 4, ctx.n_bins, ctx.n_frames});
  std::copy(ctx.data.begin(), ctx.data.end(), input.values().begin());
  return input;
}

}  // namespace

TFMatrix predict_gap_grid(Network& net, const Segment& seg,
                          const STFTParams& params) {
  const FrameLayout layout = compute_frame_layout(seg.spec, params);
  require(net.config().input_shape[1] == params.n_bins() &&
              net.config().input_shape[2] == layout.context_frames,
          "segment geometry does not match the network input");
  require(net.config().output_shape[2] == layout.gap_region_frames,
          "segment geometry does not match the network output");

  ContextSpectra ctx = context_stfts(seg, params);
  Tensor pred =
      net.forward(context_input(to_context_tensor(ctx)), /*training=*/false);

  TFMatrix grid = TFMatrix::zeros(params, layout.gap_region_frames,
                                  layout.gap_region_first * params.hop);
  const int bins = grid.n_bins, frames = grid.n_frames;
  for (int bin = 0; bin < bins; ++bin) {
    for (int k = 0; k < frames; ++k) {
      if (net.config().variant == Variant::Complex) {
        grid.at(bin, k) = {pred.at4(0, 0, bin, k), pred.at4(0, 1, bin, k)};
      } else {
        grid.at(bin, k) = {std::max(0.0, pred.at4(0, 0, bin, k)), 0.0};
      }
    }
  }
  return grid;
}

AudioBuffer inpaint(Network& net, const Segment& seg, const STFTParams& params,
                    const RetrievalConfig& retrieval) {
  const FrameLayout layout = compute_frame_layout(seg.spec, params);
  ContextSpectra ctx = context_stfts(seg, params);
  TFMatrix gap_grid = predict_gap_grid(net, seg, params);

  if (net.config().variant == Variant::Complex) {
    TFMatrix full = assemble_full(ctx.before, gap_grid, ctx.after, layout);
    return istft_span(full, 0, seg.spec.total_len);
  }

  // Magnitude variant: assemble known context magnitudes around the
  // predicted gap magnitudes, retrieve phase, synthesize.
  TFMatrix known = assemble_full(ctx.before,
                                 TFMatrix::zeros(params, layout.gap_region_frames),
                                 ctx.after, layout);
  MagnitudeGrid mags = MagnitudeGrid::from_tf(known);
  for (int bin = 0; bin < mags.n_bins; ++bin)
    for (int k = 0; k < layout.gap_region_frames; ++k)
      mags.at(bin, layout.gap_region_first + k) = std::abs(gap_grid.at(bin, k));

  FrameClamp clamp;
  clamp.known.assign(static_cast<size_t>(layout.total_frames), 1);
  for (int k = 0; k < layout.gap_region_frames; ++k)
    clamp.known[static_cast<size_t>(layout.gap_region_first + k)] = 0;
  clamp.values = known;

  TFMatrix coeffs = reconstruct_from_magnitude(
      mags, retrieval, retrieval.clamp_context ? &clamp : nullptr);
  return istft_span(coeffs, 0, seg.spec.total_len);
}

}  // namespace gapfill::nn
