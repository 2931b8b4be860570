// frames.hpp  Frame-layout arithmetic, context preparation, gap reassembly.
//
// Copyright (C) 2026 the gapfill authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include "gapfill/segment.hpp"
#include "gapfill/stft.hpp"

namespace gapfill {

// Every count below follows from one convention: frame k covers samples
// [k*hop, k*hop + M) and only fully supported frames are kept. With the
// default geometry (M=512, a=128, L_c=2048, L_g=1024) this yields 16 padded
// context frames per side, 3 of which are discarded, 11 frames overlapping
// the gap, 5 frames fully inside it, and 37 frames total.
struct FrameLayout {
  int window_len = 0;
  int hop = 0;
  SegmentSpec spec;

  int context_frames = 0;  // frames of one zero-padded context (length L_c+3a)
  int discarded_per_side = 0;  // context frames whose support touches padding
  int kept_per_side = 0;       // context_frames - discarded_per_side
  int gap_region_frames = 0;   // global frames whose support meets the gap
  int interior_gap_frames = 0;  // global frames fully inside the gap
  int total_frames = 0;         // frames fully supported in [0, L)

  int gap_region_first = 0;  // global index of the first gap-region frame
  int gap_region_last = 0;
  int interior_first = 0;
  int interior_last = 0;

  // Sample span touched by the gap-region frames.
  int crossfade_begin() const { return gap_region_first * hop; }
  int crossfade_end() const { return gap_region_last * hop + window_len; }
};

FrameLayout compute_frame_layout(const SegmentSpec& spec,
                                 const STFTParams& params);

// STFTs of the two context sides, each zero-extended by 3a toward the gap.
// `before` has frame_origin 0 in before-local coordinates; `after` has
// frame_origin -3a in after-local coordinates.
struct ContextSpectra {
  TFMatrix before;
  TFMatrix after;
};

ContextSpectra context_stfts(const Segment& seg, const STFTParams& params);

// Four real channel grids: Re(S_b), Im(S_b), Re(S_a), Im(S_a).
struct ContextTensor {
  int n_bins = 0;
  int n_frames = 0;
  std::vector<double> data;  // [channel][bin][frame], row-major

  double& at(int ch, int bin, int frame) {
    return data[(static_cast<size_t>(ch) * n_bins + bin) * n_frames + frame];
  }
  double at(int ch, int bin, int frame) const {
    return data[(static_cast<size_t>(ch) * n_bins + bin) * n_frames + frame];
  }
};

ContextTensor to_context_tensor(const ContextSpectra& spectra);
ContextTensor prepare_context(const Segment& seg, const STFTParams& params);

// Kept context frames || predicted gap frames || kept context frames.
// The discarded border frames carry zero-padding artifacts and are dropped.
TFMatrix assemble_full(const TFMatrix& context_before, const TFMatrix& gap_pred,
                       const TFMatrix& context_after, const FrameLayout& layout);

// The frames whose window support lies entirely inside the gap samples.
TFMatrix gap_frames(const TFMatrix& full, const FrameLayout& layout);

// Frames of the uncorrupted segment's STFT that overlap the gap; this is the
// training target grid.
TFMatrix gap_region_frames(const TFMatrix& full, const FrameLayout& layout);

}  // namespace gapfill
