// Copyright (C) 2026 the gapfill authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "gapfill/frames.hpp"

#include "gapfill/common.hpp"

namespace gapfill {

FrameLayout compute_frame_layout(const SegmentSpec& spec,
                                 const STFTParams& params) {
  validate(spec);
  const int m = params.window_len;
  const int a = params.hop;
  require(m > 0 && a > 0, "invalid stft params");
  require(spec.context_len % a == 0, "context_len must be divisible by hop");
  require(spec.gap_len % a == 0, "gap_len must be divisible by hop");
  require(spec.context_len + 3 * a >= m, "context too short for one frame");

  FrameLayout lay;
  lay.window_len = m;
  lay.hop = a;
  lay.spec = spec;

  const int padded = spec.context_len + 3 * a;
  lay.context_frames = (padded - m) / a + 1;

  lay.discarded_per_side = 0;
  for (int k = 0; k < lay.context_frames; ++k)
    if (k * a + m > spec.context_len) ++lay.discarded_per_side;
  lay.kept_per_side = lay.context_frames - lay.discarded_per_side;

  lay.total_frames = (spec.total_len - m) / a + 1;

  const int gap_begin = spec.gap_start();
  const int gap_end = spec.gap_end();
  lay.gap_region_first = -1;
  lay.gap_region_last = -1;
  lay.interior_first = -1;
  lay.interior_last = -1;
  for (int k = 0; k < lay.total_frames; ++k) {
    const int lo = k * a, hi = k * a + m;
    if (lo < gap_end && hi > gap_begin) {
      if (lay.gap_region_first < 0) lay.gap_region_first = k;
      lay.gap_region_last = k;
    }
    if (lo >= gap_begin && hi <= gap_end) {
      if (lay.interior_first < 0) lay.interior_first = k;
      lay.interior_last = k;
    }
  }
  require(lay.gap_region_first >= 0 && lay.interior_first >= 0,
          "gap shorter than one frame");
  lay.gap_region_frames = lay.gap_region_last - lay.gap_region_first + 1;
  lay.interior_gap_frames = lay.interior_last - lay.interior_first + 1;

  // The reassembled grid must tile exactly.
  require(2 * lay.kept_per_side + lay.gap_region_frames == lay.total_frames,
          "frame layout does not tile the segment");
  return lay;
}

ContextSpectra context_stfts(const Segment& seg, const STFTParams& params) {
  FrameLayout lay = compute_frame_layout(seg.spec, params);
  ContextSpectra out;
  // Zero extension past the buffer ends is the stft's out-of-range contract.
  out.before = stft(seg.before, params, lay.context_frames, 0);
  out.after = stft(seg.after, params, lay.context_frames, -3 * params.hop);
  return out;
}

ContextTensor to_context_tensor(const ContextSpectra& spectra) {
  require(spectra.before.n_bins == spectra.after.n_bins &&
              spectra.before.n_frames == spectra.after.n_frames,
          "context sides disagree in shape");
  ContextTensor t;
  t.n_bins = spectra.before.n_bins;
  t.n_frames = spectra.before.n_frames;
  t.data.assign(4ull * t.n_bins * t.n_frames, 0.0);
  for (int bin = 0; bin < t.n_bins; ++bin) {
    for (int k = 0; k < t.n_frames; ++k) {
      t.at(0, bin, k) = spectra.before.at(bin, k).real();
      t.at(1, bin, k) = spectra.before.at(bin, k).imag();
      t.at(2, bin, k) = spectra.after.at(bin, k).real();
      t.at(3, bin, k) = spectra.after.at(bin, k).imag();
    }
  }
  return t;
}

ContextTensor prepare_context(const Segment& seg, const STFTParams& params) {
  return to_context_tensor(context_stfts(seg, params));
}

TFMatrix assemble_full(const TFMatrix& context_before, const TFMatrix& gap_pred,
                       const TFMatrix& context_after, const FrameLayout& layout) {
  require(context_before.n_frames == layout.context_frames &&
              context_after.n_frames == layout.context_frames,
          "context frame count mismatch");
  require(gap_pred.n_frames == layout.gap_region_frames,
          "gap frame count mismatch");
  require(context_before.n_bins == gap_pred.n_bins &&
              context_after.n_bins == gap_pred.n_bins,
          "bin count mismatch");

  TFMatrix full = TFMatrix::zeros(context_before.params, layout.total_frames, 0);
  const int kept = layout.kept_per_side;
  const int skip = layout.discarded_per_side;
  for (int bin = 0; bin < full.n_bins; ++bin) {
    for (int k = 0; k < kept; ++k)
      full.at(bin, k) = context_before.at(bin, k);
    for (int k = 0; k < layout.gap_region_frames; ++k)
      full.at(bin, kept + k) = gap_pred.at(bin, k);
    for (int k = 0; k < kept; ++k)
      full.at(bin, kept + layout.gap_region_frames + k) =
          context_after.at(bin, skip + k);
  }
  return full;
}

namespace {

TFMatrix extract_frames(const TFMatrix& full, int first, int count) {
  TFMatrix out = TFMatrix::zeros(full.params, count,
                                 full.frame_origin + first * full.params.hop);
  for (int bin = 0; bin < full.n_bins; ++bin)
    for (int k = 0; k < count; ++k) out.at(bin, k) = full.at(bin, first + k);
  return out;
}

}  // namespace

TFMatrix gap_frames(const TFMatrix& full, const FrameLayout& layout) {
  require(full.n_frames == layout.total_frames,
          "expected the full segment frame grid");
  return extract_frames(full, layout.interior_first, layout.interior_gap_frames);
}

TFMatrix gap_region_frames(const TFMatrix& full, const FrameLayout& layout) {
  require(full.n_frames == layout.total_frames,
          "expected the full segment frame grid");
  return extract_frames(full, layout.gap_region_first, layout.gap_region_frames);
}

}  // namespace gapfill
