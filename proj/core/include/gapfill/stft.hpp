// stft.hpp  Redundant STFT analysis/synthesis with a painless Hann pair.
//
// Copyright (C) 2026 the gapfill authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <complex>
#include <iosfwd>
#include <utility>
#include <vector>

#include "gapfill/audio_buffer.hpp"

namespace gapfill {

// Analysis window and its canonical dual for overlap-add synthesis.
// The analysis window is the Hann bump sampled at half-integer offsets,
// sin^2(pi*(n+1/2)/M): symmetric, strictly positive, and exactly
// constant-overlap-add at hop M/4. The dual is computed numerically from
// the diagonal frame operator, so sum_k analysis[n-ka]*synthesis[n-ka] = 1
// at every steady-state index regardless of normalization choices.
std::pair<std::vector<double>, std::vector<double>> make_hann_pr(int window_len,
                                                                 int hop);

struct STFTParams {
  int window_len = 0;  // M
  int hop = 0;         // a = M/4
  int sample_rate = 0;
  std::vector<double> analysis;
  std::vector<double> synthesis;

  static STFTParams make(int window_len, int hop, int sample_rate);

  int n_bins() const { return window_len / 2 + 1; }
};

// Defaults used by the whole pipeline: M = 512, a = 128 at 16 kHz.
STFTParams default_stft_params();

// Complex coefficient grid, bin-major storage (one row per bin).
// frame k covers samples [frame_origin + k*hop, frame_origin + k*hop + M).
struct TFMatrix {
  int n_bins = 0;
  int n_frames = 0;
  int frame_origin = 0;
  std::vector<std::complex<double>> coeffs;  // coeffs[bin * n_frames + frame]
  STFTParams params;

  static TFMatrix zeros(const STFTParams& params, int n_frames,
                        int frame_origin = 0);

  std::complex<double>& at(int bin, int frame) {
    return coeffs[static_cast<size_t>(bin) * n_frames + frame];
  }
  std::complex<double> at(int bin, int frame) const {
    return coeffs[static_cast<size_t>(bin) * n_frames + frame];
  }
};

// Windowed half-spectrum DFT of each frame. Samples outside the buffer read
// as zero, which is how context zero-extension is realized.
TFMatrix stft(const AudioBuffer& buffer, const STFTParams& params, int n_frames,
              int frame_origin = 0);

// Overlap-add synthesis with the dual window. Output covers
// [frame_origin, frame_origin + (n_frames-1)*hop + M); samples that are not
// in steady state are renormalized by the partial window-overlap sum, which
// makes istft an exact left inverse of stft on every covered sample.
AudioBuffer istft(const TFMatrix& tf);

// Samples [abs_start, abs_start+len) of the synthesis, in the coordinate
// system frame_origin refers to.
AudioBuffer istft_span(const TFMatrix& tf, int abs_start, int len);

// Energy of the coefficients with conjugate-symmetry weights (interior bins
// count twice). Proportional to signal energy in steady state.
double coeff_energy(const TFMatrix& tf);

// 16-byte header (magic "TFMX", n_bins, n_frames, flags), then little-endian
// float64 (re, im) pairs, bin-major.
void write_tf(std::ostream& out, const TFMatrix& tf);
TFMatrix read_tf(std::istream& in, const STFTParams& params,
                 int frame_origin = 0);
void write_tf_file(const std::string& path, const TFMatrix& tf);
TFMatrix read_tf_file(const std::string& path, const STFTParams& params,
                      int frame_origin = 0);

}  // namespace gapfill
