// tone.hpp  Pure-tone synthesis and the probe-tone parameter grid.
//
// Copyright (C) 2026 the gapfill authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <vector>

#include "gapfill/audio_buffer.hpp"

namespace gapfill {

// samples[n] = amplitude * sin(2*pi*freq*n/fs + phase).
// Frequencies at or above Nyquist are rejected.
AudioBuffer generate_pure_tone(double freq_hz, double phase, double amplitude,
                               int duration_samples, int sample_rate);

struct ToneParams {
  double freq_hz;
  double phase;
  double amplitude;
};

// Cartesian grid (freq-major) of probe tones: frequencies log-spaced on
// [20, 8000] Hz, phases linear on [0, pi], amplitudes linear on [0.1, 1].
std::vector<ToneParams> pure_tone_grid(int n_freq, int n_phase, int n_amp);

}  // namespace gapfill
