// audio_buffer.hpp  Time-domain signal type and basic statistics.
//
// Copyright (C) 2026 the gapfill authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gapfill {

// Mono signal. Samples are dimensionless amplitudes with a nominal range of
// [-1, 1]; they are never clipped, reconstructions may overshoot.
struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate = 0;

  AudioBuffer() = default;
  AudioBuffer(std::vector<double> s, int rate)
      : samples(std::move(s)), sample_rate(rate) {}

  int size() const { return static_cast<int>(samples.size()); }
  double& operator[](int i) { return samples[static_cast<size_t>(i)]; }
  double operator[](int i) const { return samples[static_cast<size_t>(i)]; }
};

// Rejects non-positive rates and non-finite samples.
void validate(const AudioBuffer& buffer);

// sqrt(mean(x^2)). Empty buffers are rejected.
double rms(const AudioBuffer& buffer);
double rms(std::span<const double> samples);

AudioBuffer reversed(const AudioBuffer& buffer);

AudioBuffer slice(const AudioBuffer& buffer, int start, int len);

}  // namespace gapfill
