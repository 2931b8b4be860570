// Copyright (C) 2026 the gapfill authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "gapfill/audio_buffer.hpp"

#include <algorithm>
#include <cmath>

#include "gapfill/common.hpp"

namespace gapfill {

void validate(const AudioBuffer& buffer) {
  require(buffer.sample_rate > 0, "sample_rate must be positive");
  for (double v : buffer.samples)
    require(std::isfinite(v), "samples must be finite");
}

double rms(std::span<const double> samples) {
  require(!samples.empty(), "rms of an empty buffer is undefined");
  double acc = 0.0;
  for (double v : samples) acc += v * v;
  return std::sqrt(acc / static_cast<double>(samples.size()));
}

double rms(const AudioBuffer& buffer) { return rms(std::span(buffer.samples)); }

AudioBuffer reversed(const AudioBuffer& buffer) {
  AudioBuffer out = buffer;
  std::reverse(out.samples.begin(), out.samples.end());
  return out;
}

AudioBuffer slice(const AudioBuffer& buffer, int start, int len) {
  require(start >= 0 && len >= 0 && start + len <= buffer.size(),
          "slice out of range");
  return AudioBuffer(
      std::vector<double>(buffer.samples.begin() + start,
                          buffer.samples.begin() + start + len),
      buffer.sample_rate);
}

}  // namespace gapfill
