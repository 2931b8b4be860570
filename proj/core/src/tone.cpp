// Copyright (C) 2026 the gapfill authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "gapfill/tone.hpp"

#include <cmath>

#include "gapfill/common.hpp"

namespace gapfill {

AudioBuffer generate_pure_tone(double freq_hz, double phase, double amplitude,
                               int duration_samples, int sample_rate) {
  require(sample_rate > 0, "sample_rate must be positive");
  require(duration_samples >= 0, "duration must be nonnegative");
  require(freq_hz > 0.0 && freq_hz < 0.5 * sample_rate,
          "tone frequency must lie strictly below Nyquist");
  AudioBuffer out;
  out.sample_rate = sample_rate;
  out.samples.resize(static_cast<size_t>(duration_samples));
  const double step = kTwoPi * freq_hz / sample_rate;
  for (int n = 0; n < duration_samples; ++n)
    out.samples[static_cast<size_t>(n)] = amplitude * std::sin(step * n + phase);
  return out;
}

std::vector<ToneParams> pure_tone_grid(int n_freq, int n_phase, int n_amp) {
  require(n_freq >= 2 && n_phase >= 2 && n_amp >= 2, "grid counts must be >= 2");
  const double f_lo = 20.0, f_hi = 8000.0;
  const double log_lo = std::log(f_lo), log_hi = std::log(f_hi);
  std::vector<double> freqs(static_cast<size_t>(n_freq));
  for (int i = 0; i < n_freq; ++i)
    freqs[static_cast<size_t>(i)] =
        std::exp(log_lo + (log_hi - log_lo) * i / (n_freq - 1));
  std::vector<double> phases(static_cast<size_t>(n_phase));
  for (int i = 0; i < n_phase; ++i)
    phases[static_cast<size_t>(i)] = kPi * i / (n_phase - 1);
  std::vector<double> amps(static_cast<size_t>(n_amp));
  for (int i = 0; i < n_amp; ++i)
    amps[static_cast<size_t>(i)] = 0.1 + (1.0 - 0.1) * i / (n_amp - 1);

  std::vector<ToneParams> grid;
  grid.reserve(static_cast<size_t>(n_freq) * n_phase * n_amp);
  for (double f : freqs)
    for (double p : phases)
      for (double a : amps) grid.push_back({f, p, a});
  return grid;
}

}  // namespace gapfill
