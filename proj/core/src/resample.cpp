// Copyright (C) 2026 the gapfill authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "gapfill/resample.hpp"

#include <cmath>
#include <cstdint>
#include <numeric>

#include "gapfill/common.hpp"

namespace gapfill {
namespace {

// Zero crossings of the sinc kernel on each side of the center.
constexpr int kSincZeros = 32;
// Keep the transition band below the destination Nyquist.
constexpr double kRolloff = 0.945;

double blackman(double x) {  // x in [-1, 1]
  return 0.42 + 0.5 * std::cos(kPi * x) + 0.08 * std::cos(kTwoPi * x);
}

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  double px = kPi * x;
  return std::sin(px) / px;
}

}  // namespace

AudioBuffer resample(const AudioBuffer& in, int target_rate) {
  require(in.sample_rate > 0 && target_rate > 0, "rates must be positive");
  if (in.sample_rate == target_rate || in.samples.empty()) {
    AudioBuffer out = in;
    out.sample_rate = target_rate;
    return out;
  }

  const int64_t g = std::gcd(in.sample_rate, target_rate);
  const int64_t up = target_rate / g;    // p: output ticks per block
  const int64_t down = in.sample_rate / g;  // q: input ticks per block

  const double ratio = static_cast<double>(target_rate) / in.sample_rate;
  const double cutoff = 0.5 * kRolloff * std::min(1.0, ratio);  // cycles/in-sample
  const double half_width = kSincZeros / (2.0 * cutoff);

  const int64_t n_in = in.size();
  const int64_t n_out = (n_in * up) / down;  // t = n*down/up stays inside input
  AudioBuffer out;
  out.sample_rate = target_rate;
  out.samples.resize(static_cast<size_t>(n_out));

  for (int64_t n = 0; n < n_out; ++n) {
    // Exact rational input time of this output sample.
    const int64_t num = n * down;
    const int64_t base = num / up;
    const double frac = static_cast<double>(num % up) / static_cast<double>(up);
    const double t = static_cast<double>(base) + frac;

    const int64_t lo = std::max<int64_t>(0, static_cast<int64_t>(std::ceil(t - half_width)));
    const int64_t hi = std::min<int64_t>(n_in - 1, static_cast<int64_t>(std::floor(t + half_width)));
    double acc = 0.0, wsum = 0.0;
    for (int64_t m = lo; m <= hi; ++m) {
      const double u = static_cast<double>(m) - t;
      const double h = 2.0 * cutoff * sinc(2.0 * cutoff * u) * blackman(u / half_width);
      acc += in.samples[static_cast<size_t>(m)] * h;
      wsum += h;
    }
    // Normalizing by the realized kernel sum removes truncation ripple and
    // keeps unity gain near the edges.
    out.samples[static_cast<size_t>(n)] = wsum != 0.0 ? acc / wsum : 0.0;
  }
  return out;
}

}  // namespace gapfill
