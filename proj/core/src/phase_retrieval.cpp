// Copyright (C) 2026 the gapfill authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "gapfill/phase_retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "gapfill/common.hpp"
#include "gapfill/rng.hpp"

namespace gapfill {

MagnitudeGrid MagnitudeGrid::zeros(const STFTParams& params, int n_frames,
                                   int frame_origin) {
  MagnitudeGrid g;
  g.n_bins = params.n_bins();
  g.n_frames = n_frames;
  g.frame_origin = frame_origin;
  g.params = params;
  g.mags.assign(static_cast<size_t>(g.n_bins) * n_frames, 0.0);
  return g;
}

MagnitudeGrid MagnitudeGrid::from_tf(const TFMatrix& tf) {
  MagnitudeGrid g = zeros(tf.params, tf.n_frames, tf.frame_origin);
  for (size_t i = 0; i < tf.coeffs.size(); ++i) g.mags[i] = std::abs(tf.coeffs[i]);
  return g;
}

void RetrievalConfig::validate() const {
  require(fgl_iterations >= 0, "fgl_iterations must be >= 0");
  require(fgl_momentum >= 0.0 && fgl_momentum < 1.0,
          "fgl_momentum must lie in [0, 1)");
  require(pghi_rel_tolerance > 0.0 && pghi_rel_tolerance < 1.0,
          "pghi_rel_tolerance must lie in (0, 1)");
  require(pghi_gamma_scale > 0.0, "pghi_gamma_scale must be positive");
}

std::vector<double> pghi(const MagnitudeGrid& mag, const RetrievalConfig& config) {
  config.validate();
  const int n_bins = mag.n_bins;
  const int n_frames = mag.n_frames;
  const size_t total = static_cast<size_t>(n_bins) * n_frames;
  std::vector<double> phase(total, 0.0);

  const double peak = *std::max_element(mag.mags.begin(), mag.mags.end());
  if (peak <= 0.0) return phase;

  const int m = mag.params.window_len;
  const int a = mag.params.hop;
  const double gamma = config.pghi_gamma_scale * m * m;

  auto idx = [n_frames](int bin, int k) {
    return static_cast<size_t>(bin) * n_frames + k;
  };

  // Log-magnitude, floored to keep the differences finite.
  std::vector<double> slog(total);
  for (size_t i = 0; i < total; ++i) slog[i] = std::log(mag.mags[i] + 1e-300);

  auto dlog_bin = [&](int bin, int k) {  // centered d(slog)/d(bin)
    const int lo = std::max(bin - 1, 0), hi = std::min(bin + 1, n_bins - 1);
    return hi == lo ? 0.0 : (slog[idx(hi, k)] - slog[idx(lo, k)]) / (hi - lo);
  };
  auto dlog_frame = [&](int bin, int k) {  // centered d(slog)/d(frame)
    const int lo = std::max(k - 1, 0), hi = std::min(k + 1, n_frames - 1);
    return hi == lo ? 0.0 : (slog[idx(bin, hi)] - slog[idx(bin, lo)]) / (hi - lo);
  };

  // Phase advance per frame step and per bin step under the Gaussian model,
  // in this project's frame-start phase convention: a steady component at
  // bin m advances by 2*pi*a*m/M per frame, and a component centered at
  // position p within the frame contributes a slope of -2*pi*p/M per bin.
  const double t_scale = static_cast<double>(a) * m / gamma;
  const double f_scale = gamma / (static_cast<double>(a) * m);
  const double center = 0.5 * (m - 1);
  std::vector<double> tgrad(total), fgrad(total);
  for (int bin = 0; bin < n_bins; ++bin) {
    const double het = kTwoPi * a * bin / m;
    for (int k = 0; k < n_frames; ++k) {
      tgrad[idx(bin, k)] = het + t_scale * dlog_bin(bin, k);
      fgrad[idx(bin, k)] = -kTwoPi * center / m - f_scale * dlog_frame(bin, k);
    }
  }

  const double abstol = config.pghi_rel_tolerance * peak;
  std::vector<uint8_t> active(total), assigned(total, 0);
  for (size_t i = 0; i < total; ++i) active[i] = mag.mags[i] > abstol ? 1 : 0;

  // Points sorted by decreasing magnitude serve as integration seeds; ties
  // break on the index so the traversal is reproducible.
  std::vector<size_t> order(total);
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(), [&](size_t x, size_t y) {
    if (mag.mags[x] != mag.mags[y]) return mag.mags[x] > mag.mags[y];
    return x < y;
  });

  struct HeapItem {
    double value;
    int bin, frame;
  };
  auto cmp = [](const HeapItem& x, const HeapItem& y) {
    if (x.value != y.value) return x.value < y.value;
    if (x.bin != y.bin) return x.bin > y.bin;
    return x.frame > y.frame;
  };
  std::priority_queue<HeapItem, std::vector<HeapItem>, decltype(cmp)> heap(cmp);

  size_t seed_scan = 0;
  size_t remaining = 0;
  for (size_t i = 0; i < total; ++i) remaining += active[i];

  while (remaining > 0) {
    if (heap.empty()) {
      while (seed_scan < total &&
             (!active[order[seed_scan]] || assigned[order[seed_scan]]))
        ++seed_scan;
      if (seed_scan == total) break;
      const size_t s = order[seed_scan];
      phase[s] = 0.0;
      assigned[s] = 1;
      --remaining;
      heap.push({mag.mags[s], static_cast<int>(s / n_frames),
                 static_cast<int>(s % n_frames)});
    }
    const HeapItem top = heap.top();
    heap.pop();
    const int bin = top.bin, k = top.frame;
    const size_t here = idx(bin, k);

    auto visit = [&](int nb, int nk, double delta) {
      const size_t ni = idx(nb, nk);
      if (!active[ni] || assigned[ni]) return;
      phase[ni] = phase[here] + delta;
      assigned[ni] = 1;
      --remaining;
      heap.push({mag.mags[ni], nb, nk});
    };
    if (k + 1 < n_frames)
      visit(bin, k + 1, 0.5 * (tgrad[here] + tgrad[idx(bin, k + 1)]));
    if (k - 1 >= 0)
      visit(bin, k - 1, -0.5 * (tgrad[here] + tgrad[idx(bin, k - 1)]));
    if (bin + 1 < n_bins)
      visit(bin + 1, k, 0.5 * (fgrad[here] + fgrad[idx(bin + 1, k)]));
    if (bin - 1 >= 0)
      visit(bin - 1, k, -0.5 * (fgrad[here] + fgrad[idx(bin - 1, k)]));
  }

  Rng rng(config.random_phase_seed);
  for (size_t i = 0; i < total; ++i)
    if (!active[i]) phase[i] = rng.uniform(0.0, kTwoPi);
  return phase;
}

TFMatrix project_magnitude(const TFMatrix& c, const MagnitudeGrid& mag,
                           const FrameClamp* clamp) {
  require(c.n_bins == mag.n_bins && c.n_frames == mag.n_frames,
          "grid shape mismatch");
  TFMatrix out = c;
  for (int bin = 0; bin < c.n_bins; ++bin) {
    for (int k = 0; k < c.n_frames; ++k) {
      if (clamp && clamp->known[static_cast<size_t>(k)]) {
        out.at(bin, k) = clamp->values.at(bin, k);
        continue;
      }
      const std::complex<double> v = c.at(bin, k);
      const double r = std::abs(v);
      out.at(bin, k) = r > 0.0 ? v * (mag.at(bin, k) / r)
                               : std::complex<double>(mag.at(bin, k), 0.0);
    }
  }
  return out;
}

TFMatrix project_consistent(const TFMatrix& c) {
  AudioBuffer x = istft(c);
  // istft output starts at frame_origin; analyzing it from sample 0 of that
  // buffer reproduces the same frame grid.
  TFMatrix out = stft(x, c.params, c.n_frames, 0);
  out.frame_origin = c.frame_origin;
  return out;
}

TFMatrix fast_griffin_lim(const MagnitudeGrid& mag,
                          const std::vector<double>& init_phase,
                          const RetrievalConfig& config, const FrameClamp* clamp) {
  config.validate();
  require(init_phase.size() == mag.mags.size(), "phase grid shape mismatch");
  if (clamp)
    require(static_cast<int>(clamp->known.size()) == mag.n_frames,
            "clamp mask length mismatch");

  TFMatrix t = TFMatrix::zeros(mag.params, mag.n_frames, mag.frame_origin);
  for (size_t i = 0; i < mag.mags.size(); ++i)
    t.coeffs[i] = std::polar(mag.mags[i], init_phase[i]);
  if (clamp) t = project_magnitude(t, mag, clamp);

  if (config.fgl_iterations == 0) return project_magnitude(t, mag, clamp);

  TFMatrix c_prev;
  bool have_prev = false;
  const double alpha = config.fgl_momentum;
  for (int it = 0; it < config.fgl_iterations; ++it) {
    TFMatrix c = project_consistent(project_magnitude(t, mag, clamp));
    if (have_prev) {
      t = c;
      for (size_t i = 0; i < t.coeffs.size(); ++i)
        t.coeffs[i] += alpha * (c.coeffs[i] - c_prev.coeffs[i]);
    } else {
      t = c;
      have_prev = true;
    }
    c_prev = std::move(c);
  }
  return project_magnitude(c_prev, mag, clamp);
}

TFMatrix reconstruct_from_magnitude(const MagnitudeGrid& mag,
                                    const RetrievalConfig& config,
                                    const FrameClamp* clamp) {
  return fast_griffin_lim(mag, pghi(mag, config), config, clamp);
}

double spectral_convergence(const TFMatrix& c, const MagnitudeGrid& mag) {
  require(c.n_bins == mag.n_bins && c.n_frames == mag.n_frames,
          "grid shape mismatch");
  TFMatrix proj = project_consistent(c);
  const int nyquist = mag.params.window_len / 2;
  double num = 0.0, den = 0.0;
  for (int bin = 0; bin < mag.n_bins; ++bin) {
    const double w = (bin == 0 || bin == nyquist) ? 1.0 : 2.0;
    for (int k = 0; k < mag.n_frames; ++k) {
      const double d = std::abs(proj.at(bin, k)) - mag.at(bin, k);
      num += w * d * d;
      den += w * mag.at(bin, k) * mag.at(bin, k);
    }
  }
  return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

}  // namespace gapfill
