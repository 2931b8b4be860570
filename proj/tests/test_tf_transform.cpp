// Copyright (C) 2026 the gapfill authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <doctest.h>

#include <cmath>
#include <complex>
#include <sstream>

#include "gapfill/frames.hpp"
#include "gapfill/rng.hpp"
#include "gapfill/stft.hpp"
#include "gapfill/tone.hpp"

using namespace gapfill;

namespace {

AudioBuffer white_noise(int n, uint64_t seed, int rate = 16000) {
  Rng rng(seed);
  AudioBuffer b;
  b.sample_rate = rate;
  b.samples.resize(static_cast<size_t>(n));
  for (auto& v : b.samples) v = rng.uniform(-1.0, 1.0);
  return b;
}

// Frame layout that fully covers [0, n) so every sample is in steady state.
TFMatrix covering_stft(const AudioBuffer& x, const STFTParams& p) {
  const int n_frames = x.size() / p.hop + 3;
  return stft(x, p, n_frames, -3 * p.hop);
}

double max_abs_err(const AudioBuffer& a, const AudioBuffer& b) {
  REQUIRE(a.size() == b.size());
  double m = 0.0;
  for (int i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Direct windowed-DFT evaluation, the oracle the fft path must match.
std::complex<double> naive_coeff(const AudioBuffer& x, const STFTParams& p,
                                 int bin, int frame, int frame_origin) {
  std::complex<double> acc{0.0, 0.0};
  for (int n = 0; n < p.window_len; ++n) {
    const int t = frame_origin + frame * p.hop + n;
    const double v = (t >= 0 && t < x.size()) ? x[t] : 0.0;
    const double ang = -2.0 * std::numbers::pi * bin * n / p.window_len;
    acc += v * p.analysis[static_cast<size_t>(n)] *
           std::complex<double>(std::cos(ang), std::sin(ang));
  }
  return acc;
}

}  // namespace

TEST_CASE("make_hann_pr satisfies the dual-window identity") {
  SUBCASE("M=512, a=128 in steady state") {
    auto [g, gd] = make_hann_pr(512, 128);
    // Any steady-state index n is covered by shifts k with 0 <= n-128k < 512.
    for (int n = 512; n < 1024; ++n) {
      double acc = 0.0;
      for (int k = 0; k <= n / 128; ++k) {
        const int idx = n - 128 * k;
        if (idx >= 0 && idx < 512) acc += g[static_cast<size_t>(idx)] * gd[static_cast<size_t>(idx)];
      }
      CHECK(std::abs(acc - 1.0) < 1e-12);
    }
  }
  SUBCASE("M=8, a=2 brute-force overlap-add") {
    auto [g, gd] = make_hann_pr(8, 2);
    for (int n = 8; n < 16; ++n) {
      double acc = 0.0;
      for (int k = 0; k < 20; ++k) {
        const int idx = n - 2 * k;
        if (idx >= 0 && idx < 8) acc += g[static_cast<size_t>(idx)] * gd[static_cast<size_t>(idx)];
      }
      CHECK(std::abs(acc - 1.0) < 1e-12);
    }
  }
  SUBCASE("window is symmetric, positive, finite") {
    auto [g, gd] = make_hann_pr(512, 128);
    for (int n = 0; n < 512; ++n) {
      CHECK(g[static_cast<size_t>(n)] > 0.0);
      CHECK(g[static_cast<size_t>(n)] == doctest::Approx(g[static_cast<size_t>(511 - n)]).epsilon(1e-14));
      CHECK(std::isfinite(gd[static_cast<size_t>(n)]));
    }
  }
  SUBCASE("hop must divide the window") {
    CHECK_THROWS_AS(make_hann_pr(512, 96), std::invalid_argument);
    CHECK_THROWS_AS(make_hann_pr(512, 256), std::invalid_argument);
  }
}

TEST_CASE("stft/istft round trip") {
  auto p = default_stft_params();
  SUBCASE("white noise, fully covered layout, < 1e-10") {
    auto x = white_noise(5120, 11);
    auto tf = covering_stft(x, p);
    auto y = istft_span(tf, 0, 5120);
    CHECK(max_abs_err(x, y) < 1e-10);
  }
  SUBCASE("segment-native 37-frame layout is exact on every covered sample") {
    auto x = white_noise(5120, 12);
    auto tf = stft(x, p, 37, 0);
    auto y = istft(tf);
    REQUIRE(y.size() == 5120);
    CHECK(max_abs_err(x, y) < 1e-8);
  }
  SUBCASE("zero signal maps to zero coefficients and back") {
    AudioBuffer zero(std::vector<double>(5120, 0.0), 16000);
    auto tf = stft(zero, p, 37, 0);
    for (const auto& c : tf.coeffs) CHECK(std::abs(c) == 0.0);
    auto y = istft(tf);
    for (int i = 0; i < y.size(); ++i) CHECK(y[i] == 0.0);
  }
  SUBCASE("istft is linear") {
    auto a = covering_stft(white_noise(2048, 21), p);
    auto b = covering_stft(white_noise(2048, 22), p);
    TFMatrix sum = a;
    for (size_t i = 0; i < sum.coeffs.size(); ++i) sum.coeffs[i] += b.coeffs[i];
    auto ya = istft(a), yb = istft(b), ys = istft(sum);
    // The outermost samples are renormalized by near-zero window overlap,
    // which amplifies fft rounding; steady-state samples are strict.
    const int skirt = p.window_len - p.hop;
    for (int i = 0; i < ys.size(); ++i) {
      const double err = std::abs(ys[i] - ya[i] - yb[i]);
      if (i >= skirt && i < ys.size() - skirt) {
        CHECK(err < 1e-12);
      } else {
        CHECK(err < 1e-9);
      }
    }
  }
}

TEST_CASE("stft matches the direct windowed DFT") {
  auto p = default_stft_params();
  auto x = white_noise(1024, 33);
  auto tf = stft(x, p, 5, -64);
  for (int bin : {0, 1, 17, 128, 256})
    for (int k : {0, 2, 4}) {
      auto expect = naive_coeff(x, p, bin, k, -64);
      CHECK(std::abs(tf.at(bin, k) - expect) < 1e-9);
    }
}

TEST_CASE("bin-centered tone concentrates energy") {
  auto p = default_stft_params();
  // bin 32 <-> 1 kHz at 16 kHz with M=512.
  const double freq = 32.0 * 16000.0 / 512.0;
  auto tone = generate_pure_tone(freq, 0.4, 1.0, 5120, 16000);
  auto tf = stft(tone, p, 37, 0);
  const int k = 18;
  double peak = std::abs(tf.at(32, k));
  for (int bin = 0; bin <= 256; ++bin) {
    if (std::abs(bin - 32) < 2) continue;
    CHECK(std::abs(tf.at(bin, k)) <= peak * std::pow(10.0, -30.0 / 20.0));
  }
}

TEST_CASE("frame layout counts emerge from the geometry") {
  auto p = default_stft_params();
  SUBCASE("default 64 ms geometry") {
    auto lay = compute_frame_layout(default_segment_spec(), p);
    CHECK(lay.context_frames == 16);
    CHECK(lay.discarded_per_side == 3);
    CHECK(lay.kept_per_side == 13);
    CHECK(lay.gap_region_frames == 11);
    CHECK(lay.interior_gap_frames == 5);
    CHECK(lay.total_frames == 37);
    CHECK(lay.gap_region_first == 13);
    CHECK(lay.gap_region_last == 23);
    CHECK(lay.interior_first == 16);
    CHECK(lay.interior_last == 20);
    CHECK(lay.crossfade_begin() == 1664);
    CHECK(lay.crossfade_end() == 3456);
  }
  SUBCASE("48 ms geometry") {
    auto lay = compute_frame_layout(short_gap_segment_spec(), p);
    CHECK(lay.total_frames == 37);
    CHECK(lay.interior_gap_frames == 3);
    CHECK(lay.interior_first == 17);
    CHECK(lay.interior_last == 19);
  }
}

TEST_CASE("prepare_context") {
  auto p = default_stft_params();
  auto spec = default_segment_spec();
  SUBCASE("shape is 4 x 257 x 16") {
    auto seg = split_segment(white_noise(5120, 41), spec);
    auto t = prepare_context(seg, p);
    CHECK(t.n_bins == 257);
    CHECK(t.n_frames == 16);
    CHECK(t.data.size() == 4u * 257u * 16u);
  }
  SUBCASE("silent segment gives an all-zero tensor") {
    AudioBuffer zero(std::vector<double>(5120, 0.0), 16000);
    auto t = prepare_context(split_segment(zero, spec), p);
    for (double v : t.data) CHECK(v == 0.0);
  }
  SUBCASE("only the last three before-frames read the zero padding") {
    // Frame k of the padded before-context touches the padding iff
    // k*a + M > L_c.
    auto lay = compute_frame_layout(spec, p);
    for (int k = 0; k < lay.context_frames; ++k) {
      const bool touches = k * p.hop + p.window_len > spec.context_len;
      CHECK(touches == (k >= 13));
    }
    // And those frames agree with the full-segment stft only up to k=12.
    auto x = white_noise(5120, 42);
    auto seg = split_segment(x, spec);
    auto ctx = context_stfts(seg, p);
    auto full = stft(x, p, 37, 0);
    for (int k = 0; k <= 12; ++k)
      for (int bin = 0; bin <= 256; bin += 16)
        CHECK(std::abs(ctx.before.at(bin, k) - full.at(bin, k)) < 1e-12);
    double diff = 0.0;
    for (int bin = 0; bin <= 256; ++bin)
      diff += std::abs(ctx.before.at(bin, 13) - full.at(bin, 13));
    CHECK(diff > 1e-6);  // padded frame sees zeros where the gap has content
  }
  SUBCASE("after-context frames align with the segment tail") {
    auto x = white_noise(5120, 43);
    auto seg = split_segment(x, spec);
    auto ctx = context_stfts(seg, p);
    auto full = stft(x, p, 37, 0);
    // After-side frame j corresponds to global frame 21 + j; fully inside
    // the after-context for j >= 3.
    for (int j = 3; j < 16; ++j)
      for (int bin = 0; bin <= 256; bin += 16)
        CHECK(std::abs(ctx.after.at(bin, j) - full.at(bin, 21 + j)) < 1e-12);
  }
}

TEST_CASE("assemble_full and gap_frames") {
  auto p = default_stft_params();
  auto spec = default_segment_spec();
  auto lay = compute_frame_layout(spec, p);
  auto x = white_noise(5120, 51);
  auto seg = split_segment(x, spec);
  auto ctx = context_stfts(seg, p);
  auto full_true = stft(x, p, 37, 0);

  SUBCASE("16/11/16 frames in, 37 out") {
    auto pred = TFMatrix::zeros(p, 11);
    auto full = assemble_full(ctx.before, pred, ctx.after, lay);
    CHECK(full.n_frames == 37);
    CHECK(full.n_bins == 257);
  }
  SUBCASE("shape mismatches are rejected") {
    auto bad = TFMatrix::zeros(p, 10);
    CHECK_THROWS_AS(assemble_full(ctx.before, bad, ctx.after, lay),
                    std::invalid_argument);
  }
  SUBCASE("true gap frames reproduce the original segment") {
    auto true_gap = gap_region_frames(full_true, lay);
    auto full = assemble_full(ctx.before, true_gap, ctx.after, lay);
    auto y = istft_span(full, 0, 5120);
    CHECK(max_abs_err(x, y) < 1e-8);
  }
  SUBCASE("context regions are untouched by gap-frame content") {
    auto junk = TFMatrix::zeros(p, 11, lay.gap_region_first * p.hop);
    Rng rng(99);
    for (auto& c : junk.coeffs) c = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    auto full = assemble_full(ctx.before, junk, ctx.after, lay);
    auto y = istft(full);
    for (int t = 0; t < lay.crossfade_begin(); ++t)
      CHECK(std::abs(y[t] - x[t]) < 1e-8);
    for (int t = lay.crossfade_end(); t < 5120; ++t)
      CHECK(std::abs(y[t] - x[t]) < 1e-8);
  }
  SUBCASE("modifying the gap grid only changes the crossfade span") {
    auto true_gap = gap_region_frames(full_true, lay);
    auto full_a = assemble_full(ctx.before, true_gap, ctx.after, lay);
    TFMatrix other = true_gap;
    for (auto& c : other.coeffs) c *= 0.3;
    auto full_b = assemble_full(ctx.before, other, ctx.after, lay);
    auto ya = istft(full_a), yb = istft(full_b);
    bool changed_inside = false;
    for (int t = 0; t < 5120; ++t) {
      const double d = std::abs(ya[t] - yb[t]);
      if (t < lay.crossfade_begin() || t >= lay.crossfade_end()) {
        CHECK(d < 1e-12);
      } else if (d > 1e-6) {
        changed_inside = true;
      }
    }
    CHECK(changed_inside);
  }
  SUBCASE("gap_frames picks exactly the interior frames") {
    auto inner = gap_frames(full_true, lay);
    CHECK(inner.n_frames == 5);
    for (int k = 0; k < 5; ++k)
      for (int bin = 0; bin <= 256; bin += 32)
        CHECK(inner.at(bin, k) == full_true.at(bin, 16 + k));
  }
  SUBCASE("interior gap frames depend only on the gap samples") {
    auto x2 = white_noise(5120, 52);
    // splice the same gap into different contexts
    for (int t = 2048; t < 3072; ++t) x2.samples[static_cast<size_t>(t)] = x[t];
    auto inner1 = gap_frames(full_true, lay);
    auto inner2 = gap_frames(stft(x2, p, 37, 0), lay);
    for (size_t i = 0; i < inner1.coeffs.size(); ++i)
      CHECK(std::abs(inner1.coeffs[i] - inner2.coeffs[i]) < 1e-12);
  }
}

TEST_CASE("parseval-style energy ratio is constant") {
  auto p = default_stft_params();
  double expected = 0.0;
  for (uint64_t seed : {61u, 62u, 63u, 64u}) {
    auto x = white_noise(5120, seed);
    auto tf = covering_stft(x, p);
    double sig = 0.0;
    for (double v : x.samples) sig += v * v;
    const double ratio = coeff_energy(tf) / sig;
    if (expected == 0.0) expected = ratio;
    CHECK(ratio == doctest::Approx(expected).epsilon(1e-9));
  }
  // The half-shifted Hann at hop M/4 sums its square to exactly 3/2.
  CHECK(expected == doctest::Approx(512.0 * 1.5).epsilon(1e-9));
}

TEST_CASE("tf serialization round trip") {
  auto p = default_stft_params();
  auto x = white_noise(5120, 71);
  auto tf = stft(x, p, 37, 0);
  std::stringstream buf;
  write_tf(buf, tf);
  CHECK(buf.str().size() == 16 + tf.coeffs.size() * 16);
  auto back = read_tf(buf, p, 0);
  CHECK(back.n_bins == tf.n_bins);
  CHECK(back.n_frames == tf.n_frames);
  for (size_t i = 0; i < tf.coeffs.size(); ++i) CHECK(back.coeffs[i] == tf.coeffs[i]);

  std::stringstream bad("nope");
  CHECK_THROWS_AS(read_tf(bad, p, 0), std::runtime_error);
}
