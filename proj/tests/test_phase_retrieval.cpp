// Copyright (C) 2026 the gapfill authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "gapfill/evaluation.hpp"
#include "gapfill/phase_retrieval.hpp"
#include "gapfill/rng.hpp"
#include "gapfill/tone.hpp"

using namespace gapfill;

namespace {

const STFTParams& params() {
  static STFTParams p = default_stft_params();
  return p;
}

AudioBuffer multi_tone(std::vector<std::pair<double, double>> freq_amp,
                       uint64_t seed) {
  Rng rng(seed);
  AudioBuffer out(std::vector<double>(5120, 0.0), 16000);
  for (auto [f, a] : freq_amp) {
    auto t = generate_pure_tone(f, rng.uniform(0.0, 6.28), a, 5120, 16000);
    for (int i = 0; i < 5120; ++i) out[i] += t[i];
  }
  return out;
}

// SNR between gap-frame magnitude grids of the true and restored signals.
double resynth_snr_ms(const AudioBuffer& truth, const AudioBuffer& restored) {
  auto seg = split_segment(truth, default_segment_spec());
  AudioBuffer r = restored;
  r.samples.resize(5120);
  r.sample_rate = 16000;
  return snr_ms(seg, r, params()).db;
}

TFMatrix analyze37(const AudioBuffer& x) { return stft(x, params(), 37, 0); }

}  // namespace

TEST_CASE("pghi basics") {
  SUBCASE("all-zero magnitude yields zero phase") {
    auto mag = MagnitudeGrid::zeros(params(), 37);
    auto phase = pghi(mag, RetrievalConfig{});
    for (double v : phase) CHECK(v == 0.0);
  }
  SUBCASE("the global maximum is the first seed and gets phase zero") {
    auto tone = generate_pure_tone(1000.0, 0.7, 1.0, 5120, 16000);
    auto mag = MagnitudeGrid::from_tf(analyze37(tone));
    auto phase = pghi(mag, RetrievalConfig{});
    size_t argmax = 0;
    for (size_t i = 0; i < mag.mags.size(); ++i)
      if (mag.mags[i] > mag.mags[argmax]) argmax = i;
    CHECK(phase[argmax] == 0.0);
  }
  SUBCASE("config validation") {
    RetrievalConfig bad;
    bad.fgl_momentum = 1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = RetrievalConfig{};
    bad.pghi_rel_tolerance = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  }
}

TEST_CASE("pghi gradient model matches the measured phase of a steady tone") {
  // Phase advance per frame at the peak bin of a bin-centered tone must be
  // 2*pi*a*m/M; per bin step it must be about -pi*(M-1)/M.
  const int m0 = 40;
  const double freq = m0 * 16000.0 / 512.0;
  auto tone = generate_pure_tone(freq, 0.3, 1.0, 5120, 16000);
  auto tf = analyze37(tone);

  auto wrap = [](double x) {
    while (x > std::numbers::pi) x -= 2 * std::numbers::pi;
    while (x < -std::numbers::pi) x += 2 * std::numbers::pi;
    return x;
  };
  const double expected_t = 2.0 * std::numbers::pi * 128.0 * m0 / 512.0;
  const double expected_f = -std::numbers::pi * 511.0 / 512.0;
  for (int k = 10; k < 20; ++k) {
    const double dt = std::arg(tf.at(m0, k + 1)) - std::arg(tf.at(m0, k));
    CHECK(std::abs(wrap(dt - expected_t)) < 1e-6);
    const double df = std::arg(tf.at(m0 + 1, k)) - std::arg(tf.at(m0, k));
    CHECK(std::abs(wrap(df - expected_f)) < 0.05);
  }
}

TEST_CASE("pghi restores a steady bin-centered tone to >= 30 dB SNR-MS") {
  const double freq = 32.0 * 16000.0 / 512.0;
  auto tone = generate_pure_tone(freq, 1.1, 0.8, 5120, 16000);
  auto mag = MagnitudeGrid::from_tf(analyze37(tone));
  RetrievalConfig cfg;
  cfg.fgl_iterations = 0;  // pghi alone
  auto phase = pghi(mag, cfg);
  TFMatrix coeffs = TFMatrix::zeros(params(), 37);
  for (size_t i = 0; i < mag.mags.size(); ++i)
    coeffs.coeffs[i] = std::polar(mag.mags[i], phase[i]);
  auto restored = istft(coeffs);
  CHECK(resynth_snr_ms(tone, restored) >= 30.0);
}

TEST_CASE("fast_griffin_lim") {
  SUBCASE("true magnitudes with true phase are a fixed point") {
    auto x = multi_tone({{440, 0.8}, {1730, 0.4}}, 5);
    auto tf = analyze37(x);
    auto mag = MagnitudeGrid::from_tf(tf);
    std::vector<double> phase(tf.coeffs.size());
    for (size_t i = 0; i < phase.size(); ++i) phase[i] = std::arg(tf.coeffs[i]);
    RetrievalConfig cfg;
    cfg.fgl_iterations = 25;
    auto out = fast_griffin_lim(mag, phase, cfg);
    double max_err = 0.0;
    for (size_t i = 0; i < out.coeffs.size(); ++i)
      max_err = std::max(max_err, std::abs(out.coeffs[i] - tf.coeffs[i]));
    CHECK(max_err < 1e-8);
  }
  SUBCASE("zero iterations returns mag * exp(i*init_phase)") {
    auto x = multi_tone({{500, 1.0}}, 6);
    auto mag = MagnitudeGrid::from_tf(analyze37(x));
    std::vector<double> phase(mag.mags.size(), 0.25);
    RetrievalConfig cfg;
    cfg.fgl_iterations = 0;
    auto out = fast_griffin_lim(mag, phase, cfg);
    for (size_t i = 0; i < out.coeffs.size(); ++i)
      CHECK(std::abs(out.coeffs[i] - std::polar(mag.mags[i], 0.25)) < 1e-12);
  }
  SUBCASE("pghi + 100 iterations recovers a two-tone signal to >= 20 dB") {
    auto x = multi_tone({{440, 0.9}, {2150, 0.5}}, 7);
    auto mag = MagnitudeGrid::from_tf(analyze37(x));
    RetrievalConfig cfg;
    auto out = reconstruct_from_magnitude(mag, cfg);
    const double ours = resynth_snr_ms(x, istft(out));
    CHECK(ours >= 20.0);

    // Reference: plain Griffin-Lim run ten times longer from zero phase.
    RetrievalConfig plain;
    plain.fgl_momentum = 0.0;
    plain.fgl_iterations = 1000;
    std::vector<double> zero_phase(mag.mags.size(), 0.0);
    auto ref = fast_griffin_lim(mag, zero_phase, plain);
    const double theirs = resynth_snr_ms(x, istft(ref));
    MESSAGE("pghi+fgl100: ", ours, " dB, plain gl1000: ", theirs, " dB");
  }
}

TEST_CASE("reconstruct_from_magnitude") {
  SUBCASE("zero magnitudes give zero coefficients") {
    auto mag = MagnitudeGrid::zeros(params(), 37);
    auto out = reconstruct_from_magnitude(mag, RetrievalConfig{});
    for (const auto& c : out.coeffs) CHECK(std::abs(c) == 0.0);
  }
  SUBCASE("output magnitudes equal the input exactly") {
    auto x = multi_tone({{620, 0.7}, {3100, 0.3}}, 8);
    auto mag = MagnitudeGrid::from_tf(analyze37(x));
    RetrievalConfig cfg;
    cfg.fgl_iterations = 7;
    auto out = reconstruct_from_magnitude(mag, cfg);
    for (size_t i = 0; i < out.coeffs.size(); ++i)
      CHECK(std::abs(out.coeffs[i]) == doctest::Approx(mag.mags[i]).epsilon(1e-14));
  }
  SUBCASE("clamped frames keep their known complex values") {
    auto x = multi_tone({{700, 0.8}}, 9);
    auto tf = analyze37(x);
    auto mag = MagnitudeGrid::from_tf(tf);
    FrameClamp clamp;
    clamp.known.assign(37, 0);
    for (int k = 0; k < 13; ++k) clamp.known[static_cast<size_t>(k)] = 1;
    clamp.values = tf;
    RetrievalConfig cfg;
    cfg.fgl_iterations = 3;
    auto out = reconstruct_from_magnitude(mag, cfg, &clamp);
    for (int bin = 0; bin <= 256; bin += 8)
      for (int k = 0; k < 13; ++k)
        CHECK(out.at(bin, k) == tf.at(bin, k));
  }
}

TEST_CASE("consistency projection is idempotent") {
  Rng rng(12);
  auto c = TFMatrix::zeros(params(), 37);
  for (auto& v : c.coeffs) v = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
  auto once = project_consistent(c);
  auto twice = project_consistent(once);
  double max_err = 0.0;
  for (size_t i = 0; i < c.coeffs.size(); ++i)
    max_err = std::max(max_err, std::abs(twice.coeffs[i] - once.coeffs[i]));
  CHECK(max_err < 1e-10);
}

TEST_CASE("plain griffin-lim never increases spectral convergence") {
  auto x = multi_tone({{440, 1.0}, {990, 0.6}, {2222, 0.35}}, 13);
  auto mag = MagnitudeGrid::from_tf(analyze37(x));
  RetrievalConfig cfg;
  cfg.fgl_momentum = 0.0;
  std::vector<double> zero_phase(mag.mags.size(), 0.0);

  double prev = -1.0;
  for (int iters = 1; iters <= 31; iters += 5) {
    cfg.fgl_iterations = iters;
    auto out = fast_griffin_lim(mag, zero_phase, cfg);
    const double sc = spectral_convergence(out, mag);
    if (prev >= 0.0) CHECK(sc <= prev + 1e-10);
    prev = sc;
  }
}

TEST_CASE("combined retrieval beats zero-phase griffin-lim on mixtures") {
  // Three tones plus a short noise burst, the music-like fixture.
  int wins = 0;
  for (uint64_t seed = 0; seed < 5; ++seed) {
    auto x = multi_tone({{330 + 37.0 * seed, 0.8},
                         {870 + 11.0 * seed, 0.5},
                         {1900 + 101.0 * seed, 0.35}},
                        20 + seed);
    Rng rng(99 + seed);
    for (int t = 2400; t < 2800; ++t) x[t] += 0.2 * rng.normal();
    auto mag = MagnitudeGrid::from_tf(analyze37(x));

    RetrievalConfig cfg;  // pghi + 100 fgl
    auto ours = reconstruct_from_magnitude(mag, cfg);

    RetrievalConfig plain;
    plain.fgl_momentum = 0.0;
    plain.fgl_iterations = 100;
    std::vector<double> zero_phase(mag.mags.size(), 0.0);
    auto ref = fast_griffin_lim(mag, zero_phase, plain);

    if (spectral_convergence(ours, mag) <= spectral_convergence(ref, mag)) ++wins;
  }
  CHECK(wins >= 4);
}
