// Copyright (C) 2026 the gapfill authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <vector>

#include "gapfill/audio_buffer.hpp"
#include "gapfill/rng.hpp"
#include "gapfill/segment.hpp"
#include "gapfill/tone.hpp"
#include "gapfill/wav_io.hpp"

using namespace gapfill;
namespace fs = std::filesystem;

namespace {

AudioBuffer ramp(int n, int rate = 16000) {
  AudioBuffer b;
  b.sample_rate = rate;
  b.samples.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) b[i] = static_cast<double>(i);
  return b;
}

fs::path temp_dir() {
  auto dir = fs::temp_directory_path() / "gapfill_signal_core_test";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("split_segment partitions by the spec geometry") {
  SUBCASE("default 64 ms geometry") {
    auto spec = SegmentSpec::make(1024, 2048, 16000);
    CHECK(spec.total_len == 5120);
    auto seg = split_segment(ramp(5120), spec);
    CHECK(seg.before.size() == 2048);
    CHECK(seg.gap.size() == 1024);
    CHECK(seg.after.size() == 2048);
  }
  SUBCASE("48 ms geometry") {
    auto spec = SegmentSpec::make(768, 2176, 16000);
    CHECK(spec.total_len == 5120);
    auto seg = split_segment(ramp(5120), spec);
    CHECK(seg.before.size() == 2176);
    CHECK(seg.gap.size() == 768);
    CHECK(seg.after.size() == 2176);
  }
  SUBCASE("gap starts where the before-context ends") {
    auto seg = split_segment(ramp(5120), default_segment_spec());
    CHECK(seg.gap[0] == 2048.0);
  }
  SUBCASE("length mismatch is rejected") {
    CHECK_THROWS_AS(split_segment(ramp(5121), default_segment_spec()),
                    std::invalid_argument);
  }
  SUBCASE("split then concat is bit-exact") {
    Rng rng(7);
    AudioBuffer noise;
    noise.sample_rate = 16000;
    for (int i = 0; i < 5120; ++i) noise.samples.push_back(rng.uniform(-1, 1));
    auto seg = split_segment(noise, default_segment_spec());
    auto back = concat_segment(seg);
    REQUIRE(back.size() == noise.size());
    for (int i = 0; i < noise.size(); ++i) CHECK(back[i] == noise[i]);
  }
}

TEST_CASE("generate_pure_tone") {
  SUBCASE("zero phase starts at zero") {
    auto tone = generate_pure_tone(440, 0.0, 1.0, 5120, 16000);
    CHECK(tone[0] == 0.0);
  }
  SUBCASE("quarter-period phase starts at the amplitude") {
    auto tone = generate_pure_tone(440, std::numbers::pi / 2, 0.5, 5120, 16000);
    CHECK(tone[0] == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("4 kHz at 16 kHz has period four") {
    auto tone = generate_pure_tone(4000, 0.0, 1.0, 5120, 16000);
    CHECK(std::abs(tone[2]) < 1e-12);
    CHECK(tone[1] == doctest::Approx(1.0));
    CHECK(tone[3] == doctest::Approx(-1.0));
  }
  SUBCASE("frequencies at or above Nyquist are rejected") {
    CHECK_THROWS_AS(generate_pure_tone(8000, 0, 1, 100, 16000),
                    std::invalid_argument);
    CHECK_THROWS_AS(generate_pure_tone(9000, 0, 1, 100, 16000),
                    std::invalid_argument);
  }
  SUBCASE("periodic when the period divides the rate") {
    auto tone = generate_pure_tone(500, 0.3, 0.8, 5120, 16000);  // period 32
    for (int n = 0; n + 32 < tone.size(); ++n)
      CHECK(std::abs(tone[n] - tone[n + 32]) < 1e-9);
  }
}

TEST_CASE("pure_tone_grid") {
  SUBCASE("frequency endpoints") {
    auto grid = pure_tone_grid(2, 2, 2);
    CHECK(grid.front().freq_hz == doctest::Approx(20.0));
    CHECK(grid.back().freq_hz == doctest::Approx(8000.0));
  }
  SUBCASE("phase endpoints and midpoint") {
    auto grid = pure_tone_grid(2, 3, 2);
    CHECK(grid[0].phase == doctest::Approx(0.0));
    CHECK(grid[2].phase == doctest::Approx(std::numbers::pi / 2));
    CHECK(grid[4].phase == doctest::Approx(std::numbers::pi));
  }
  SUBCASE("amplitude endpoints") {
    auto grid = pure_tone_grid(2, 2, 2);
    CHECK(grid[0].amplitude == doctest::Approx(0.1));
    CHECK(grid[1].amplitude == doctest::Approx(1.0));
  }
  SUBCASE("freq-major ordering with full cartesian size") {
    auto grid = pure_tone_grid(3, 4, 5);
    CHECK(grid.size() == 60);
    for (size_t i = 0; i + 1 < grid.size(); ++i)
      CHECK(grid[i].freq_hz <= grid[i + 1].freq_hz);
  }
  SUBCASE("frequencies are strictly geometric") {
    auto grid = pure_tone_grid(10, 2, 2);
    std::vector<double> freqs;
    for (size_t i = 0; i < grid.size(); i += 4) freqs.push_back(grid[i].freq_hz);
    const double ratio = freqs[1] / freqs[0];
    for (size_t i = 0; i + 1 < freqs.size(); ++i) {
      CHECK(freqs[i + 1] > freqs[i]);
      CHECK(freqs[i + 1] / freqs[i] == doctest::Approx(ratio).epsilon(1e-9));
    }
  }
  SUBCASE("counts below two are rejected") {
    CHECK_THROWS_AS(pure_tone_grid(1, 2, 2), std::invalid_argument);
  }
}

TEST_CASE("rms") {
  SUBCASE("zeros") {
    AudioBuffer b(std::vector<double>(100, 0.0), 16000);
    CHECK(rms(b) == 0.0);
  }
  SUBCASE("constant") {
    AudioBuffer b(std::vector<double>(100, 0.5), 16000);
    CHECK(rms(b) == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("unit sine over whole periods") {
    auto tone = generate_pure_tone(500, 0.0, 1.0, 3200, 16000);  // 100 periods
    CHECK(rms(tone) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
  }
  SUBCASE("empty is rejected") {
    AudioBuffer b;
    b.sample_rate = 16000;
    CHECK_THROWS_AS(rms(b), std::invalid_argument);
  }
  SUBCASE("scale equivariance") {
    Rng rng(3);
    std::vector<double> v(257);
    for (auto& x : v) x = rng.normal();
    AudioBuffer b(v, 16000);
    for (auto& x : v) x *= -2.5;
    AudioBuffer scaled(v, 16000);
    CHECK(rms(scaled) == doctest::Approx(2.5 * rms(b)).epsilon(1e-12));
  }
}

TEST_CASE("wav round trips") {
  auto dir = temp_dir();
  SUBCASE("pcm16 is bit-exact") {
    AudioBuffer b;
    b.sample_rate = 16000;
    for (int i = -32768; i < 32768; i += 37) b.samples.push_back(i / 32768.0);
    const auto path = (dir / "pcm16.wav").string();
    write_wav(path, b, WavFormat::Pcm16);
    auto back = read_wav(path);
    REQUIRE(back.size() == b.size());
    CHECK(back.sample_rate == 16000);
    for (int i = 0; i < b.size(); ++i) CHECK(back[i] == b[i]);
  }
  SUBCASE("float32 survives within quantization") {
    auto tone = generate_pure_tone(440, 0.1, 0.9, 2000, 44100);
    const auto path = (dir / "f32.wav").string();
    write_wav(path, tone, WavFormat::Float32);
    auto back = read_wav(path);
    REQUIRE(back.size() == tone.size());
    for (int i = 0; i < tone.size(); ++i)
      CHECK(back[i] == doctest::Approx(tone[i]).epsilon(1e-7));
  }
  SUBCASE("unsupported files are reported") {
    const auto path = (dir / "garbage.wav").string();
    std::ofstream(path) << "not a wav at all";
    CHECK_THROWS_AS(read_wav(path), std::runtime_error);
  }
}
