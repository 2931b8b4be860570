// Copyright (C) 2026 the gapfill authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "gapfill/stft.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "gapfill/common.hpp"
#include "gapfill/fft.hpp"

static_assert(std::endian::native == std::endian::little,
              "tf serialization assumes a little-endian host");

namespace gapfill {

std::pair<std::vector<double>, std::vector<double>> make_hann_pr(int window_len,
                                                                 int hop) {
  require(window_len > 0 && hop > 0, "window_len and hop must be positive");
  require(window_len % hop == 0, "hop must divide window_len");
  require(window_len == 4 * hop, "hop must be window_len/4");

  std::vector<double> analysis(static_cast<size_t>(window_len));
  for (int n = 0; n < window_len; ++n) {
    double s = std::sin(kPi * (n + 0.5) / window_len);
    analysis[static_cast<size_t>(n)] = s * s;
  }

  // Diagonal of the frame operator over the full shift lattice; it is
  // hop-periodic, so one period suffices.
  std::vector<double> diag(static_cast<size_t>(hop), 0.0);
  for (int n = 0; n < window_len; ++n)
    diag[static_cast<size_t>(n % hop)] +=
        analysis[static_cast<size_t>(n)] * analysis[static_cast<size_t>(n)];

  std::vector<double> synthesis(static_cast<size_t>(window_len));
  for (int n = 0; n < window_len; ++n)
    synthesis[static_cast<size_t>(n)] =
        analysis[static_cast<size_t>(n)] / diag[static_cast<size_t>(n % hop)];
  return {std::move(analysis), std::move(synthesis)};
}

STFTParams STFTParams::make(int window_len, int hop, int sample_rate) {
  require(sample_rate > 0, "sample_rate must be positive");
  STFTParams p;
  p.window_len = window_len;
  p.hop = hop;
  p.sample_rate = sample_rate;
  auto [g, gd] = make_hann_pr(window_len, hop);
  p.analysis = std::move(g);
  p.synthesis = std::move(gd);
  return p;
}

STFTParams default_stft_params() { return STFTParams::make(512, 128, 16000); }

TFMatrix TFMatrix::zeros(const STFTParams& params, int n_frames,
                         int frame_origin) {
  require(n_frames > 0, "n_frames must be positive");
  TFMatrix tf;
  tf.n_bins = params.n_bins();
  tf.n_frames = n_frames;
  tf.frame_origin = frame_origin;
  tf.params = params;
  tf.coeffs.assign(static_cast<size_t>(tf.n_bins) * n_frames, {0.0, 0.0});
  return tf;
}

TFMatrix stft(const AudioBuffer& buffer, const STFTParams& params, int n_frames,
              int frame_origin) {
  TFMatrix tf = TFMatrix::zeros(params, n_frames, frame_origin);
  const int m = params.window_len;
  const int len = buffer.size();
  Fft fft(m);
  std::vector<std::complex<double>> frame(static_cast<size_t>(m));
  for (int k = 0; k < n_frames; ++k) {
    const int start = frame_origin + k * params.hop;
    for (int n = 0; n < m; ++n) {
      const int t = start + n;
      const double v = (t >= 0 && t < len) ? buffer[t] : 0.0;
      frame[static_cast<size_t>(n)] = v * params.analysis[static_cast<size_t>(n)];
    }
    fft.forward(frame.data());
    for (int bin = 0; bin < tf.n_bins; ++bin)
      tf.at(bin, k) = frame[static_cast<size_t>(bin)];
  }
  return tf;
}

AudioBuffer istft(const TFMatrix& tf) {
  require(tf.n_bins == tf.params.n_bins(), "bin count inconsistent with params");
  const int m = tf.params.window_len;
  const int hop = tf.params.hop;
  const int out_len = (tf.n_frames - 1) * hop + m;

  std::vector<double> num(static_cast<size_t>(out_len), 0.0);
  std::vector<double> den(static_cast<size_t>(out_len), 0.0);

  Fft fft(m);
  std::vector<std::complex<double>> frame(static_cast<size_t>(m));
  for (int k = 0; k < tf.n_frames; ++k) {
    for (int bin = 0; bin <= m / 2; ++bin) frame[static_cast<size_t>(bin)] = tf.at(bin, k);
    for (int bin = m / 2 + 1; bin < m; ++bin)
      frame[static_cast<size_t>(bin)] = std::conj(tf.at(m - bin, k));
    fft.inverse(frame.data());
    const int start = k * hop;
    for (int n = 0; n < m; ++n) {
      num[static_cast<size_t>(start + n)] +=
          frame[static_cast<size_t>(n)].real() * tf.params.synthesis[static_cast<size_t>(n)];
      den[static_cast<size_t>(start + n)] +=
          tf.params.analysis[static_cast<size_t>(n)] * tf.params.synthesis[static_cast<size_t>(n)];
    }
  }

  AudioBuffer out;
  out.sample_rate = tf.params.sample_rate;
  out.samples.resize(static_cast<size_t>(out_len));
  for (int t = 0; t < out_len; ++t)
    out.samples[static_cast<size_t>(t)] =
        den[static_cast<size_t>(t)] > 0.0 ? num[static_cast<size_t>(t)] / den[static_cast<size_t>(t)] : 0.0;
  return out;
}

AudioBuffer istft_span(const TFMatrix& tf, int abs_start, int len) {
  AudioBuffer full = istft(tf);
  const int rel = abs_start - tf.frame_origin;
  require(rel >= 0 && rel + len <= full.size(), "span outside synthesis range");
  return slice(full, rel, len);
}

double coeff_energy(const TFMatrix& tf) {
  double acc = 0.0;
  const int nyquist = tf.params.window_len / 2;
  for (int bin = 0; bin < tf.n_bins; ++bin) {
    const double w = (bin == 0 || bin == nyquist) ? 1.0 : 2.0;
    for (int k = 0; k < tf.n_frames; ++k) acc += w * std::norm(tf.at(bin, k));
  }
  return acc;
}

namespace {
constexpr char kMagic[4] = {'T', 'F', 'M', 'X'};
}

void write_tf(std::ostream& out, const TFMatrix& tf) {
  uint32_t n_bins = static_cast<uint32_t>(tf.n_bins);
  uint32_t n_frames = static_cast<uint32_t>(tf.n_frames);
  uint32_t flags = 0;
  out.write(kMagic, 4);
  out.write(reinterpret_cast<const char*>(&n_bins), 4);
  out.write(reinterpret_cast<const char*>(&n_frames), 4);
  out.write(reinterpret_cast<const char*>(&flags), 4);
  for (const auto& c : tf.coeffs) {
    double re = c.real(), im = c.imag();
    out.write(reinterpret_cast<const char*>(&re), 8);
    out.write(reinterpret_cast<const char*>(&im), 8);
  }
  if (!out) throw std::runtime_error("tf write failed");
}

TFMatrix read_tf(std::istream& in, const STFTParams& params, int frame_origin) {
  char magic[4];
  uint32_t n_bins = 0, n_frames = 0, flags = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&n_bins), 4);
  in.read(reinterpret_cast<char*>(&n_frames), 4);
  in.read(reinterpret_cast<char*>(&flags), 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("tf read: bad header");
  if (static_cast<int>(n_bins) != params.n_bins())
    throw std::runtime_error("tf read: bin count does not match params");
  TFMatrix tf = TFMatrix::zeros(params, static_cast<int>(n_frames), frame_origin);
  for (auto& c : tf.coeffs) {
    double re, im;
    in.read(reinterpret_cast<char*>(&re), 8);
    in.read(reinterpret_cast<char*>(&im), 8);
    c = {re, im};
  }
  if (!in) throw std::runtime_error("tf read: truncated data");
  return tf;
}

void write_tf_file(const std::string& path, const TFMatrix& tf) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_tf(out, tf);
}

TFMatrix read_tf_file(const std::string& path, const STFTParams& params,
                      int frame_origin) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_tf(in, params, frame_origin);
}

}  // namespace gapfill
