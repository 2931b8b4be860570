// Copyright (C) 2026 the gapfill authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "gapfill/wav_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

static_assert(std::endian::native == std::endian::little,
              "wav i/o assumes a little-endian host");

namespace gapfill {
namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::runtime_error("wav '" + path + "': " + what);
}

template <typename T>
T read_le(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  return value;
}

template <typename T>
void write_le(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

struct FmtChunk {
  uint16_t format = 0;
  uint16_t channels = 0;
  uint32_t sample_rate = 0;
  uint16_t bits = 0;
};

}  // namespace

AudioBuffer read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open");

  char riff[4], wave[4];
  in.read(riff, 4);
  read_le<uint32_t>(in);
  in.read(wave, 4);
  if (!in || std::memcmp(riff, "RIFF", 4) != 0 || std::memcmp(wave, "WAVE", 4) != 0)
    fail(path, "not a RIFF/WAVE file");

  FmtChunk fmt;
  bool have_fmt = false;
  std::vector<char> data;
  while (in) {
    char id[4];
    in.read(id, 4);
    if (!in) break;
    uint32_t size = read_le<uint32_t>(in);
    if (std::memcmp(id, "fmt ", 4) == 0) {
      fmt.format = read_le<uint16_t>(in);
      fmt.channels = read_le<uint16_t>(in);
      fmt.sample_rate = read_le<uint32_t>(in);
      read_le<uint32_t>(in);  // byte rate
      read_le<uint16_t>(in);  // block align
      fmt.bits = read_le<uint16_t>(in);
      if (size > 16) in.seekg(size - 16, std::ios::cur);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data.resize(size);
      in.read(data.data(), size);
      if (!in) fail(path, "truncated data chunk");
    } else {
      in.seekg(size + (size & 1), std::ios::cur);
      continue;
    }
    if (size & 1) in.seekg(1, std::ios::cur);
  }
  if (!have_fmt) fail(path, "missing fmt chunk");
  if (data.empty()) fail(path, "missing data chunk");
  if (fmt.channels == 0) fail(path, "zero channels");

  const bool pcm16 = fmt.format == 1 && fmt.bits == 16;
  const bool f32 = fmt.format == 3 && fmt.bits == 32;
  if (!pcm16 && !f32)
    fail(path, "unsupported encoding (expect 16-bit PCM or 32-bit float)");

  const size_t bytes_per = fmt.bits / 8;
  const size_t n_frames = data.size() / (bytes_per * fmt.channels);
  AudioBuffer out;
  out.sample_rate = static_cast<int>(fmt.sample_rate);
  out.samples.resize(n_frames);
  const double inv_channels = 1.0 / fmt.channels;
  for (size_t i = 0; i < n_frames; ++i) {
    double acc = 0.0;
    for (size_t c = 0; c < fmt.channels; ++c) {
      const char* p = data.data() + (i * fmt.channels + c) * bytes_per;
      if (pcm16) {
        int16_t v;
        std::memcpy(&v, p, 2);
        acc += v / 32768.0;
      } else {
        float v;
        std::memcpy(&v, p, 4);
        acc += static_cast<double>(v);
      }
    }
    out.samples[i] = acc * inv_channels;
  }
  return out;
}

void write_wav(const std::string& path, const AudioBuffer& buffer,
               WavFormat format) {
  if (buffer.sample_rate <= 0) fail(path, "buffer has no sample rate");
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(path, "cannot open for writing");

  const bool f32 = format == WavFormat::Float32;
  const uint16_t bits = f32 ? 32 : 16;
  const uint16_t bytes_per = bits / 8;
  const uint32_t n = static_cast<uint32_t>(buffer.samples.size());
  const uint32_t data_bytes = n * bytes_per;
  const uint32_t fact_bytes = f32 ? 12 : 0;
  const uint32_t riff_size = 4 + 24 + fact_bytes + 8 + data_bytes;

  out.write("RIFF", 4);
  write_le<uint32_t>(out, riff_size);
  out.write("WAVE", 4);

  out.write("fmt ", 4);
  write_le<uint32_t>(out, 16);
  write_le<uint16_t>(out, f32 ? 3 : 1);
  write_le<uint16_t>(out, 1);  // mono
  write_le<uint32_t>(out, static_cast<uint32_t>(buffer.sample_rate));
  write_le<uint32_t>(out, static_cast<uint32_t>(buffer.sample_rate) * bytes_per);
  write_le<uint16_t>(out, bytes_per);
  write_le<uint16_t>(out, bits);

  if (f32) {
    out.write("fact", 4);
    write_le<uint32_t>(out, 4);
    write_le<uint32_t>(out, n);
  }

  out.write("data", 4);
  write_le<uint32_t>(out, data_bytes);
  for (double v : buffer.samples) {
    if (f32) {
      write_le<float>(out, static_cast<float>(v));
    } else {
      double scaled = std::lround(v * 32768.0);
      if (scaled > 32767.0) scaled = 32767.0;
      if (scaled < -32768.0) scaled = -32768.0;
      write_le<int16_t>(out, static_cast<int16_t>(scaled));
    }
  }
  if (!out) fail(path, "write failed");
}

}  // namespace gapfill
