// wav_io.hpp  Linear-PCM WAV read/write (16-bit int and 32-bit float).
//
// Copyright (C) 2026 the gapfill authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <string>

#include "gapfill/audio_buffer.hpp"

namespace gapfill {

enum class WavFormat { Pcm16, Float32 };

// Multi-channel files are mixed down by averaging the channels.
// Unsupported encodings and malformed files raise std::runtime_error.
AudioBuffer read_wav(const std::string& path);

void write_wav(const std::string& path, const AudioBuffer& buffer,
               WavFormat format = WavFormat::Pcm16);

}  // namespace gapfill
