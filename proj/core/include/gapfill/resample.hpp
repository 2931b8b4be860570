// resample.hpp  Windowed-sinc polyphase sample-rate conversion.
//
// Copyright (C) 2026 the gapfill authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include "gapfill/audio_buffer.hpp"

namespace gapfill {

// Rate conversion by a Blackman-windowed sinc evaluated at the exact
// rational output instants. Pass-through when the rates already match.
AudioBuffer resample(const AudioBuffer& in, int target_rate);

}  // namespace gapfill
