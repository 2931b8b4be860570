// segment.hpp  Fixed-length excerpts partitioned into context/gap/context.
//
// Copyright (C) 2026 the gapfill authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include "gapfill/audio_buffer.hpp"

namespace gapfill {

// Geometry of one excerpt: total_len = gap_len + 2 * context_len.
struct SegmentSpec {
  int total_len = 0;    // L
  int gap_len = 0;      // L_g
  int context_len = 0;  // L_c
  int sample_rate = 0;

  static SegmentSpec make(int gap_len, int context_len, int sample_rate);

  int gap_start() const { return context_len; }
  int gap_end() const { return context_len + gap_len; }
};

void validate(const SegmentSpec& spec);

// The default geometry used throughout: 320 ms at 16 kHz with a 64 ms gap.
SegmentSpec default_segment_spec();

// 48 ms gap variant of the same 5120-sample excerpt.
SegmentSpec short_gap_segment_spec();

struct Segment {
  AudioBuffer before;  // L_c samples
  AudioBuffer gap;     // L_g samples
  AudioBuffer after;   // L_c samples
  SegmentSpec spec;
};

// Partitions a buffer of exactly spec.total_len samples.
Segment split_segment(const AudioBuffer& buffer, const SegmentSpec& spec);

// before || gap || after. Inverse of split_segment, bit-exact.
AudioBuffer concat_segment(const Segment& seg);

// Same partition with an alternative gap content spliced in.
AudioBuffer splice_gap(const Segment& seg, const AudioBuffer& new_gap);

}  // namespace gapfill
