// Copyright (C) 2026 the gapfill authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "gapfill/segment.hpp"

#include "gapfill/common.hpp"

namespace gapfill {

SegmentSpec SegmentSpec::make(int gap_len, int context_len, int sample_rate) {
  SegmentSpec spec;
  spec.gap_len = gap_len;
  spec.context_len = context_len;
  spec.total_len = gap_len + 2 * context_len;
  spec.sample_rate = sample_rate;
  validate(spec);
  return spec;
}

void validate(const SegmentSpec& spec) {
  require(spec.gap_len > 0, "gap_len must be positive");
  require(spec.context_len > 0, "context_len must be positive");
  require(spec.sample_rate > 0, "sample_rate must be positive");
  require(spec.total_len == spec.gap_len + 2 * spec.context_len,
          "total_len must equal gap_len + 2*context_len");
}

SegmentSpec default_segment_spec() { return SegmentSpec::make(1024, 2048, 16000); }

SegmentSpec short_gap_segment_spec() { return SegmentSpec::make(768, 2176, 16000); }

Segment split_segment(const AudioBuffer& buffer, const SegmentSpec& spec) {
  validate(spec);
  require(buffer.size() == spec.total_len,
          "buffer length does not match segment spec");
  Segment seg;
  seg.spec = spec;
  seg.before = slice(buffer, 0, spec.context_len);
  seg.gap = slice(buffer, spec.gap_start(), spec.gap_len);
  seg.after = slice(buffer, spec.gap_end(), spec.context_len);
  return seg;
}

AudioBuffer concat_segment(const Segment& seg) {
  AudioBuffer out;
  out.sample_rate = seg.spec.sample_rate;
  out.samples.reserve(static_cast<size_t>(seg.spec.total_len));
  out.samples.insert(out.samples.end(), seg.before.samples.begin(),
                     seg.before.samples.end());
  out.samples.insert(out.samples.end(), seg.gap.samples.begin(),
                     seg.gap.samples.end());
  out.samples.insert(out.samples.end(), seg.after.samples.begin(),
                     seg.after.samples.end());
  return out;
}

AudioBuffer splice_gap(const Segment& seg, const AudioBuffer& new_gap) {
  require(new_gap.size() == seg.spec.gap_len,
          "replacement gap length mismatch");
  Segment patched = seg;
  patched.gap = new_gap;
  patched.gap.sample_rate = seg.spec.sample_rate;
  return concat_segment(patched);
}

}  // namespace gapfill
