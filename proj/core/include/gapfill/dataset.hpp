// dataset.hpp  Corpus ingestion, segmentation, and the on-disk segment store.
//
// Copyright (C) 2026 the gapfill authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gapfill/segment.hpp"

namespace gapfill {

enum class Split { Train, Validation, Test };

std::string split_name(Split s);
Split split_from_name(const std::string& name);

struct ManifestEntry {
  std::string path;
  std::optional<Split> split;  // honored when present
};

struct CorpusManifest {
  std::vector<ManifestEntry> entries;
  std::string label;

  // JSON lines, one object per entry: {"path": ..., "split"?: ...}.
  static CorpusManifest read_jsonl(const std::string& path);
};

// Mono buffer at 16 kHz; resamples when the source rate differs.
AudioBuffer ingest(const std::string& path);
AudioBuffer ingest(const std::string& path, int target_rate);

// Drops every 32 ms block whose RMS falls below the threshold and
// concatenates the remainder. A fully silent input becomes empty.
AudioBuffer remove_silence(const AudioBuffer& buffer, double threshold = 1e-4);

// Overlapping windows of spec.total_len starting at 0, shift, 2*shift, ...;
// windows whose gap RMS falls below gap_rms_threshold are discarded.
std::vector<Segment> segmentize(const AudioBuffer& buffer,
                                const SegmentSpec& spec, int shift = 512,
                                double gap_rms_threshold = 1e-4);

struct StoredSegment {
  int64_t id = 0;
  std::string source;
  int64_t offset = 0;  // sample offset within the processed source
  Split split = Split::Train;
};

// Store layout: <dir>/store.json (spec + counts), <dir>/index.jsonl
// (one record per segment), <dir>/samples.f32 (little-endian float32,
// segment id * total_len addressing).
class SegmentStore {
 public:
  static SegmentStore open(const std::string& dir);

  const SegmentSpec& spec() const { return spec_; }
  const std::vector<StoredSegment>& index() const { return index_; }
  std::array<int64_t, 3> split_counts() const;

  std::vector<int64_t> ids(Split split) const;
  Segment load(int64_t id) const;

 private:
  std::string dir_;
  SegmentSpec spec_;
  std::vector<StoredSegment> index_;
};

struct BuildOptions {
  SegmentSpec spec = default_segment_spec();
  int shift = 512;
  double silence_threshold = 1e-4;
  double gap_rms_threshold = 1e-4;
  std::array<double, 3> split_fractions{0.7, 0.2, 0.1};
  uint64_t seed = 0;
  int jobs = 1;
  bool dry_run = false;
};

struct BuildStats {
  std::array<int64_t, 3> split_counts{0, 0, 0};
  int64_t files_ok = 0;
  int64_t files_failed = 0;
  std::vector<std::string> errors;

  int64_t total() const {
    return split_counts[0] + split_counts[1] + split_counts[2];
  }
};

// Ingests every manifest entry, segments it, and persists the store. Files
// with explicit split tags keep them; untagged files are assigned whole to
// splits by the fractions (largest remainder, seeded shuffle), so no source
// ever leaks across splits. Dry runs only count.
BuildStats build_store(const CorpusManifest& manifest, const std::string& dir,
                       const BuildOptions& options);

}  // namespace gapfill
