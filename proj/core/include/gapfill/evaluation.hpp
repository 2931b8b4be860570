// evaluation.hpp  SNR metrics, gap-duration extension, dataset evaluation,
// and the pure-tone probe.
//
// Copyright (C) 2026 the gapfill authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "gapfill/frames.hpp"
#include "gapfill/tone.hpp"

namespace gapfill {

// SNR values cap at +300 dB for an exact match; a zero-energy reference is
// undefined and flagged excluded.
inline constexpr double kSnrCapDb = 300.0;

struct SnrResult {
  double db = 0.0;
  bool capped = false;
  bool excluded = false;
};

// 10*log10(||x||^2 / ||x - x'||^2).
SnrResult snr(std::span<const double> x, std::span<const double> x_restored);

// SNR over the time-domain gap samples of the restored excerpt.
SnrResult snr_td(const Segment& seg, const AudioBuffer& restored);

// SNR between the magnitude spectrograms over the frames fully inside the
// gap; invariant to global sign and phase shifts of steady tones.
SnrResult snr_ms(const Segment& seg, const AudioBuffer& restored,
                 const STFTParams& params);

enum class GapExtensionMode { Forward, Backward, Centered };

std::string extension_name(GapExtensionMode mode);
GapExtensionMode extension_from_name(const std::string& name);

// A short-gap excerpt whose gap has been widened to the length a fixed-size
// network restores. The underlying samples are untouched; only the partition
// moves, so for the forward/backward modes the remaining raw context is
// asymmetric and a symmetric network view is derived on demand.
struct ExtendedGapSegment {
  AudioBuffer full;      // the original excerpt, bit-exact
  SegmentSpec original;  // short-gap geometry
  int new_gap_start = 0;
  int new_gap_len = 0;
  GapExtensionMode mode = GapExtensionMode::Centered;

  int original_gap_start() const { return original.gap_start(); }
};

// Widens the gap to net_spec.gap_len: forward extends after the gap,
// backward before it, centered half each way. The new gap always contains
// the old one, so no retained context holds original-gap samples.
ExtendedGapSegment extend_gap(const Segment& seg, GapExtensionMode mode,
                              const SegmentSpec& net_spec);

// Symmetric net_spec-geometry segment centered on the extended gap; samples
// outside the excerpt read as zero. *view_offset receives the excerpt index
// of the view's first sample.
Segment network_view(const ExtendedGapSegment& ext, const SegmentSpec& net_spec,
                     int* view_offset);

// Copies the restored gap samples of the view back into the excerpt.
AudioBuffer splice_restored_view(const ExtendedGapSegment& ext,
                                 const SegmentSpec& net_spec,
                                 const AudioBuffer& restored_view,
                                 int view_offset);

// A restoration method: consumes a segment, returns the full restored
// excerpt (spec.total_len samples).
struct NamedMethod {
  std::string name;
  std::function<AudioBuffer(const Segment&)> restore;
};

struct EvalRecord {
  int64_t segment_id = 0;
  std::string method;
  SnrResult td, ms;
};

struct Aggregate {
  double mean = 0.0;
  double stddev = 0.0;
  int64_t count = 0;     // records entering mean/std (capped included)
  int64_t capped = 0;
  int64_t excluded = 0;  // zero-reference records, dropped from mean/std
};

Aggregate aggregate_from_values(const std::vector<SnrResult>& values);

struct EvalReport {
  std::vector<EvalRecord> records;
  // method -> (snr_td aggregate, snr_ms aggregate). Method families named
  // "base@variant" additionally get a pooled "base@pooled" entry.
  std::map<std::string, std::pair<Aggregate, Aggregate>> aggregates;
};

EvalReport evaluate_dataset(const std::vector<std::pair<int64_t, Segment>>& segments,
                            const std::vector<NamedMethod>& methods,
                            const STFTParams& params, int jobs = 1);

// segment_id, method, snr_td_db, snr_ms_db, capped_flag
void write_report_csv(const std::string& path, const EvalReport& report);
void write_report_json(const std::string& path, const EvalReport& report);

struct ProbePoint {
  double freq_hz = 0.0;
  double snr_ms_db = 0.0;    // mean over the phase/amplitude grid
  double smoothed_db = 0.0;  // moving average over neighboring frequencies
};

// Builds a steady-tone segment per grid point, restores it, and reports the
// per-frequency mean SNR-MS plus a 25-point moving average (the window
// shrinks symmetrically at the edges).
std::vector<ProbePoint> probe_tones(
    const std::function<AudioBuffer(const Segment&)>& restore,
    const std::vector<ToneParams>& grid, const SegmentSpec& spec,
    const STFTParams& params, int smooth_points = 25, int jobs = 1);

void write_probe_csv(const std::string& path, const std::vector<ProbePoint>& curve);

}  // namespace gapfill
