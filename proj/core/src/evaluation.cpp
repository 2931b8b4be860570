// Copyright (C) 2026 the gapfill authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "gapfill/evaluation.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "gapfill/common.hpp"

namespace gapfill {

using nlohmann::json;

SnrResult snr(std::span<const double> x, std::span<const double> x_restored) {
  require(x.size() == x_restored.size(), "snr inputs must have equal size");
  double ref = 0.0, err = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    ref += x[i] * x[i];
    const double d = x[i] - x_restored[i];
    err += d * d;
  }
  SnrResult r;
  if (ref <= 0.0) {
    r.excluded = true;
    r.db = std::nan("");
    return r;
  }
  if (err <= 0.0) {
    r.capped = true;
    r.db = kSnrCapDb;
    return r;
  }
  r.db = 10.0 * std::log10(ref / err);
  return r;
}

SnrResult snr_td(const Segment& seg, const AudioBuffer& restored) {
  require(restored.size() == seg.spec.total_len,
          "restored buffer must cover the whole excerpt");
  return snr(std::span(seg.gap.samples),
             std::span(restored.samples)
                 .subspan(static_cast<size_t>(seg.spec.gap_start()),
                          static_cast<size_t>(seg.spec.gap_len)));
}

SnrResult snr_ms(const Segment& seg, const AudioBuffer& restored,
                 const STFTParams& params) {
  require(restored.size() == seg.spec.total_len,
          "restored buffer must cover the whole excerpt");
  const FrameLayout layout = compute_frame_layout(seg.spec, params);
  const TFMatrix ref =
      gap_frames(stft(concat_segment(seg), params, layout.total_frames, 0), layout);
  const TFMatrix got =
      gap_frames(stft(restored, params, layout.total_frames, 0), layout);
  std::vector<double> ref_mags(ref.coeffs.size()), got_mags(got.coeffs.size());
  for (size_t i = 0; i < ref.coeffs.size(); ++i) {
    ref_mags[i] = std::abs(ref.coeffs[i]);
    got_mags[i] = std::abs(got.coeffs[i]);
  }
  return snr(ref_mags, got_mags);
}

std::string extension_name(GapExtensionMode mode) {
  switch (mode) {
    case GapExtensionMode::Forward: return "forward";
    case GapExtensionMode::Backward: return "backward";
    case GapExtensionMode::Centered: return "centered";
  }
  return "?";
}

GapExtensionMode extension_from_name(const std::string& name) {
  if (name == "forward") return GapExtensionMode::Forward;
  if (name == "backward") return GapExtensionMode::Backward;
  if (name == "centered") return GapExtensionMode::Centered;
  throw std::invalid_argument("unknown extension mode '" + name + "'");
}

ExtendedGapSegment extend_gap(const Segment& seg, GapExtensionMode mode,
                              const SegmentSpec& net_spec) {
  require(seg.spec.total_len == net_spec.total_len,
          "extension requires equal excerpt lengths");
  const int extra = net_spec.gap_len - seg.spec.gap_len;
  require(extra > 0, "gap is not shorter than the network gap");

  int before = 0;
  switch (mode) {
    case GapExtensionMode::Forward: before = 0; break;
    case GapExtensionMode::Backward: before = extra; break;
    case GapExtensionMode::Centered: before = extra / 2; break;
  }
  ExtendedGapSegment ext;
  ext.full = concat_segment(seg);
  ext.original = seg.spec;
  ext.new_gap_len = net_spec.gap_len;
  ext.new_gap_start = seg.spec.gap_start() - before;
  ext.mode = mode;
  require(ext.new_gap_start >= 0 &&
              ext.new_gap_start + ext.new_gap_len <= seg.spec.total_len,
          "extended gap does not fit inside the excerpt");
  return ext;
}

Segment network_view(const ExtendedGapSegment& ext, const SegmentSpec& net_spec,
                     int* view_offset) {
  require(net_spec.gap_len == ext.new_gap_len, "view geometry mismatch");
  const int offset = ext.new_gap_start - net_spec.context_len;
  AudioBuffer view;
  view.sample_rate = ext.full.sample_rate;
  view.samples.resize(static_cast<size_t>(net_spec.total_len), 0.0);
  for (int i = 0; i < net_spec.total_len; ++i) {
    const int t = offset + i;
    if (t >= 0 && t < ext.full.size()) view.samples[static_cast<size_t>(i)] = ext.full[t];
  }
  if (view_offset) *view_offset = offset;
  return split_segment(view, net_spec);
}

AudioBuffer splice_restored_view(const ExtendedGapSegment& ext,
                                 const SegmentSpec& net_spec,
                                 const AudioBuffer& restored_view,
                                 int view_offset) {
  require(restored_view.size() == net_spec.total_len, "restored view size mismatch");
  AudioBuffer out = ext.full;
  for (int i = 0; i < ext.new_gap_len; ++i) {
    const int t = ext.new_gap_start + i;
    const int v = t - view_offset;
    out.samples[static_cast<size_t>(t)] = restored_view[v];
  }
  return out;
}

Aggregate aggregate_from_values(const std::vector<SnrResult>& values) {
  Aggregate agg;
  double sum = 0.0;
  for (const auto& v : values) {
    if (v.excluded) {
      ++agg.excluded;
      continue;
    }
    if (v.capped) ++agg.capped;
    sum += v.db;
    ++agg.count;
  }
  if (agg.count == 0) return agg;
  agg.mean = sum / agg.count;
  double var = 0.0;
  for (const auto& v : values) {
    if (v.excluded) continue;
    var += (v.db - agg.mean) * (v.db - agg.mean);
  }
  agg.stddev = std::sqrt(var / agg.count);
  return agg;
}

namespace {

template <typename F>
void parallel_for(int64_t n, int jobs, F&& body) {
  if (jobs <= 1 || n <= 1) {
    for (int64_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int64_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const int64_t i = next.fetch_add(1);
      if (i >= n) return;
      body(i);
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < std::min<int64_t>(jobs, n); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

void add_aggregates(EvalReport& report) {
  std::map<std::string, std::pair<std::vector<SnrResult>, std::vector<SnrResult>>> by_method;
  for (const auto& rec : report.records) {
    by_method[rec.method].first.push_back(rec.td);
    by_method[rec.method].second.push_back(rec.ms);
  }
  // Pool families named base@variant.
  std::map<std::string, std::pair<std::vector<SnrResult>, std::vector<SnrResult>>> pooled;
  for (const auto& [name, values] : by_method) {
    const auto at = name.find('@');
    if (at == std::string::npos) continue;
    auto& slot = pooled[name.substr(0, at) + "@pooled"];
    slot.first.insert(slot.first.end(), values.first.begin(), values.first.end());
    slot.second.insert(slot.second.end(), values.second.begin(), values.second.end());
  }
  for (auto& [name, values] : pooled)
    if (by_method.count(name) == 0) by_method[name] = std::move(values);

  for (const auto& [name, values] : by_method)
    report.aggregates[name] = {aggregate_from_values(values.first),
                               aggregate_from_values(values.second)};
}

}  // namespace

EvalReport evaluate_dataset(const std::vector<std::pair<int64_t, Segment>>& segments,
                            const std::vector<NamedMethod>& methods,
                            const STFTParams& params, int jobs) {
  require(!segments.empty(), "no segments to evaluate");
  require(!methods.empty(), "no methods to evaluate");
  EvalReport report;
  report.records.resize(segments.size() * methods.size());
  parallel_for(static_cast<int64_t>(report.records.size()), jobs, [&](int64_t i) {
    const auto& [id, seg] = segments[static_cast<size_t>(i) / methods.size()];
    const auto& method = methods[static_cast<size_t>(i) % methods.size()];
    EvalRecord rec;
    rec.segment_id = id;
    rec.method = method.name;
    const AudioBuffer restored = method.restore(seg);
    rec.td = snr_td(seg, restored);
    rec.ms = snr_ms(seg, restored, params);
    report.records[static_cast<size_t>(i)] = std::move(rec);
  });
  add_aggregates(report);
  return report;
}

void write_report_csv(const std::string& path, const EvalReport& report) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "segment_id,method,snr_td_db,snr_ms_db,capped_flag\n";
  for (const auto& rec : report.records) {
    out << rec.segment_id << "," << rec.method << "," << rec.td.db << ","
        << rec.ms.db << "," << (rec.td.capped || rec.ms.capped ? 1 : 0) << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

json aggregate_json(const Aggregate& a) {
  return {{"mean", a.mean},
          {"std", a.stddev},
          {"count", a.count},
          {"capped", a.capped},
          {"excluded", a.excluded}};
}

}  // namespace

void write_report_json(const std::string& path, const EvalReport& report) {
  json j;
  j["schema_version"] = 1;
  j["methods"] = json::object();
  for (const auto& [name, aggs] : report.aggregates)
    j["methods"][name] = {{"snr_td", aggregate_json(aggs.first)},
                          {"snr_ms", aggregate_json(aggs.second)}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

std::vector<ProbePoint> probe_tones(
    const std::function<AudioBuffer(const Segment&)>& restore,
    const std::vector<ToneParams>& grid, const SegmentSpec& spec,
    const STFTParams& params, int smooth_points, int jobs) {
  require(!grid.empty(), "empty tone grid");
  require(smooth_points >= 1 && smooth_points % 2 == 1,
          "smoothing window must be odd");

  std::vector<double> values(grid.size());
  parallel_for(static_cast<int64_t>(grid.size()), jobs, [&](int64_t i) {
    const ToneParams& tone = grid[static_cast<size_t>(i)];
    const Segment seg = split_segment(
        generate_pure_tone(tone.freq_hz, tone.phase, tone.amplitude,
                           spec.total_len, spec.sample_rate),
        spec);
    const SnrResult r = snr_ms(seg, restore(seg), params);
    values[static_cast<size_t>(i)] = r.excluded ? std::nan("") : r.db;
  });

  // The grid is freq-major: contiguous runs share one frequency.
  std::vector<ProbePoint> curve;
  size_t i = 0;
  while (i < grid.size()) {
    size_t j = i;
    double sum = 0.0;
    int64_t n = 0;
    while (j < grid.size() && grid[j].freq_hz == grid[i].freq_hz) {
      if (!std::isnan(values[j])) {
        sum += values[j];
        ++n;
      }
      ++j;
    }
    ProbePoint p;
    p.freq_hz = grid[i].freq_hz;
    p.snr_ms_db = n > 0 ? sum / n : std::nan("");
    curve.push_back(p);
    i = j;
  }

  const int half = smooth_points / 2;
  const int n_pts = static_cast<int>(curve.size());
  for (int k = 0; k < n_pts; ++k) {
    const int h = std::min({half, k, n_pts - 1 - k});
    double sum = 0.0;
    int cnt = 0;
    for (int d = -h; d <= h; ++d) {
      if (std::isnan(curve[static_cast<size_t>(k + d)].snr_ms_db)) continue;
      sum += curve[static_cast<size_t>(k + d)].snr_ms_db;
      ++cnt;
    }
    curve[static_cast<size_t>(k)].smoothed_db = cnt > 0 ? sum / cnt : std::nan("");
  }
  return curve;
}

void write_probe_csv(const std::string& path, const std::vector<ProbePoint>& curve) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "freq_hz,snr_ms_db,snr_ms_smoothed_db\n";
  for (const auto& p : curve)
    out << p.freq_hz << "," << p.snr_ms_db << "," << p.smoothed_db << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace gapfill
