// Copyright (C) 2026 the gapfill authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "gapfill/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "gapfill/common.hpp"
#include "gapfill/resample.hpp"
#include "gapfill/rng.hpp"
#include "gapfill/wav_io.hpp"

namespace gapfill {

namespace fs = std::filesystem;
using nlohmann::json;

std::string split_name(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Validation: return "validation";
    case Split::Test: return "test";
  }
  return "?";
}

Split split_from_name(const std::string& name) {
  if (name == "train") return Split::Train;
  if (name == "validation") return Split::Validation;
  if (name == "test") return Split::Test;
  throw std::invalid_argument("unknown split '" + name + "'");
}

CorpusManifest CorpusManifest::read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest '" + path + "'");
  CorpusManifest manifest;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j = json::parse(line, nullptr, true);
    ManifestEntry entry;
    entry.path = j.at("path").get<std::string>();
    if (j.contains("split"))
      entry.split = split_from_name(j.at("split").get<std::string>());
    for (const auto& e : manifest.entries)
      if (e.path == entry.path)
        throw std::runtime_error("duplicate manifest path '" + entry.path + "'");
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

AudioBuffer ingest(const std::string& path) { return ingest(path, 16000); }

AudioBuffer ingest(const std::string& path, int target_rate) {
  return resample(read_wav(path), target_rate);
}

AudioBuffer remove_silence(const AudioBuffer& buffer, double threshold) {
  if (buffer.samples.empty()) return buffer;
  const int block = std::max(1, static_cast<int>(std::lround(0.032 * buffer.sample_rate)));
  AudioBuffer out;
  out.sample_rate = buffer.sample_rate;
  const int n = buffer.size();
  for (int start = 0; start < n; start += block) {
    const int len = std::min(block, n - start);
    if (rms(std::span(buffer.samples).subspan(static_cast<size_t>(start),
                                              static_cast<size_t>(len))) >= threshold)
      out.samples.insert(out.samples.end(), buffer.samples.begin() + start,
                         buffer.samples.begin() + start + len);
  }
  return out;
}

std::vector<Segment> segmentize(const AudioBuffer& buffer,
                                const SegmentSpec& spec, int shift,
                                double gap_rms_threshold) {
  validate(spec);
  require(shift > 0, "shift must be positive");
  std::vector<Segment> out;
  for (int start = 0; start + spec.total_len <= buffer.size(); start += shift) {
    Segment seg = split_segment(slice(buffer, start, spec.total_len), spec);
    if (rms(seg.gap) < gap_rms_threshold) continue;
    out.push_back(std::move(seg));
  }
  return out;
}

namespace {

std::array<int64_t, 3> fraction_counts(int64_t n, const std::array<double, 3>& f) {
  double sum = f[0] + f[1] + f[2];
  require(sum > 0.0, "split fractions must sum to a positive value");
  std::array<double, 3> exact{};
  std::array<int64_t, 3> counts{};
  int64_t assigned = 0;
  for (int i = 0; i < 3; ++i) {
    exact[static_cast<size_t>(i)] = n * f[static_cast<size_t>(i)] / sum;
    counts[static_cast<size_t>(i)] =
        static_cast<int64_t>(std::floor(exact[static_cast<size_t>(i)]));
    assigned += counts[static_cast<size_t>(i)];
  }
  // Largest remainder gets the leftovers.
  while (assigned < n) {
    int best = 0;
    double best_rem = -1.0;
    for (int i = 0; i < 3; ++i) {
      const double rem = exact[static_cast<size_t>(i)] - counts[static_cast<size_t>(i)];
      if (rem > best_rem) {
        best_rem = rem;
        best = i;
      }
    }
    ++counts[static_cast<size_t>(best)];
    ++assigned;
  }
  return counts;
}

struct ProcessedFile {
  bool ok = false;
  std::string error;
  std::vector<Segment> segments;
  std::vector<int64_t> offsets;
};

ProcessedFile process_file(const std::string& path, const BuildOptions& options) {
  ProcessedFile result;
  try {
    AudioBuffer audio = ingest(path, options.spec.sample_rate);
    AudioBuffer voiced = remove_silence(audio, options.silence_threshold);
    for (int start = 0; start + options.spec.total_len <= voiced.size();
         start += options.shift) {
      Segment seg = split_segment(slice(voiced, start, options.spec.total_len),
                                  options.spec);
      if (rms(seg.gap) < options.gap_rms_threshold) continue;
      result.segments.push_back(std::move(seg));
      result.offsets.push_back(start);
    }
    result.ok = true;
  } catch (const std::exception& e) {
    result.error = e.what();
  }
  return result;
}

void write_f32(std::ofstream& out, const AudioBuffer& buffer) {
  for (double v : buffer.samples) {
    float f = static_cast<float>(v);
    out.write(reinterpret_cast<const char*>(&f), 4);
  }
}

}  // namespace

BuildStats build_store(const CorpusManifest& manifest, const std::string& dir,
                       const BuildOptions& options) {
  validate(options.spec);
  require(!manifest.entries.empty(), "manifest is empty");

  // Assign untagged files to splits, whole files only.
  const size_t n_files = manifest.entries.size();
  std::vector<Split> file_split(n_files, Split::Train);
  std::vector<size_t> untagged;
  for (size_t i = 0; i < n_files; ++i) {
    if (manifest.entries[i].split) {
      file_split[i] = *manifest.entries[i].split;
    } else {
      untagged.push_back(i);
    }
  }
  if (!untagged.empty()) {
    auto counts = fraction_counts(static_cast<int64_t>(untagged.size()),
                                  options.split_fractions);
    std::vector<size_t> order = untagged;
    Rng rng(options.seed);
    for (size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[static_cast<size_t>(rng.uniform_int(static_cast<int>(i)))]);
    size_t pos = 0;
    const Split slots[3] = {Split::Train, Split::Validation, Split::Test};
    for (int s = 0; s < 3; ++s)
      for (int64_t k = 0; k < counts[static_cast<size_t>(s)]; ++k)
        file_split[order[pos++]] = slots[s];
  }

  // Ingest and segment every file; results keep manifest order so the store
  // is byte-identical for any job count.
  std::vector<ProcessedFile> processed(n_files);
  const int jobs = std::max(1, options.jobs);
  if (jobs == 1 || n_files <= 1) {
    for (size_t i = 0; i < n_files; ++i)
      processed[i] = process_file(manifest.entries[i].path, options);
  } else {
    std::atomic<size_t> next{0};
    auto worker = [&]() {
      for (;;) {
        const size_t i = next.fetch_add(1);
        if (i >= n_files) return;
        processed[i] = process_file(manifest.entries[i].path, options);
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < std::min<int>(jobs, static_cast<int>(n_files)); ++t)
      pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  BuildStats stats;
  for (size_t i = 0; i < n_files; ++i) {
    if (!processed[i].ok) {
      ++stats.files_failed;
      stats.errors.push_back(manifest.entries[i].path + ": " + processed[i].error);
      continue;
    }
    ++stats.files_ok;
    stats.split_counts[static_cast<size_t>(file_split[i])] +=
        static_cast<int64_t>(processed[i].segments.size());
  }
  if (stats.total() == 0)
    throw std::runtime_error("no segments survived ingestion");
  if (options.dry_run) return stats;

  fs::create_directories(dir);
  std::ofstream index(fs::path(dir) / "index.jsonl");
  std::ofstream samples(fs::path(dir) / "samples.f32", std::ios::binary);
  if (!index || !samples)
    throw std::runtime_error("cannot write store under '" + dir + "'");

  int64_t id = 0;
  for (size_t i = 0; i < n_files; ++i) {
    if (!processed[i].ok) continue;
    for (size_t s = 0; s < processed[i].segments.size(); ++s) {
      json rec;
      rec["id"] = id;
      rec["source"] = manifest.entries[i].path;
      rec["offset"] = processed[i].offsets[s];
      rec["split"] = split_name(file_split[i]);
      index << rec.dump() << "\n";
      write_f32(samples, concat_segment(processed[i].segments[s]));
      ++id;
    }
  }

  json meta;
  meta["schema_version"] = 1;
  meta["label"] = manifest.label;
  meta["segment"] = {{"gap_len", options.spec.gap_len},
                     {"context_len", options.spec.context_len},
                     {"sample_rate", options.spec.sample_rate}};
  meta["counts"] = {{"train", stats.split_counts[0]},
                    {"validation", stats.split_counts[1]},
                    {"test", stats.split_counts[2]}};
  std::ofstream meta_out(fs::path(dir) / "store.json");
  meta_out << meta.dump(2) << "\n";
  if (!index || !samples || !meta_out)
    throw std::runtime_error("store write failed under '" + dir + "'");
  return stats;
}

SegmentStore SegmentStore::open(const std::string& dir) {
  SegmentStore store;
  store.dir_ = dir;
  std::ifstream meta_in(fs::path(dir) / "store.json");
  if (!meta_in) throw std::runtime_error("missing store.json under '" + dir + "'");
  json meta = json::parse(meta_in);
  const auto& seg = meta.at("segment");
  store.spec_ = SegmentSpec::make(seg.at("gap_len").get<int>(),
                                  seg.at("context_len").get<int>(),
                                  seg.at("sample_rate").get<int>());

  std::ifstream index(fs::path(dir) / "index.jsonl");
  if (!index) throw std::runtime_error("missing index.jsonl under '" + dir + "'");
  std::string line;
  while (std::getline(index, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    StoredSegment rec;
    rec.id = j.at("id").get<int64_t>();
    rec.source = j.at("source").get<std::string>();
    rec.offset = j.at("offset").get<int64_t>();
    rec.split = split_from_name(j.at("split").get<std::string>());
    store.index_.push_back(std::move(rec));
  }

  const auto sample_file = fs::path(dir) / "samples.f32";
  const auto expected = static_cast<uintmax_t>(store.index_.size()) *
                        static_cast<uintmax_t>(store.spec_.total_len) * 4;
  if (!fs::exists(sample_file) || fs::file_size(sample_file) != expected)
    throw std::runtime_error("samples.f32 size inconsistent with index");
  return store;
}

std::array<int64_t, 3> SegmentStore::split_counts() const {
  std::array<int64_t, 3> counts{0, 0, 0};
  for (const auto& rec : index_) ++counts[static_cast<size_t>(rec.split)];
  return counts;
}

std::vector<int64_t> SegmentStore::ids(Split split) const {
  std::vector<int64_t> out;
  for (const auto& rec : index_)
    if (rec.split == split) out.push_back(rec.id);
  return out;
}

Segment SegmentStore::load(int64_t id) const {
  require(id >= 0 && id < static_cast<int64_t>(index_.size()),
          "segment id out of range");
  std::ifstream samples(fs::path(dir_) / "samples.f32", std::ios::binary);
  if (!samples) throw std::runtime_error("cannot open samples.f32");
  samples.seekg(id * static_cast<int64_t>(spec_.total_len) * 4);
  AudioBuffer buffer;
  buffer.sample_rate = spec_.sample_rate;
  buffer.samples.resize(static_cast<size_t>(spec_.total_len));
  for (auto& v : buffer.samples) {
    float f;
    samples.read(reinterpret_cast<char*>(&f), 4);
    v = static_cast<double>(f);
  }
  if (!samples) throw std::runtime_error("truncated samples.f32");
  return split_segment(buffer, spec_);
}

}  // namespace gapfill
