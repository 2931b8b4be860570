// run_config.hpp  Structured configuration consumed by the command line.
//
// Copyright (C) 2026 the gapfill authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <string>

#include "gapfill/dataset.hpp"
#include "gapfill/network.hpp"
#include "gapfill/phase_retrieval.hpp"
#include "gapfill/train.hpp"

namespace gapfill {

// Mirrors the module-level parameter types. Parsing rejects unknown keys and
// anything that violates a module invariant.
struct RunConfig {
  SegmentSpec segment = default_segment_spec();
  int stft_window = 512;
  int stft_hop = 128;

  std::string network_preset = "canonical";  // or "toy"
  nn::Variant variant = nn::Variant::Magnitude;
  bool has_explicit_network = false;
  nn::NetworkConfig explicit_network;  // used when has_explicit_network

  nn::TrainSchedule train;
  nn::LossParams loss;
  RetrievalConfig retrieval;

  int dataset_shift = 512;
  double silence_threshold = 1e-4;
  double gap_rms_threshold = 1e-4;
  std::array<double, 3> split_fractions{0.7, 0.2, 0.1};

  int probe_n_freq = 600;
  int probe_n_phase = 4;
  int probe_n_amp = 3;

  uint64_t seed = 1;

  STFTParams stft_params() const {
    return STFTParams::make(stft_window, stft_hop, segment.sample_rate);
  }
  nn::NetworkConfig network_config() const;
  void validate() const;
};

RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

}  // namespace gapfill
