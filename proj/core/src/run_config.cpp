// Copyright (C) 2026 the gapfill authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "gapfill/run_config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "gapfill/common.hpp"

namespace gapfill {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known,
                    const std::string& where) {
  for (const auto& [key, _] : j.items())
    if (!known.count(key))
      throw std::invalid_argument("unknown config key '" + where + "." + key + "'");
}

template <typename T>
void maybe(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

nn::NetworkConfig RunConfig::network_config() const {
  if (has_explicit_network) return explicit_network;
  if (network_preset == "canonical") return nn::NetworkConfig::canonical(variant);
  if (network_preset == "toy") return nn::NetworkConfig::toy(variant);
  throw std::invalid_argument("unknown network preset '" + network_preset + "'");
}

void RunConfig::validate() const {
  gapfill::validate(segment);
  require(stft_window > 0 && stft_hop > 0 && stft_window == 4 * stft_hop,
          "stft geometry must satisfy hop = window/4");
  compute_frame_layout(segment, stft_params());
  train.validate();
  loss.validate();
  retrieval.validate();
  require(dataset_shift > 0, "dataset.shift must be positive");
  require(silence_threshold >= 0.0 && gap_rms_threshold >= 0.0,
          "thresholds must be nonnegative");
  require(probe_n_freq >= 2 && probe_n_phase >= 2 && probe_n_amp >= 2,
          "probe grid counts must be >= 2");
  network_config();  // preset name must resolve
}

RunConfig parse_run_config(const std::string& json_text) {
  json j = json::parse(json_text);
  RunConfig c;
  reject_unknown(j,
                 {"segment", "stft", "network", "train", "loss", "retrieval",
                  "dataset", "probe", "seed"},
                 "");

  if (j.contains("segment")) {
    const auto& s = j.at("segment");
    reject_unknown(s, {"gap_len", "context_len", "sample_rate"}, "segment");
    int gap = c.segment.gap_len, ctxt = c.segment.context_len,
        rate = c.segment.sample_rate;
    maybe(s, "gap_len", gap);
    maybe(s, "context_len", ctxt);
    maybe(s, "sample_rate", rate);
    c.segment = SegmentSpec::make(gap, ctxt, rate);
  }
  if (j.contains("stft")) {
    const auto& s = j.at("stft");
    reject_unknown(s, {"window_len", "hop"}, "stft");
    maybe(s, "window_len", c.stft_window);
    maybe(s, "hop", c.stft_hop);
  }
  if (j.contains("network")) {
    const auto& s = j.at("network");
    reject_unknown(s, {"preset", "variant", "config"}, "network");
    maybe(s, "preset", c.network_preset);
    if (s.contains("variant"))
      c.variant = nn::variant_from_name(s.at("variant").get<std::string>());
    if (s.contains("config")) {
      c.explicit_network = nn::config_from_json(s.at("config").dump());
      c.has_explicit_network = true;
    }
  }
  if (j.contains("train")) {
    const auto& s = j.at("train");
    reject_unknown(s,
                   {"lr_initial", "lr_refine", "monitor_every", "phase1_steps",
                    "phase2_steps", "batch_size"},
                   "train");
    maybe(s, "lr_initial", c.train.lr_initial);
    maybe(s, "lr_refine", c.train.lr_refine);
    maybe(s, "monitor_every", c.train.monitor_every);
    maybe(s, "phase1_steps", c.train.phase1_steps);
    maybe(s, "phase2_steps", c.train.phase2_steps);
    maybe(s, "batch_size", c.train.batch_size);
  }
  if (j.contains("loss")) {
    const auto& s = j.at("loss");
    reject_unknown(s, {"c", "lambda"}, "loss");
    maybe(s, "c", c.loss.c);
    maybe(s, "lambda", c.loss.lambda);
  }
  if (j.contains("retrieval")) {
    const auto& s = j.at("retrieval");
    reject_unknown(s,
                   {"fgl_iterations", "fgl_momentum", "pghi_rel_tolerance",
                    "pghi_gamma_scale", "random_phase_seed", "clamp_context"},
                   "retrieval");
    maybe(s, "fgl_iterations", c.retrieval.fgl_iterations);
    maybe(s, "fgl_momentum", c.retrieval.fgl_momentum);
    maybe(s, "pghi_rel_tolerance", c.retrieval.pghi_rel_tolerance);
    maybe(s, "pghi_gamma_scale", c.retrieval.pghi_gamma_scale);
    maybe(s, "random_phase_seed", c.retrieval.random_phase_seed);
    maybe(s, "clamp_context", c.retrieval.clamp_context);
  }
  if (j.contains("dataset")) {
    const auto& s = j.at("dataset");
    reject_unknown(s,
                   {"shift", "silence_threshold", "gap_rms_threshold",
                    "split_fractions"},
                   "dataset");
    maybe(s, "shift", c.dataset_shift);
    maybe(s, "silence_threshold", c.silence_threshold);
    maybe(s, "gap_rms_threshold", c.gap_rms_threshold);
    if (s.contains("split_fractions")) {
      const auto& f = s.at("split_fractions");
      require(f.is_array() && f.size() == 3, "split_fractions must have 3 entries");
      for (int i = 0; i < 3; ++i)
        c.split_fractions[static_cast<size_t>(i)] = f.at(i).get<double>();
    }
  }
  if (j.contains("probe")) {
    const auto& s = j.at("probe");
    reject_unknown(s, {"n_freq", "n_phase", "n_amp"}, "probe");
    maybe(s, "n_freq", c.probe_n_freq);
    maybe(s, "n_phase", c.probe_n_phase);
    maybe(s, "n_amp", c.probe_n_amp);
  }
  maybe(j, "seed", c.seed);

  c.validate();
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_run_config(text);
}

}  // namespace gapfill
