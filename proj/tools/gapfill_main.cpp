// gapfill_main.cpp  Command-line front end: dataset building, training,
// inpainting, evaluation, and the pure-tone probe.
//
// Copyright (C) 2026 the gapfill authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gapfill/dataset.hpp"
#include "gapfill/evaluation.hpp"
#include "gapfill/inpaint.hpp"
#include "gapfill/lpc.hpp"
#include "gapfill/run_config.hpp"
#include "gapfill/wav_io.hpp"

namespace fs = std::filesystem;
using namespace gapfill;

namespace {

struct CommonArgs {
  std::string config_path;
  uint64_t seed = 0;
  bool seed_set = false;
};

RunConfig load_config(const CommonArgs& args) {
  RunConfig config =
      args.config_path.empty() ? RunConfig{} : load_run_config(args.config_path);
  if (args.seed_set) config.seed = args.seed;
  return config;
}

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON run configuration")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", args.seed, "random seed (overrides config)")
      ->envname("GAPFILL_SEED")
      ->each([&args](const std::string&) { args.seed_set = true; });
}

// ---------------------------------------------------------------- dataset --

struct DatasetArgs {
  CommonArgs common;
  std::string manifest;
  std::string out_dir;
  bool dry_run = false;
  int jobs = 1;
};

int run_dataset_build(const DatasetArgs& args) {
  if (!fs::exists(args.manifest)) {
    std::cerr << "gapfill: manifest not found: " << args.manifest << "\n";
    return 2;
  }
  RunConfig config = load_config(args.common);
  if (!args.dry_run && args.out_dir.empty()) {
    std::cerr << "gapfill: --out is required unless --dry-run\n";
    return 2;
  }

  CorpusManifest manifest = CorpusManifest::read_jsonl(args.manifest);
  BuildOptions options;
  options.spec = config.segment;
  options.shift = config.dataset_shift;
  options.silence_threshold = config.silence_threshold;
  options.gap_rms_threshold = config.gap_rms_threshold;
  options.split_fractions = config.split_fractions;
  options.seed = config.seed;
  options.jobs = args.jobs;
  options.dry_run = args.dry_run;

  BuildStats stats = build_store(manifest, args.out_dir, options);
  for (const auto& err : stats.errors) std::cerr << "skipped: " << err << "\n";

  const double total = static_cast<double>(stats.total());
  std::printf("%-12s %12s %12s\n", "split", "segments", "percent");
  const char* names[3] = {"train", "validation", "test"};
  for (int i = 0; i < 3; ++i)
    std::printf("%-12s %12" PRId64 " %11.1f%%\n", names[i], stats.split_counts[i],
                100.0 * stats.split_counts[i] / total);
  std::printf("%-12s %12" PRId64 "\n", "total", stats.total());
  if (args.dry_run) std::printf("(dry run: nothing written)\n");
  return 0;
}

// ------------------------------------------------------------------ train --

struct TrainArgs {
  CommonArgs common;
  std::string store_dir;
  std::string variant = "magnitude";
  std::string out_path;
  std::string resume_path;
  int64_t phase1 = -1, phase2 = -1;
  int batch = -1;
  int monitor = -1;
  int64_t max_segments = 0;
};

std::vector<nn::TrainExample> examples_from_store(const SegmentStore& store,
                                                  Split split,
                                                  const STFTParams& params,
                                                  nn::Variant variant,
                                                  int64_t max_segments) {
  std::vector<nn::TrainExample> out;
  for (int64_t id : store.ids(split)) {
    if (max_segments > 0 && static_cast<int64_t>(out.size()) >= max_segments) break;
    out.push_back(nn::make_train_example(store.load(id), params, variant));
  }
  return out;
}

int run_train(const TrainArgs& args) {
  RunConfig config = load_config(args.common);
  config.variant = nn::variant_from_name(args.variant);
  if (args.phase1 >= 0) config.train.phase1_steps = args.phase1;
  if (args.phase2 >= 0) config.train.phase2_steps = args.phase2;
  if (args.batch > 0) config.train.batch_size = args.batch;
  if (args.monitor > 0) config.train.monitor_every = args.monitor;
  config.validate();

  const STFTParams params = config.stft_params();
  SegmentStore store = SegmentStore::open(args.store_dir);
  auto train_set = examples_from_store(store, Split::Train, params,
                                       config.variant, args.max_segments);
  auto valid_set = examples_from_store(store, Split::Validation, params,
                                       config.variant, args.max_segments);
  if (train_set.empty()) {
    std::cerr << "gapfill: store has no training segments\n";
    return 2;
  }

  std::unique_ptr<nn::Network> net;
  std::unique_ptr<nn::Adam> adam;
  if (!args.resume_path.empty()) {
    auto loaded = nn::load_checkpoint(args.resume_path);
    net = std::move(loaded.net);
    if (net->config().variant != config.variant) {
      std::cerr << "gapfill: checkpoint variant does not match --variant\n";
      return 2;
    }
    adam = std::make_unique<nn::Adam>(net->trainable_params());
    if (!loaded.adam_m.empty())
      adam->restore_state({std::move(loaded.adam_m), std::move(loaded.adam_v)});
  } else {
    net = std::make_unique<nn::Network>(config.network_config());
    Rng rng(config.seed);
    net->init_params(rng);
    adam = std::make_unique<nn::Adam>(net->trainable_params());
  }

  const std::string log_path = args.out_path + ".monitor.csv";
  std::ofstream log(log_path);
  log << "step,validation_nmse,train_f,lr\n";

  nn::CheckpointHook hook = [&](int64_t step, const nn::Network& snapshot,
                                const nn::AdamState& opt) {
    nn::save_checkpoint(args.out_path, snapshot, &opt);
    (void)step;
  };

  auto result = nn::train(*net, *adam, train_set, valid_set, config.train,
                          config.loss, config.seed, hook);
  for (const auto& entry : result.log) {
    std::printf("step %8" PRId64 "  validation nmse %.6f  train F %.6f  lr %g\n",
                entry.step, entry.validation_nmse, entry.train_loss, entry.lr);
    log << entry.step << "," << entry.validation_nmse << "," << entry.train_loss
        << "," << entry.lr << "\n";
  }
  nn::save_checkpoint(args.out_path, *net, &adam->state());
  std::printf("checkpoint written to %s (monitor log: %s)\n",
              args.out_path.c_str(), log_path.c_str());
  return 0;
}

// ---------------------------------------------------------------- inpaint --

struct InpaintArgs {
  CommonArgs common;
  std::string in_path, out_path, truth_path, model_path;
  std::string method = "lpc";
  int64_t gap_start = -1;
  int64_t gap_len = -1;
  int lpc_order = 1000;
};

int run_inpaint(const InpaintArgs& args) {
  RunConfig config = load_config(args.common);
  AudioBuffer input = read_wav(args.in_path);

  const int context = config.segment.context_len;
  const int64_t gap_start = args.gap_start;
  const int64_t gap_len = args.gap_len;
  if (gap_start < context ||
      gap_start + gap_len + context > static_cast<int64_t>(input.size())) {
    std::cerr << "gapfill: gap span (with " << context
              << "-sample contexts) does not fit inside the file\n";
    return 2;
  }
  const SegmentSpec spec =
      SegmentSpec::make(static_cast<int>(gap_len), context, input.sample_rate);
  const Segment seg = split_segment(
      slice(input, static_cast<int>(gap_start) - context, spec.total_len), spec);

  AudioBuffer restored_excerpt;
  if (args.method == "lpc") {
    restored_excerpt = splice_gap(seg, lpc_inpaint(seg, args.lpc_order));
  } else if (args.method == "magnitude" || args.method == "complex") {
    if (args.model_path.empty()) {
      std::cerr << "gapfill: --model is required for method " << args.method << "\n";
      return 2;
    }
    auto loaded = nn::load_checkpoint(args.model_path);
    if (nn::variant_name(loaded.net->config().variant) != args.method) {
      std::cerr << "gapfill: model variant is "
                << nn::variant_name(loaded.net->config().variant)
                << ", not " << args.method << "\n";
      return 2;
    }
    restored_excerpt =
        nn::inpaint(*loaded.net, seg, config.stft_params(), config.retrieval);
  } else {
    std::cerr << "gapfill: unknown method '" << args.method << "'\n";
    return 2;
  }

  AudioBuffer output = input;
  for (int i = 0; i < spec.total_len; ++i)
    output.samples[static_cast<size_t>(gap_start) - context + i] =
        restored_excerpt[i];
  write_wav(args.out_path, output);
  std::printf("restored %s -> %s\n", args.in_path.c_str(), args.out_path.c_str());

  if (!args.truth_path.empty()) {
    AudioBuffer truth = read_wav(args.truth_path);
    if (truth.size() != input.size()) {
      std::cerr << "gapfill: truth file length mismatch\n";
      return 2;
    }
    const Segment truth_seg = split_segment(
        slice(truth, static_cast<int>(gap_start) - context, spec.total_len), spec);
    const SnrResult td = snr_td(truth_seg, restored_excerpt);
    const SnrResult ms = snr_ms(truth_seg, restored_excerpt, config.stft_params());
    std::printf("snr_td %.2f dB%s\nsnr_ms %.2f dB%s\n", td.db,
                td.capped ? " (capped)" : "", ms.db, ms.capped ? " (capped)" : "");
  }
  return 0;
}

// --------------------------------------------------------------- evaluate --

struct EvaluateArgs {
  CommonArgs common;
  std::string store_dir;
  std::string methods = "lpc";
  std::vector<std::string> model_paths;
  std::string out_dir = ".";
  std::string extension = "all";
  std::string split = "test";
  int jobs = 1;
  int64_t limit = 0;
  int lpc_order = 1000;
};

int run_evaluate(const EvaluateArgs& args) {
  RunConfig config = load_config(args.common);
  const STFTParams params = config.stft_params();
  SegmentStore store = SegmentStore::open(args.store_dir);

  std::map<std::string, std::shared_ptr<nn::Network>> models;
  for (const auto& path : args.model_paths) {
    auto loaded = nn::load_checkpoint(path);
    models[nn::variant_name(loaded.net->config().variant)] =
        std::shared_ptr<nn::Network>(std::move(loaded.net));
  }

  // Short-gap stores feed the fixed-size network through gap extension.
  const bool needs_extension = store.spec().gap_len < config.segment.gap_len;
  std::vector<GapExtensionMode> modes;
  if (args.extension == "all") {
    modes = {GapExtensionMode::Forward, GapExtensionMode::Backward,
             GapExtensionMode::Centered};
  } else {
    modes = {extension_from_name(args.extension)};
  }

  auto make_network_method = [&](const std::string& name) {
    std::vector<NamedMethod> out;
    auto it = models.find(name);
    if (it == models.end())
      throw std::invalid_argument("method '" + name +
                                  "' needs a --model checkpoint of that variant");
    std::shared_ptr<nn::Network> net = it->second;
    if (!needs_extension) {
      out.push_back({name, [net, params, &config](const Segment& seg) {
                       return nn::inpaint(*net, seg, params, config.retrieval);
                     }});
      return out;
    }
    for (GapExtensionMode mode : modes) {
      out.push_back(
          {name + "@" + extension_name(mode),
           [net, params, &config, mode](const Segment& seg) {
             ExtendedGapSegment ext = extend_gap(seg, mode, config.segment);
             int offset = 0;
             Segment view = network_view(ext, config.segment, &offset);
             AudioBuffer restored =
                 nn::inpaint(*net, view, params, config.retrieval);
             return splice_restored_view(ext, config.segment, restored, offset);
           }});
    }
    return out;
  };

  std::vector<NamedMethod> methods;
  std::stringstream list(args.methods);
  std::string name;
  while (std::getline(list, name, ',')) {
    if (name.empty()) continue;
    if (name == "zero") {
      methods.push_back({"zero", [](const Segment& seg) {
                           AudioBuffer silent;
                           silent.sample_rate = seg.spec.sample_rate;
                           silent.samples.assign(
                               static_cast<size_t>(seg.spec.gap_len), 0.0);
                           return splice_gap(seg, silent);
                         }});
    } else if (name == "identity") {
      methods.push_back(
          {"identity", [](const Segment& seg) { return concat_segment(seg); }});
    } else if (name == "lpc") {
      const int order = args.lpc_order;
      methods.push_back({"lpc", [order](const Segment& seg) {
                           return splice_gap(seg, lpc_inpaint(seg, order));
                         }});
    } else if (name == "magnitude" || name == "complex") {
      for (auto& m : make_network_method(name)) methods.push_back(std::move(m));
    } else {
      std::cerr << "gapfill: unknown method '" << name << "'\n";
      return 2;
    }
  }
  if (methods.empty()) {
    std::cerr << "gapfill: no methods selected\n";
    return 2;
  }

  std::vector<std::pair<int64_t, Segment>> segments;
  for (int64_t id : store.ids(split_from_name(args.split))) {
    if (args.limit > 0 && static_cast<int64_t>(segments.size()) >= args.limit) break;
    segments.emplace_back(id, store.load(id));
  }
  if (segments.empty()) {
    std::cerr << "gapfill: split '" << args.split << "' is empty\n";
    return 2;
  }

  EvalReport report = evaluate_dataset(segments, methods, params, args.jobs);
  fs::create_directories(args.out_dir);
  const std::string csv = (fs::path(args.out_dir) / "report.csv").string();
  const std::string jsn = (fs::path(args.out_dir) / "aggregates.json").string();
  write_report_csv(csv, report);
  write_report_json(jsn, report);

  std::printf("%-24s %12s %12s %12s %12s\n", "method", "td mean", "td std",
              "ms mean", "ms std");
  for (const auto& [mname, aggs] : report.aggregates)
    std::printf("%-24s %12.2f %12.2f %12.2f %12.2f\n", mname.c_str(),
                aggs.first.mean, aggs.first.stddev, aggs.second.mean,
                aggs.second.stddev);
  std::printf("wrote %s and %s\n", csv.c_str(), jsn.c_str());
  return 0;
}

// ------------------------------------------------------------ probe-tones --

struct ProbeArgs {
  CommonArgs common;
  std::string model_path;
  std::string out_path = "probe_tones.csv";
  int n_freq = -1, n_phase = -1, n_amp = -1;
  int jobs = 1;
};

int run_probe(const ProbeArgs& args) {
  RunConfig config = load_config(args.common);
  if (args.n_freq > 0) config.probe_n_freq = args.n_freq;
  if (args.n_phase > 0) config.probe_n_phase = args.n_phase;
  if (args.n_amp > 0) config.probe_n_amp = args.n_amp;
  config.validate();

  auto loaded = nn::load_checkpoint(args.model_path);
  std::shared_ptr<nn::Network> net(std::move(loaded.net));
  const STFTParams params = config.stft_params();

  auto grid = pure_tone_grid(config.probe_n_freq, config.probe_n_phase,
                             config.probe_n_amp);
  auto restore = [net, params, &config](const Segment& seg) {
    return nn::inpaint(*net, seg, params, config.retrieval);
  };
  auto curve = probe_tones(restore, grid, config.segment, params, 25, args.jobs);
  write_probe_csv(args.out_path, curve);
  std::printf("wrote %s (%zu frequencies)\n", args.out_path.c_str(), curve.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gapfill: restore missing audio from its context"};
  app.require_subcommand(1);

  DatasetArgs dataset_args;
  CLI::App* dataset = app.add_subcommand("dataset", "dataset operations");
  dataset->require_subcommand(1);
  CLI::App* build = dataset->add_subcommand("build", "build a segment store");
  build->add_option("--manifest", dataset_args.manifest, "JSONL corpus manifest")
      ->required();
  build->add_option("--out", dataset_args.out_dir, "output store directory");
  build->add_flag("--dry-run", dataset_args.dry_run, "count only, write nothing");
  build->add_option("--jobs", dataset_args.jobs, "parallel ingestion workers");
  add_common(build, dataset_args.common);

  TrainArgs train_args;
  CLI::App* train = app.add_subcommand("train", "train a context encoder");
  train->add_option("--store", train_args.store_dir, "segment store")->required();
  train->add_option("--variant", train_args.variant, "magnitude|complex")
      ->check(CLI::IsMember({"magnitude", "complex"}));
  train->add_option("--out", train_args.out_path, "checkpoint path")->required();
  train->add_option("--resume", train_args.resume_path, "resume checkpoint")
      ->check(CLI::ExistingFile);
  train->add_option("--steps", train_args.phase1, "phase-1 step count");
  train->add_option("--steps2", train_args.phase2, "phase-2 step count");
  train->add_option("--batch", train_args.batch, "batch size");
  train->add_option("--monitor-every", train_args.monitor, "monitor interval");
  train->add_option("--max-segments", train_args.max_segments,
                    "cap segments loaded per split (0 = all)");
  add_common(train, train_args.common);

  InpaintArgs inpaint_args;
  CLI::App* inpaint = app.add_subcommand("inpaint", "restore a declared gap");
  inpaint->add_option("--in", inpaint_args.in_path, "input wav")->required();
  inpaint->add_option("--gap-start", inpaint_args.gap_start, "gap start (samples)")
      ->required();
  inpaint->add_option("--gap-len", inpaint_args.gap_len, "gap length (samples)")
      ->required();
  inpaint->add_option("--method", inpaint_args.method, "lpc|magnitude|complex");
  inpaint->add_option("--model", inpaint_args.model_path, "network checkpoint");
  inpaint->add_option("--out", inpaint_args.out_path, "output wav")->required();
  inpaint->add_option("--truth", inpaint_args.truth_path,
                      "ground-truth wav for SNR reporting");
  inpaint->add_option("--order", inpaint_args.lpc_order, "LPC order");
  add_common(inpaint, inpaint_args.common);

  EvaluateArgs eval_args;
  CLI::App* evaluate = app.add_subcommand("evaluate", "evaluate methods on a store");
  evaluate->add_option("--store", eval_args.store_dir, "segment store")->required();
  evaluate->add_option("--methods", eval_args.methods,
                       "comma list: zero,identity,lpc,magnitude,complex");
  evaluate->add_option("--model", eval_args.model_paths,
                       "network checkpoint (repeatable)");
  evaluate->add_option("--out-dir", eval_args.out_dir, "report directory");
  evaluate->add_option("--extension", eval_args.extension,
                       "short-gap extension: forward|backward|centered|all");
  evaluate->add_option("--split", eval_args.split, "train|validation|test");
  evaluate->add_option("--jobs", eval_args.jobs, "parallel workers");
  evaluate->add_option("--limit", eval_args.limit, "cap evaluated segments (0 = all)");
  evaluate->add_option("--order", eval_args.lpc_order, "LPC order");
  add_common(evaluate, eval_args.common);

  ProbeArgs probe_args;
  CLI::App* probe = app.add_subcommand("probe-tones", "pure-tone response curve");
  probe->add_option("--model", probe_args.model_path, "network checkpoint")
      ->required()
      ->check(CLI::ExistingFile);
  probe->add_option("--out", probe_args.out_path, "output csv");
  probe->add_option("--n-freq", probe_args.n_freq, "frequency count");
  probe->add_option("--n-phase", probe_args.n_phase, "phase count");
  probe->add_option("--n-amp", probe_args.n_amp, "amplitude count");
  probe->add_option("--jobs", probe_args.jobs, "parallel workers");
  add_common(probe, probe_args.common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (build->parsed()) return run_dataset_build(dataset_args);
    if (train->parsed()) return run_train(train_args);
    if (inpaint->parsed()) return run_inpaint(inpaint_args);
    if (evaluate->parsed()) return run_evaluate(eval_args);
    if (probe->parsed()) return run_probe(probe_args);
  } catch (const std::invalid_argument& e) {
    std::cerr << "gapfill: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "gapfill: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
