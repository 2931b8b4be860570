// train.hpp  Two-phase Adam training loop with periodic validation.
//
// Copyright (C) 2026 the gapfill authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "gapfill/adam.hpp"
#include "gapfill/loss.hpp"
#include "gapfill/network.hpp"

namespace gapfill::nn {

struct TrainSchedule {
  double lr_initial = 1e-3;
  double lr_refine = 1e-4;
  int monitor_every = 2000;
  int64_t phase1_steps = 600000;
  int64_t phase2_steps = 200000;
  int batch_size = 64;

  int64_t total_steps() const { return phase1_steps + phase2_steps; }
  void validate() const;
};

struct TrainExample {
  Tensor input;   // (4, bins, ctx_frames)
  Tensor target;  // (C, bins, gap_frames): |S_g| or Re/Im of S_g
};

// Context tensor plus the true gap-region coefficient grid of one segment.
TrainExample make_train_example(const Segment& seg, const STFTParams& params,
                                Variant variant);

// Stacks examples along a new batch axis.
Tensor stack_inputs(const std::vector<const TrainExample*>& batch);
Tensor stack_targets(const std::vector<const TrainExample*>& batch);

struct MonitorEntry {
  int64_t step = 0;
  double validation_nmse = 0.0;
  double train_loss = 0.0;  // mean F since the previous monitor point
  double lr = 0.0;
};

struct TrainResult {
  std::vector<MonitorEntry> log;
};

// Mean NMSE between predictions and targets over a set (inference mode).
// Zero-energy targets are skipped.
double validation_nmse(Network& net, const std::vector<TrainExample>& examples);

using CheckpointHook = std::function<void(int64_t step, const Network& net,
                                          const AdamState& opt)>;

// Phase 1 at lr_initial, phase 2 at lr_refine; monitoring happens at step 0
// and every monitor_every steps, appending the validation NMSE to the log.
// With a fixed seed the trajectory is bit-reproducible (single-threaded).
TrainResult train(Network& net, Adam& adam,
                  const std::vector<TrainExample>& train_set,
                  const std::vector<TrainExample>& validation_set,
                  const TrainSchedule& schedule, const LossParams& loss,
                  uint64_t seed, const CheckpointHook& hook = nullptr);

}  // namespace gapfill::nn
