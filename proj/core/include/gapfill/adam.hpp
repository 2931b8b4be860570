// adam.hpp  Adam updates over a parameter list.
//
// Copyright (C) 2026 the gapfill authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <vector>

#include "gapfill/layers.hpp"

namespace gapfill::nn {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// First/second moment buffers, aligned with the trainable parameter list.
struct AdamState {
  std::vector<std::vector<double>> m, v;
};

class Adam {
 public:
  Adam(std::vector<Param*> params, AdamConfig config = {});

  // One bias-corrected update from the gradients currently stored on the
  // parameters. `t` is the 1-based global step count.
  void step(double lr, int64_t t);

  const AdamState& state() const { return state_; }
  void restore_state(AdamState state);

 private:
  std::vector<Param*> params_;
  AdamConfig config_;
  AdamState state_;
};

}  // namespace gapfill::nn
