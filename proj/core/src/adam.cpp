// Copyright (C) 2026 the gapfill authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "gapfill/adam.hpp"

#include <cmath>

#include "gapfill/common.hpp"

namespace gapfill::nn {

Adam::Adam(std::vector<Param*> params, AdamConfig config)
    : params_(std::move(params)), config_(config) {
  state_.m.resize(params_.size());
  state_.v.resize(params_.size());
  for (size_t i = 0; i < params_.size(); ++i) {
    state_.m[i].assign(params_[i]->value.size(), 0.0);
    state_.v[i].assign(params_[i]->value.size(), 0.0);
  }
}

void Adam::restore_state(AdamState state) {
  require(state.m.size() == params_.size() && state.v.size() == params_.size(),
          "adam state size mismatch");
  for (size_t i = 0; i < params_.size(); ++i)
    require(state.m[i].size() == params_[i]->value.size() &&
                state.v[i].size() == params_[i]->value.size(),
            "adam state tensor size mismatch");
  state_ = std::move(state);
}

void Adam::step(double lr, int64_t t) {
  require(t >= 1, "step count must be >= 1");
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double corr1 = 1.0 - std::pow(b1, static_cast<double>(t));
  const double corr2 = 1.0 - std::pow(b2, static_cast<double>(t));
  for (size_t i = 0; i < params_.size(); ++i) {
    Param* p = params_[i];
    require(p->value.has_grad(), "adam step without gradients");
    auto& values = p->value.values();
    const auto& grad = p->value.grad();
    auto& m = state_.m[i];
    auto& v = state_.v[i];
    for (size_t k = 0; k < values.size(); ++k) {
      const double g = grad[k];
      m[k] = b1 * m[k] + (1.0 - b1) * g;
      v[k] = b2 * v[k] + (1.0 - b2) * g * g;
      const double mhat = m[k] / corr1;
      const double vhat = v[k] / corr2;
      values[k] -= lr * mhat / (std::sqrt(vhat) + config_.eps);
    }
  }
}

}  // namespace gapfill::nn
