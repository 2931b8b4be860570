// loss.hpp  Reconstruction losses on coefficient grids.
//
// Copyright (C) 2026 the gapfill authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include "gapfill/tensor.hpp"

namespace gapfill::nn {

class Network;

struct LossParams {
  double c = 5.0;        // small-amplitude compensation in the F loss
  double lambda = 0.01;  // l2 regularization weight

  void validate() const;
};

// ||target - pred||^2 / ||target||^2. Zero-energy targets are rejected;
// use loss_f for those.
double loss_nmse(const Tensor& target, const Tensor& pred);

// ||target - pred||^2 / (1/c + ||target||^2): a weighted mix between MSE and
// NMSE whose denominator stays positive for silent targets.
double loss_f(const Tensor& target, const Tensor& pred, const LossParams& params);

// d(loss_f)/d(pred).
Tensor loss_f_grad(const Tensor& target, const Tensor& pred,
                   const LossParams& params);

// loss_f + (lambda/2) * sum of squared decayed weights (kernels and FC
// matrices; biases and batch-norm parameters are not regularized).
double total_loss(const Tensor& target, const Tensor& pred, const Network& net,
                  const LossParams& params);

// Batched variants treating axis 0 as the example axis: mean of the
// per-example losses, each normalized by its own target energy.
double loss_f_batch(const Tensor& target, const Tensor& pred,
                    const LossParams& params);
Tensor loss_f_batch_grad(const Tensor& target, const Tensor& pred,
                         const LossParams& params);

}  // namespace gapfill::nn
