// Copyright (C) 2026 the gapfill authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "gapfill/loss.hpp"

#include "gapfill/common.hpp"
#include "gapfill/network.hpp"

namespace gapfill::nn {

void LossParams::validate() const {
  require(c > 0.0, "loss parameter c must be positive");
  require(lambda >= 0.0, "lambda must be nonnegative");
}

namespace {

void check_shapes(const Tensor& a, const Tensor& b) {
  require(a.shape() == b.shape(), "loss grids must have equal shape");
}

double sq_norm(const double* p, size_t n) {
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) acc += p[i] * p[i];
  return acc;
}

double sq_err(const double* t, const double* p, size_t n) {
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double d = t[i] - p[i];
    acc += d * d;
  }
  return acc;
}

}  // namespace

double loss_nmse(const Tensor& target, const Tensor& pred) {
  check_shapes(target, pred);
  const double energy = sq_norm(target.data(), target.size());
  require(energy > 0.0, "nmse undefined for a zero-energy target");
  return sq_err(target.data(), pred.data(), target.size()) / energy;
}

double loss_f(const Tensor& target, const Tensor& pred, const LossParams& params) {
  check_shapes(target, pred);
  params.validate();
  const double den = 1.0 / params.c + sq_norm(target.data(), target.size());
  return sq_err(target.data(), pred.data(), target.size()) / den;
}

Tensor loss_f_grad(const Tensor& target, const Tensor& pred,
                   const LossParams& params) {
  check_shapes(target, pred);
  params.validate();
  const double den = 1.0 / params.c + sq_norm(target.data(), target.size());
  Tensor grad(pred.shape());
  for (size_t i = 0; i < pred.size(); ++i)
    grad[i] = 2.0 * (pred[i] - target[i]) / den;
  return grad;
}

double total_loss(const Tensor& target, const Tensor& pred, const Network& net,
                  const LossParams& params) {
  return loss_f(target, pred, params) + 0.5 * params.lambda * net.weight_sq_sum();
}

double loss_f_batch(const Tensor& target, const Tensor& pred,
                    const LossParams& params) {
  check_shapes(target, pred);
  params.validate();
  const int n = target.dim(0);
  const size_t per = target.size() / static_cast<size_t>(n);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double* t = target.data() + static_cast<size_t>(i) * per;
    const double* p = pred.data() + static_cast<size_t>(i) * per;
    acc += sq_err(t, p, per) / (1.0 / params.c + sq_norm(t, per));
  }
  return acc / n;
}

Tensor loss_f_batch_grad(const Tensor& target, const Tensor& pred,
                         const LossParams& params) {
  check_shapes(target, pred);
  params.validate();
  const int n = target.dim(0);
  const size_t per = target.size() / static_cast<size_t>(n);
  Tensor grad(pred.shape());
  for (int i = 0; i < n; ++i) {
    const double* t = target.data() + static_cast<size_t>(i) * per;
    const double* p = pred.data() + static_cast<size_t>(i) * per;
    double* g = grad.data() + static_cast<size_t>(i) * per;
    const double den = (1.0 / params.c + sq_norm(t, per)) * n;
    for (size_t k = 0; k < per; ++k) g[k] = 2.0 * (p[k] - t[k]) / den;
  }
  return grad;
}

}  // namespace gapfill::nn
