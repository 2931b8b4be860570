// nn_test_util.hpp  Finite-difference oracles shared by unit and acceptance
// tests. These stay independent of the backward implementation they check.
//
// Copyright (C) 2026 the gapfill authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "gapfill/network.hpp"
#include "gapfill/rng.hpp"

namespace gapfill::testutil {

struct FdStats {
  double max_rel = 0.0;
  int checked = 0;
};

inline double rel_err(double a, double b) {
  const double denom = std::max({std::abs(a), std::abs(b), 1e-8});
  return std::abs(a - b) / denom;
}

// Central finite differences (step h, fourth-order five-point stencil so the
// truncation term stays far below the comparison tolerance) on sampled
// coordinates of `values`, compared against the autodiff gradient in `grad`.
// `loss` re-evaluates the full objective at the current parameter values.
inline FdStats fd_check(std::vector<double>& values, const std::vector<double>& grad,
                        const std::function<double()>& loss, double h,
                        int max_coords, Rng& rng, FdStats stats = {}) {
  const int n = static_cast<int>(values.size());
  const int count = std::min(max_coords, n);
  for (int c = 0; c < count; ++c) {
    const int i = max_coords >= n ? c : rng.uniform_int(n);
    const double saved = values[static_cast<size_t>(i)];
    auto at = [&](double offset) {
      values[static_cast<size_t>(i)] = saved + offset;
      return loss();
    };
    const double fd =
        (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12.0 * h);
    values[static_cast<size_t>(i)] = saved;
    stats.max_rel = std::max(stats.max_rel, rel_err(fd, grad[static_cast<size_t>(i)]));
    ++stats.checked;
  }
  return stats;
}

inline nn::Tensor random_tensor(std::vector<int> shape, Rng& rng, double scale = 1.0) {
  nn::Tensor t(std::move(shape));
  for (auto& v : t.values()) v = scale * rng.normal();
  return t;
}

// A small two-branch config exercising every layer kind:
// conv/relu/bn/reshape in the encoder, fc/deconv in the decoder.
inline nn::NetworkConfig tiny_config(nn::Variant variant) {
  nn::NetworkConfig c;
  c.variant = variant;
  c.code_size = 120;
  c.input_shape = {4, 9, 8};
  c.output_shape = {variant == nn::Variant::Complex ? 2 : 1, 9, 7};
  c.encoder.push_back(nn::LayerSpec::conv(4, 3, 3, 3, 2, 1, 1, 1, 1, 1));
  c.encoder.push_back(nn::LayerSpec::relu());
  c.encoder.push_back(nn::LayerSpec::batch_norm());
  c.encoder.push_back(nn::LayerSpec::reshape({120}));
  c.decoder.push_back(nn::LayerSpec::fully_connected(120, 60));
  c.decoder.push_back(nn::LayerSpec::relu());
  c.decoder.push_back(nn::LayerSpec::batch_norm());
  c.decoder.push_back(nn::LayerSpec::reshape({3, 5, 4}));
  c.decoder.push_back(nn::LayerSpec::deconv(
      3, variant == nn::Variant::Complex ? 2 : 1, 3, 3, 2, 2, 1, 1, 1, 1));
  return c;
}

}  // namespace gapfill::testutil
