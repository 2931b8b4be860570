// lpc.hpp  Burg-fitted linear prediction and two-sided gap extrapolation.
//
// Copyright (C) 2026 the gapfill authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <span>
#include <vector>

#include "gapfill/segment.hpp"

namespace gapfill {

// One-step predictor x^[n] = sum_k coefficients[k-1] * x[n-k].
struct BurgModel {
  int order = 0;
  std::vector<double> coefficients;      // c_1..c_p
  std::vector<double> reflection_coeffs;  // k_1..k_p, each in [-1, 1]
};

// Lattice recursion minimizing the mean forward+backward prediction error,
// with Andersen's O(p*N) denominator update. A zero-energy context yields an
// all-zero model; order >= context length is rejected.
BurgModel burg_fit(const AudioBuffer& context, int order);
BurgModel burg_fit(std::span<const double> context, int order);

// Recursively emits n predictions, feeding them back as history.
AudioBuffer extrapolate(const BurgModel& model, const AudioBuffer& context,
                        int n);

// out[n] = w[n]*fwd[n] + (1-w[n])*bwd[n], w[n] = cos^2(pi*n/(2*(L-1))).
AudioBuffer crossfade_sq_cos(const AudioBuffer& fwd, const AudioBuffer& bwd);

// Forward extrapolation of the before-context, backward extrapolation of the
// after-context (as forward prediction on its reversal), mixed by the
// squared-cosine weights. Returns the restored gap, L_g samples.
AudioBuffer lpc_inpaint(const Segment& seg, int order = 1000);

}  // namespace gapfill
