// Copyright (C) 2026 the gapfill authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "gapfill/lpc.hpp"

#include <cmath>

#include "gapfill/common.hpp"

namespace gapfill {

BurgModel burg_fit(std::span<const double> x, int order) {
  const int n = static_cast<int>(x.size());
  require(order >= 1, "order must be >= 1");
  require(n > order, "context must be longer than the model order");

  BurgModel model;
  model.order = order;
  model.coefficients.assign(static_cast<size_t>(order), 0.0);
  model.reflection_coeffs.assign(static_cast<size_t>(order), 0.0);

  std::vector<double> f(x.begin(), x.end());
  std::vector<double> b(x.begin(), x.end());

  double energy = 0.0;
  for (double v : x) energy += v * v;
  if (energy <= 0.0) return model;  // zero-energy context

  // The prediction error collapses by many orders of magnitude on nearly
  // deterministic contexts (a pure tone drives reflection coefficients to
  // +-1), so the denominator is accumulated directly each stage; the
  // recursive update loses all relative accuracy through its (1 - k^2)
  // factor there. Still O(order * N) overall.
  const double den_floor = 2.0 * energy * 1e-28;

  // Error-filter coefficients, alpha[0] = 1.
  std::vector<double> alpha(static_cast<size_t>(order) + 1, 0.0);
  alpha[0] = 1.0;

  for (int m = 1; m <= order; ++m) {
    double num = 0.0, den = 0.0;
    for (int t = m; t < n; ++t) {
      const double ft = f[static_cast<size_t>(t)];
      const double bt = b[static_cast<size_t>(t - 1)];
      num += ft * bt;
      den += ft * ft + bt * bt;
    }
    if (den <= den_floor) break;  // prediction error exhausted

    double k = 2.0 * num / den;
    if (k > 1.0) k = 1.0 - 1e-12;
    if (k < -1.0) k = -(1.0 - 1e-12);
    model.reflection_coeffs[static_cast<size_t>(m - 1)] = k;

    for (int i = 1, j = m - 1; i <= j; ++i, --j) {
      const double ai = alpha[static_cast<size_t>(i)], aj = alpha[static_cast<size_t>(j)];
      alpha[static_cast<size_t>(i)] = ai - k * aj;
      if (i != j) alpha[static_cast<size_t>(j)] = aj - k * ai;
    }
    alpha[static_cast<size_t>(m)] = -k;

    for (int t = n - 1; t >= m; --t) {
      const double ft = f[static_cast<size_t>(t)];
      const double bt = b[static_cast<size_t>(t - 1)];
      f[static_cast<size_t>(t)] = ft - k * bt;
      b[static_cast<size_t>(t)] = bt - k * ft;
    }
  }

  for (int i = 1; i <= order; ++i)
    model.coefficients[static_cast<size_t>(i - 1)] = -alpha[static_cast<size_t>(i)];
  return model;
}

BurgModel burg_fit(const AudioBuffer& context, int order) {
  return burg_fit(std::span<const double>(context.samples), order);
}

AudioBuffer extrapolate(const BurgModel& model, const AudioBuffer& context,
                        int n) {
  require(n >= 0, "n must be nonnegative");
  require(context.size() >= model.order,
          "context shorter than the model order");
  const int p = model.order;
  std::vector<double> work(context.samples.end() - p, context.samples.end());
  work.resize(static_cast<size_t>(p + n));
  for (int t = 0; t < n; ++t) {
    double v = 0.0;
    const double* hist = work.data() + p + t;
    for (int k = 1; k <= p; ++k) v += model.coefficients[static_cast<size_t>(k - 1)] * hist[-k];
    work[static_cast<size_t>(p + t)] = v;
  }
  return AudioBuffer(std::vector<double>(work.begin() + p, work.end()),
                     context.sample_rate);
}

AudioBuffer crossfade_sq_cos(const AudioBuffer& fwd, const AudioBuffer& bwd) {
  require(fwd.size() == bwd.size(), "crossfade inputs must have equal length");
  const int n = fwd.size();
  AudioBuffer out;
  out.sample_rate = fwd.sample_rate;
  out.samples.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    // Single-sample gap: no ramp to speak of, mix evenly.
    const double c = n > 1 ? std::cos(kPi * i / (2.0 * (n - 1))) : std::sqrt(0.5);
    const double w = c * c;
    out.samples[static_cast<size_t>(i)] = w * fwd[i] + (1.0 - w) * bwd[i];
  }
  return out;
}

AudioBuffer lpc_inpaint(const Segment& seg, int order) {
  require(seg.spec.context_len > order,
          "context_len must exceed the predictor order");
  const int gap = seg.spec.gap_len;
  AudioBuffer fwd = extrapolate(burg_fit(seg.before, order), seg.before, gap);
  AudioBuffer rev_after = reversed(seg.after);
  AudioBuffer bwd =
      reversed(extrapolate(burg_fit(rev_after, order), rev_after, gap));
  return crossfade_sq_cos(fwd, bwd);
}

}  // namespace gapfill
