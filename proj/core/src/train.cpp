// Copyright (C) 2026 the gapfill authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "gapfill/train.hpp"

#include <algorithm>
#include <cmath>

#include "gapfill/common.hpp"

namespace gapfill::nn {

void TrainSchedule::validate() const {
  require(lr_initial > 0.0 && lr_refine > 0.0, "learning rates must be positive");
  require(monitor_every > 0, "monitor_every must be positive");
  require(phase1_steps >= 0 && phase2_steps >= 0, "step counts must be >= 0");
  require(batch_size > 0, "batch_size must be positive");
}

TrainExample make_train_example(const Segment& seg, const STFTParams& params,
                                Variant variant) {
  const FrameLayout layout = compute_frame_layout(seg.spec, params);
  ContextTensor ctx = prepare_context(seg, params);

  TrainExample ex;
  ex.input = Tensor({4, ctx.n_bins, ctx.n_frames});
  std::copy(ctx.data.begin(), ctx.data.end(), ex.input.values().begin());

  const TFMatrix full = stft(concat_segment(seg), params, layout.total_frames, 0);
  const TFMatrix gap = gap_region_frames(full, layout);
  const int channels = variant == Variant::Complex ? 2 : 1;
  ex.target = Tensor({channels, gap.n_bins, gap.n_frames});
  for (int bin = 0; bin < gap.n_bins; ++bin) {
    for (int k = 0; k < gap.n_frames; ++k) {
      const auto c = gap.at(bin, k);
      const size_t base = static_cast<size_t>(bin) * gap.n_frames + k;
      if (variant == Variant::Complex) {
        ex.target[base] = c.real();
        ex.target[ex.target.size() / 2 + base] = c.imag();
      } else {
        ex.target[base] = std::abs(c);
      }
    }
  }
  return ex;
}

namespace {

Tensor stack(const std::vector<const TrainExample*>& batch, bool targets) {
  require(!batch.empty(), "empty batch");
  const Tensor& first = targets ? batch[0]->target : batch[0]->input;
  std::vector<int> shape{static_cast<int>(batch.size())};
  shape.insert(shape.end(), first.shape().begin(), first.shape().end());
  Tensor out(shape);
  const size_t per = first.size();
  for (size_t i = 0; i < batch.size(); ++i) {
    const Tensor& src = targets ? batch[i]->target : batch[i]->input;
    require(src.size() == per, "examples disagree in shape");
    std::copy(src.values().begin(), src.values().end(),
              out.values().begin() + i * per);
  }
  return out;
}

}  // namespace

Tensor stack_inputs(const std::vector<const TrainExample*>& batch) {
  return stack(batch, false);
}

Tensor stack_targets(const std::vector<const TrainExample*>& batch) {
  return stack(batch, true);
}

double validation_nmse(Network& net, const std::vector<TrainExample>& examples) {
  double acc = 0.0;
  int counted = 0;
  for (const auto& ex : examples) {
    double energy = 0.0;
    for (double v : ex.target.values()) energy += v * v;
    if (energy <= 0.0) continue;
    std::vector<const TrainExample*> one{&ex};
    Tensor pred = net.forward(stack_inputs(one), /*training=*/false);
    double err = 0.0;
    for (size_t i = 0; i < ex.target.size(); ++i) {
      const double d = ex.target[i] - pred[i];
      err += d * d;
    }
    acc += err / energy;
    ++counted;
  }
  return counted > 0 ? acc / counted : 0.0;
}

TrainResult train(Network& net, Adam& adam,
                  const std::vector<TrainExample>& train_set,
                  const std::vector<TrainExample>& validation_set,
                  const TrainSchedule& schedule, const LossParams& loss,
                  uint64_t seed, const CheckpointHook& hook) {
  schedule.validate();
  loss.validate();
  require(!train_set.empty(), "training set is empty");
  const std::vector<TrainExample>& valid =
      validation_set.empty() ? train_set : validation_set;

  Rng rng(seed);
  TrainResult result;
  double window_loss = 0.0;
  int64_t window_count = 0;

  auto monitor = [&](int64_t step, double lr) {
    MonitorEntry entry;
    entry.step = step;
    entry.validation_nmse = validation_nmse(net, valid);
    entry.train_loss = window_count > 0 ? window_loss / window_count
                                        : std::nan("");
    entry.lr = lr;
    result.log.push_back(entry);
    window_loss = 0.0;
    window_count = 0;
    if (hook) hook(step, net, adam.state());
  };

  const int64_t total = schedule.total_steps();
  monitor(0, schedule.lr_initial);

  std::vector<const TrainExample*> batch(static_cast<size_t>(schedule.batch_size));
  for (int64_t step = 1; step <= total; ++step) {
    const double lr =
        step <= schedule.phase1_steps ? schedule.lr_initial : schedule.lr_refine;

    for (auto& slot : batch)
      slot = &train_set[static_cast<size_t>(rng.uniform_int(
          static_cast<int>(train_set.size())))];
    Tensor inputs = stack_inputs(batch);
    Tensor targets = stack_targets(batch);

    Network::Trace trace;
    Tensor pred = net.forward(inputs, /*training=*/true, &trace);
    const double f = loss_f_batch(targets, pred, loss);
    window_loss += f;
    ++window_count;

    net.zero_grad();
    net.backward(loss_f_batch_grad(targets, pred, loss), trace);
    net.accumulate_decay_grad(loss.lambda);

    net.step += 1;
    adam.step(lr, net.step);

    if (step % schedule.monitor_every == 0) monitor(step, lr);
  }
  return result;
}

}  // namespace gapfill::nn
