// network.hpp  Encoder-decoder assembly, canonical configs, checkpoints.
//
// Copyright (C) 2026 the gapfill authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "gapfill/frames.hpp"
#include "gapfill/layers.hpp"

namespace gapfill::nn {

enum class Variant { Complex, Magnitude };

std::string variant_name(Variant v);
Variant variant_from_name(const std::string& name);

// The encoder compresses the four-channel context grid into a code vector;
// the decoder expands the code into the gap coefficient grid. Layer lists
// include the relu/batch_norm/reshape entries explicitly. Any config whose
// shapes walk through code_size to the output grid is admissible; the
// canonical and toy builders below are the tested defaults.
struct NetworkConfig {
  Variant variant = Variant::Magnitude;
  int code_size = 2048;
  std::array<int, 3> input_shape{4, 257, 16};   // channels, bins, frames
  std::array<int, 3> output_shape{1, 257, 11};  // channels, bins, frames
  std::vector<LayerSpec> encoder;
  std::vector<LayerSpec> decoder;

  int output_channels() const { return variant == Variant::Complex ? 2 : 1; }

  // Six stride-2 convolutions down to a 128x4x4 map (code 2048), then
  // FC 2048->2048 and five deconvolutions back up to C x 257 x 11.
  static NetworkConfig canonical(Variant v);

  // Same geometry with few channels; trainable on a desk CPU in seconds.
  static NetworkConfig toy(Variant v);
};

std::string config_to_json(const NetworkConfig& config);
NetworkConfig config_from_json(const std::string& json_text);

// The materialized model: layers, parameters, batch-norm state and the
// training step counter. Construction validates the whole shape pipeline
// (encoder flattens to exactly code_size, decoder reaches the output grid,
// possibly through a final center-crop) and rejects inconsistent configs.
class Network {
 public:
  explicit Network(const NetworkConfig& config);

  const NetworkConfig& config() const { return config_; }

  void init_params(Rng& rng);

  // Trainable parameters, in a stable order.
  std::vector<Param*> trainable_params();
  // Everything serialized into a checkpoint (adds batch-norm running stats).
  std::vector<Param*> state_params();

  void zero_grad();

  struct Trace {
    std::vector<LayerCache> caches;
    std::vector<int> pre_crop_shape;
    bool valid = false;
  };

  // Input (N, C_in, bins, frames) -> output (N, C_out, bins, frames).
  // With training=false and no trace this is const-safe and reentrant.
  Tensor forward(const Tensor& input, bool training, Trace* trace = nullptr);

  // Backpropagates d(loss)/d(output), accumulating parameter gradients.
  // Rejects traces that were not produced by a forward pass.
  void backward(const Tensor& grad_output, const Trace& trace);

  // Sum of squared decayed weights (the regularization term's Sum w_i^2).
  double weight_sq_sum() const;

  // Adds lambda * w to every decayed weight's gradient.
  void accumulate_decay_grad(double lambda);

  Network clone() const;

  int64_t step = 0;

 private:
  NetworkConfig config_;
  std::vector<std::unique_ptr<Layer>> layers_;
  int crop_h_ = 0, crop_w_ = 0;  // center-crop applied after the last layer
  std::vector<int> final_shape_;  // pre-crop shape for batch 1
};

// Versioned checkpoint: header, config JSON, then little-endian float32
// blobs with per-tensor shape records. Optimizer moments ride along so
// training can resume.
struct AdamState;
void save_checkpoint(const std::string& path, const Network& net,
                     const AdamState* opt = nullptr);
struct LoadedCheckpoint {
  std::unique_ptr<Network> net;
  std::vector<std::vector<double>> adam_m, adam_v;  // empty when absent
};
LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace gapfill::nn
