// layers.hpp  Network building blocks with explicit reverse-mode gradients.
//
// Copyright (C) 2026 the gapfill authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "gapfill/rng.hpp"
#include "gapfill/tensor.hpp"

namespace gapfill::nn {

struct LayerSpec {
  enum class Kind { Conv, Deconv, FullyConnected, Relu, BatchNorm, Reshape };
  Kind kind = Kind::Relu;
  int kernel_h = 1, kernel_w = 1;
  int stride_h = 1, stride_w = 1;
  int pad_top = 0, pad_bottom = 0, pad_left = 0, pad_right = 0;
  int channels_in = 0, channels_out = 0;  // FullyConnected: features in/out
  std::vector<int> reshape_to;            // per-sample dims for Reshape

  static LayerSpec conv(int ci, int co, int kh, int kw, int sh, int sw,
                        int pt, int pb, int pl, int pr);
  static LayerSpec deconv(int ci, int co, int kh, int kw, int sh, int sw,
                          int pt, int pb, int pl, int pr);
  static LayerSpec fully_connected(int in, int out);
  static LayerSpec relu();
  static LayerSpec batch_norm();
  static LayerSpec reshape(std::vector<int> per_sample_dims);
};

std::string kind_name(LayerSpec::Kind kind);

// A trainable or stateful tensor. Adam touches only `trainable`; weight decay
// only applies where `decay` is set (kernels and FC matrices, not biases or
// batch-norm parameters).
struct Param {
  std::string name;
  Tensor value;
  bool trainable = true;
  bool decay = false;
};

// Per-call saved state so that inference stays reentrant: forward writes only
// into the caller's cache, backward reads it.
struct LayerCache {
  Tensor input;
  Tensor padded;      // conv: padded input
  Tensor normalized;  // batch-norm: xhat
  std::vector<double> mean, inv_std;
  std::vector<int> in_shape;  // reshape: shape to restore in backward
};

class Layer {
 public:
  explicit Layer(LayerSpec spec) : spec_(std::move(spec)) {}
  virtual ~Layer() = default;

  const LayerSpec& spec() const { return spec_; }

  // Called once while the network walks shapes at construction; batch-norm
  // uses it to size its per-channel parameters.
  virtual void bind_input_shape(const std::vector<int>&) {}

  // Shape of the output given the input shape (leading batch dimension).
  virtual std::vector<int> output_shape(const std::vector<int>& in) const = 0;

  // `training` selects batch statistics for batch-norm and enables running
  // statistic updates; when a cache is supplied, enough state is kept to run
  // backward. Inference with training=false never mutates the layer.
  virtual Tensor forward(const Tensor& x, bool training, LayerCache* cache) = 0;

  // Returns grad wrt the input and accumulates parameter gradients.
  virtual Tensor backward(const Tensor& grad_out, const LayerCache& cache) = 0;

  virtual std::vector<Param*> params() { return {}; }
  virtual void init(Rng&) {}

 protected:
  LayerSpec spec_;
};

std::unique_ptr<Layer> make_layer(const LayerSpec& spec);

}  // namespace gapfill::nn
