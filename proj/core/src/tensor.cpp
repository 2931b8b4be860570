// Copyright (C) 2026 the gapfill authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "gapfill/tensor.hpp"

#include <algorithm>

#include "gapfill/common.hpp"

namespace gapfill::nn {

size_t shape_size(const std::vector<int>& shape) {
  size_t n = 1;
  for (int d : shape) {
    require(d > 0, "tensor dimensions must be positive");
    n *= static_cast<size_t>(d);
  }
  return n;
}

std::string shape_str(const std::vector<int>& shape) {
  std::string s = "(";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape[i]);
  }
  return s + ")";
}

Tensor::Tensor(std::vector<int> shape) : shape_(std::move(shape)) {
  data_.assign(shape_size(shape_), 0.0);
}

Tensor Tensor::reshaped(std::vector<int> shape) const {
  require(shape_size(shape) == data_.size(),
          "reshape element count mismatch: " + shape_str(shape_) + " -> " +
              shape_str(shape));
  Tensor out;
  out.shape_ = std::move(shape);
  out.data_ = data_;
  return out;
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

std::vector<double>& Tensor::grad() {
  if (grad_.empty()) grad_.assign(data_.size(), 0.0);
  return grad_;
}

void Tensor::zero_grad() {
  std::fill(grad_.begin(), grad_.end(), 0.0);
}

}  // namespace gapfill::nn
