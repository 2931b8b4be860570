// tensor.hpp  Dense row-major tensor used by the network layers.
//
// Copyright (C) 2026 the gapfill authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <string>
#include <vector>

namespace gapfill::nn {

class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<int> shape);

  static Tensor zeros(std::vector<int> shape) { return Tensor(std::move(shape)); }

  const std::vector<int>& shape() const { return shape_; }
  int dim(int i) const { return shape_[static_cast<size_t>(i)]; }
  int rank() const { return static_cast<int>(shape_.size()); }
  size_t size() const { return data_.size(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  double& operator[](size_t i) { return data_[i]; }
  double operator[](size_t i) const { return data_[i]; }

  // 4-d (N,C,H,W) accessors; only valid for rank-4 tensors.
  double& at4(int n, int c, int h, int w) {
    return data_[((static_cast<size_t>(n) * shape_[1] + c) * shape_[2] + h) * shape_[3] + w];
  }
  double at4(int n, int c, int h, int w) const {
    return data_[((static_cast<size_t>(n) * shape_[1] + c) * shape_[2] + h) * shape_[3] + w];
  }

  size_t offset4(int n, int c, int h, int w) const {
    return ((static_cast<size_t>(n) * shape_[1] + c) * shape_[2] + h) * shape_[3] + w;
  }

  // Same data, new shape (element count must match).
  Tensor reshaped(std::vector<int> shape) const;

  void fill(double v);

  // Optional gradient storage of the same shape (allocated on demand).
  std::vector<double>& grad();
  const std::vector<double>& grad() const { return grad_; }
  bool has_grad() const { return !grad_.empty(); }
  void zero_grad();

 private:
  std::vector<int> shape_;
  std::vector<double> data_;
  std::vector<double> grad_;
};

size_t shape_size(const std::vector<int>& shape);
std::string shape_str(const std::vector<int>& shape);

}  // namespace gapfill::nn
