// fft.hpp  Iterative radix-2 FFT over std::complex<double>.
//
// Copyright (C) 2026 the gapfill authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <complex>
#include <vector>

namespace gapfill {

// Fixed-size transform with precomputed twiddles and bit-reversal table.
// Sizes must be powers of two; the analysis window length used throughout
// this project (512, and tiny powers of two in tests) always is.
class Fft {
 public:
  explicit Fft(int n);

  int size() const { return n_; }

  // In-place DFT, no scaling: X[m] = sum_n x[n] exp(-2*pi*i*m*n/N).
  void forward(std::complex<double>* data) const;

  // In-place inverse with 1/N scaling.
  void inverse(std::complex<double>* data) const;

 private:
  void transform(std::complex<double>* data, bool inv) const;

  int n_;
  std::vector<int> bitrev_;
  std::vector<std::complex<double>> twiddle_;      // forward twiddles, n_/2
  std::vector<std::complex<double>> twiddle_inv_;  // conjugates
};

}  // namespace gapfill
