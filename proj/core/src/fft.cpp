// Copyright (C) 2026 the gapfill authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "gapfill/fft.hpp"

#include <cmath>

#include "gapfill/common.hpp"

namespace gapfill {

Fft::Fft(int n) : n_(n) {
  require(n > 0 && (n & (n - 1)) == 0, "fft size must be a power of two");
  bitrev_.resize(n);
  int log2n = 0;
  while ((1 << log2n) < n) ++log2n;
  for (int i = 0; i < n; ++i) {
    int r = 0;
    for (int b = 0; b < log2n; ++b) r |= ((i >> b) & 1) << (log2n - 1 - b);
    bitrev_[i] = r;
  }
  twiddle_.resize(n / 2);
  twiddle_inv_.resize(n / 2);
  for (int k = 0; k < n / 2; ++k) {
    double ang = -2.0 * kPi * k / n;
    twiddle_[k] = {std::cos(ang), std::sin(ang)};
    twiddle_inv_[k] = std::conj(twiddle_[k]);
  }
}

void Fft::transform(std::complex<double>* a, bool inv) const {
  const auto& tw = inv ? twiddle_inv_ : twiddle_;
  for (int i = 0; i < n_; ++i) {
    int j = bitrev_[i];
    if (j > i) std::swap(a[i], a[j]);
  }
  for (int len = 2; len <= n_; len <<= 1) {
    int half = len >> 1;
    int step = n_ / len;
    for (int start = 0; start < n_; start += len) {
      for (int k = 0; k < half; ++k) {
        std::complex<double> u = a[start + k];
        std::complex<double> v = a[start + k + half] * tw[k * step];
        a[start + k] = u + v;
        a[start + k + half] = u - v;
      }
    }
  }
}

void Fft::forward(std::complex<double>* data) const { transform(data, false); }

void Fft::inverse(std::complex<double>* data) const {
  transform(data, true);
  double scale = 1.0 / n_;
  for (int i = 0; i < n_; ++i) data[i] *= scale;
}

}  // namespace gapfill
