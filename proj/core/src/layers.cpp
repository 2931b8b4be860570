// Copyright (C) 2026 the gapfill authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "gapfill/layers.hpp"

#include <cmath>

#include "gapfill/common.hpp"

namespace gapfill::nn {

LayerSpec LayerSpec::conv(int ci, int co, int kh, int kw, int sh, int sw,
                          int pt, int pb, int pl, int pr) {
  LayerSpec s;
  s.kind = Kind::Conv;
  s.channels_in = ci;
  s.channels_out = co;
  s.kernel_h = kh;
  s.kernel_w = kw;
  s.stride_h = sh;
  s.stride_w = sw;
  s.pad_top = pt;
  s.pad_bottom = pb;
  s.pad_left = pl;
  s.pad_right = pr;
  return s;
}

LayerSpec LayerSpec::deconv(int ci, int co, int kh, int kw, int sh, int sw,
                            int pt, int pb, int pl, int pr) {
  LayerSpec s = conv(ci, co, kh, kw, sh, sw, pt, pb, pl, pr);
  s.kind = Kind::Deconv;
  return s;
}

LayerSpec LayerSpec::fully_connected(int in, int out) {
  LayerSpec s;
  s.kind = Kind::FullyConnected;
  s.channels_in = in;
  s.channels_out = out;
  return s;
}

LayerSpec LayerSpec::relu() {
  LayerSpec s;
  s.kind = Kind::Relu;
  return s;
}

LayerSpec LayerSpec::batch_norm() {
  LayerSpec s;
  s.kind = Kind::BatchNorm;
  return s;
}

LayerSpec LayerSpec::reshape(std::vector<int> per_sample_dims) {
  LayerSpec s;
  s.kind = Kind::Reshape;
  s.reshape_to = std::move(per_sample_dims);
  return s;
}

std::string kind_name(LayerSpec::Kind kind) {
  switch (kind) {
    case LayerSpec::Kind::Conv: return "conv";
    case LayerSpec::Kind::Deconv: return "deconv";
    case LayerSpec::Kind::FullyConnected: return "fully_connected";
    case LayerSpec::Kind::Relu: return "relu";
    case LayerSpec::Kind::BatchNorm: return "batch_norm";
    case LayerSpec::Kind::Reshape: return "reshape";
  }
  return "?";
}

namespace {

void check_spec_common(const LayerSpec& s) {
  require(s.kernel_h >= 1 && s.kernel_w >= 1, "kernel dims must be >= 1");
  require(s.stride_h >= 1 && s.stride_w >= 1, "strides must be >= 1");
  require(s.pad_top >= 0 && s.pad_bottom >= 0 && s.pad_left >= 0 && s.pad_right >= 0,
          "padding must be nonnegative");
  require(s.channels_in >= 1 && s.channels_out >= 1, "channel counts must be >= 1");
}

double fan_in_limit(int fan_in) { return std::sqrt(3.0 / fan_in); }

class ConvLayer : public Layer {
 public:
  explicit ConvLayer(LayerSpec spec) : Layer(std::move(spec)) {
    check_spec_common(spec_);
    weight_.name = "conv.weight";
    weight_.value = Tensor({spec_.channels_out, spec_.channels_in, spec_.kernel_h,
                            spec_.kernel_w});
    weight_.decay = true;
    bias_.name = "conv.bias";
    bias_.value = Tensor({spec_.channels_out});
  }

  std::vector<int> output_shape(const std::vector<int>& in) const override {
    require(in.size() == 4, "conv expects NCHW input");
    require(in[1] == spec_.channels_in, "conv channel mismatch");
    const int ph = in[2] + spec_.pad_top + spec_.pad_bottom;
    const int pw = in[3] + spec_.pad_left + spec_.pad_right;
    require(ph >= spec_.kernel_h && pw >= spec_.kernel_w,
            "conv kernel larger than padded input");
    const int oh = (ph - spec_.kernel_h) / spec_.stride_h + 1;
    const int ow = (pw - spec_.kernel_w) / spec_.stride_w + 1;
    return {in[0], spec_.channels_out, oh, ow};
  }

  Tensor forward(const Tensor& x, bool, LayerCache* cache) override {
    const auto out_shape = output_shape(x.shape());
    Tensor padded = pad_input(x);
    Tensor out(out_shape);
    const int n_batch = x.dim(0), ci = spec_.channels_in, co = spec_.channels_out;
    const int oh = out_shape[2], ow = out_shape[3];
    const int pw = padded.dim(3);
    const int kh = spec_.kernel_h, kw = spec_.kernel_w;
    const int sh = spec_.stride_h, sw = spec_.stride_w;
    const double* wp = weight_.value.data();
    for (int n = 0; n < n_batch; ++n) {
      for (int c = 0; c < co; ++c) {
        double* op = &out.at4(n, c, 0, 0);
        const double b = bias_.value[static_cast<size_t>(c)];
        for (int i = 0; i < oh * ow; ++i) op[i] = b;
        for (int d = 0; d < ci; ++d) {
          const double* xp = padded.data() + padded.offset4(n, d, 0, 0);
          const double* wrow = wp + ((static_cast<size_t>(c) * ci + d) * kh) * kw;
          for (int u = 0; u < kh; ++u) {
            for (int v = 0; v < kw; ++v) {
              const double w = wrow[u * kw + v];
              for (int y = 0; y < oh; ++y) {
                const double* src = xp + (y * sh + u) * pw + v;
                double* dst = op + y * ow;
                for (int z = 0; z < ow; ++z) dst[z] += w * src[z * sw];
              }
            }
          }
        }
      }
    }
    if (cache) {
      cache->input = x;
      cache->padded = std::move(padded);
    }
    return out;
  }

  Tensor backward(const Tensor& grad_out, const LayerCache& cache) override {
    const Tensor& padded = cache.padded;
    const int n_batch = grad_out.dim(0), co = spec_.channels_out, ci = spec_.channels_in;
    const int oh = grad_out.dim(2), ow = grad_out.dim(3);
    const int pw = padded.dim(3);
    const int kh = spec_.kernel_h, kw = spec_.kernel_w;
    const int sh = spec_.stride_h, sw = spec_.stride_w;

    Tensor grad_padded(padded.shape());
    auto& gw = weight_.value.grad();
    auto& gb = bias_.value.grad();
    const double* wp = weight_.value.data();

    for (int n = 0; n < n_batch; ++n) {
      for (int c = 0; c < co; ++c) {
        const double* gp = grad_out.data() + grad_out.offset4(n, c, 0, 0);
        double bsum = 0.0;
        for (int i = 0; i < oh * ow; ++i) bsum += gp[i];
        gb[static_cast<size_t>(c)] += bsum;
        for (int d = 0; d < ci; ++d) {
          const double* xp = padded.data() + padded.offset4(n, d, 0, 0);
          double* gxp = &grad_padded.at4(n, d, 0, 0);
          const size_t wbase = (static_cast<size_t>(c) * ci + d) * kh * kw;
          for (int u = 0; u < kh; ++u) {
            for (int v = 0; v < kw; ++v) {
              const double w = wp[wbase + static_cast<size_t>(u) * kw + v];
              double wacc = 0.0;
              for (int y = 0; y < oh; ++y) {
                const double* g = gp + y * ow;
                const double* src = xp + (y * sh + u) * pw + v;
                double* gx = gxp + (y * sh + u) * pw + v;
                for (int z = 0; z < ow; ++z) {
                  wacc += src[z * sw] * g[z];
                  gx[z * sw] += w * g[z];
                }
              }
              gw[wbase + static_cast<size_t>(u) * kw + v] += wacc;
            }
          }
        }
      }
    }
    return crop_input_grad(grad_padded, cache.input.shape());
  }

  std::vector<Param*> params() override { return {&weight_, &bias_}; }

  void init(Rng& rng) override {
    const double limit = fan_in_limit(spec_.channels_in * spec_.kernel_h * spec_.kernel_w);
    for (auto& v : weight_.value.values()) v = rng.uniform(-limit, limit);
    bias_.value.fill(0.0);
  }

 private:
  Tensor pad_input(const Tensor& x) const {
    const int n_batch = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
    Tensor padded({n_batch, c, h + spec_.pad_top + spec_.pad_bottom,
                   w + spec_.pad_left + spec_.pad_right});
    for (int n = 0; n < n_batch; ++n)
      for (int d = 0; d < c; ++d)
        for (int y = 0; y < h; ++y)
          for (int z = 0; z < w; ++z)
            padded.at4(n, d, y + spec_.pad_top, z + spec_.pad_left) = x.at4(n, d, y, z);
    return padded;
  }

  Tensor crop_input_grad(const Tensor& grad_padded, const std::vector<int>& in_shape) const {
    Tensor gin(in_shape);
    const int n_batch = in_shape[0], c = in_shape[1], h = in_shape[2], w = in_shape[3];
    for (int n = 0; n < n_batch; ++n)
      for (int d = 0; d < c; ++d)
        for (int y = 0; y < h; ++y)
          for (int z = 0; z < w; ++z)
            gin.at4(n, d, y, z) =
                grad_padded.at4(n, d, y + spec_.pad_top, z + spec_.pad_left);
    return gin;
  }

  Param weight_, bias_;
};

class DeconvLayer : public Layer {
 public:
  explicit DeconvLayer(LayerSpec spec) : Layer(std::move(spec)) {
    check_spec_common(spec_);
    weight_.name = "deconv.weight";
    weight_.value = Tensor({spec_.channels_in, spec_.channels_out, spec_.kernel_h,
                            spec_.kernel_w});
    weight_.decay = true;
    bias_.name = "deconv.bias";
    bias_.value = Tensor({spec_.channels_out});
  }

  std::vector<int> full_shape(const std::vector<int>& in) const {
    const int fh = (in[2] - 1) * spec_.stride_h + spec_.kernel_h;
    const int fw = (in[3] - 1) * spec_.stride_w + spec_.kernel_w;
    return {in[0], spec_.channels_out, fh, fw};
  }

  std::vector<int> output_shape(const std::vector<int>& in) const override {
    require(in.size() == 4, "deconv expects NCHW input");
    require(in[1] == spec_.channels_in, "deconv channel mismatch");
    auto full = full_shape(in);
    const int oh = full[2] - spec_.pad_top - spec_.pad_bottom;
    const int ow = full[3] - spec_.pad_left - spec_.pad_right;
    require(oh >= 1 && ow >= 1, "deconv padding removes the whole output");
    return {in[0], spec_.channels_out, oh, ow};
  }

  Tensor forward(const Tensor& x, bool, LayerCache* cache) override {
    const auto full_sh = full_shape(x.shape());
    Tensor full(full_sh);
    const int n_batch = x.dim(0), ci = spec_.channels_in, co = spec_.channels_out;
    const int h = x.dim(2), w = x.dim(3);
    const int fw = full_sh[3];
    const int kh = spec_.kernel_h, kw = spec_.kernel_w;
    const int sh = spec_.stride_h, sw = spec_.stride_w;
    const double* wp = weight_.value.data();
    for (int n = 0; n < n_batch; ++n) {
      for (int d = 0; d < ci; ++d) {
        const double* xp = x.data() + x.offset4(n, d, 0, 0);
        for (int c = 0; c < co; ++c) {
          double* fp = &full.at4(n, c, 0, 0);
          const double* wrow = wp + ((static_cast<size_t>(d) * co + c) * kh) * kw;
          for (int y = 0; y < h; ++y) {
            for (int z = 0; z < w; ++z) {
              const double xv = xp[y * w + z];
              if (xv == 0.0) continue;
              double* base = fp + (y * sh) * fw + z * sw;
              for (int u = 0; u < kh; ++u)
                for (int v = 0; v < kw; ++v) base[u * fw + v] += xv * wrow[u * kw + v];
            }
          }
        }
      }
    }
    Tensor out(output_shape(x.shape()));
    const int oh = out.dim(2), ow = out.dim(3);
    for (int n = 0; n < n_batch; ++n)
      for (int c = 0; c < co; ++c) {
        const double b = bias_.value[static_cast<size_t>(c)];
        for (int y = 0; y < oh; ++y)
          for (int z = 0; z < ow; ++z)
            out.at4(n, c, y, z) =
                full.at4(n, c, y + spec_.pad_top, z + spec_.pad_left) + b;
      }
    if (cache) cache->input = x;
    return out;
  }

  Tensor backward(const Tensor& grad_out, const LayerCache& cache) override {
    const Tensor& x = cache.input;
    const auto full_sh = full_shape(x.shape());
    Tensor grad_full(full_sh);
    const int n_batch = x.dim(0), ci = spec_.channels_in, co = spec_.channels_out;
    const int oh = grad_out.dim(2), ow = grad_out.dim(3);
    auto& gb = bias_.value.grad();
    for (int n = 0; n < n_batch; ++n)
      for (int c = 0; c < co; ++c) {
        double bsum = 0.0;
        for (int y = 0; y < oh; ++y)
          for (int z = 0; z < ow; ++z) {
            const double g = grad_out.at4(n, c, y, z);
            bsum += g;
            grad_full.at4(n, c, y + spec_.pad_top, z + spec_.pad_left) = g;
          }
        gb[static_cast<size_t>(c)] += bsum;
      }

    Tensor gin(x.shape());
    auto& gw = weight_.value.grad();
    const double* wp = weight_.value.data();
    const int h = x.dim(2), w = x.dim(3);
    const int fw = full_sh[3];
    const int kh = spec_.kernel_h, kw = spec_.kernel_w;
    const int sh = spec_.stride_h, sw = spec_.stride_w;
    for (int n = 0; n < n_batch; ++n) {
      for (int d = 0; d < ci; ++d) {
        const double* xp = x.data() + x.offset4(n, d, 0, 0);
        double* gxp = &gin.at4(n, d, 0, 0);
        for (int c = 0; c < co; ++c) {
          const double* gfp = &grad_full.at4(n, c, 0, 0);
          const size_t wbase = (static_cast<size_t>(d) * co + c) * kh * kw;
          for (int y = 0; y < h; ++y) {
            for (int z = 0; z < w; ++z) {
              const double xv = xp[y * w + z];
              const double* base = gfp + (y * sh) * fw + z * sw;
              double acc = 0.0;
              for (int u = 0; u < kh; ++u) {
                for (int v = 0; v < kw; ++v) {
                  const double g = base[u * fw + v];
                  acc += wp[wbase + static_cast<size_t>(u) * kw + v] * g;
                  gw[wbase + static_cast<size_t>(u) * kw + v] += xv * g;
                }
              }
              gxp[y * w + z] += acc;
            }
          }
        }
      }
    }
    return gin;
  }

  std::vector<Param*> params() override { return {&weight_, &bias_}; }

  void init(Rng& rng) override {
    const double limit = fan_in_limit(spec_.channels_in * spec_.kernel_h * spec_.kernel_w);
    for (auto& v : weight_.value.values()) v = rng.uniform(-limit, limit);
    bias_.value.fill(0.0);
  }

 private:
  Param weight_, bias_;
};

class FullyConnectedLayer : public Layer {
 public:
  explicit FullyConnectedLayer(LayerSpec spec) : Layer(std::move(spec)) {
    require(spec_.channels_in >= 1 && spec_.channels_out >= 1,
            "fc feature counts must be >= 1");
    weight_.name = "fc.weight";
    weight_.value = Tensor({spec_.channels_out, spec_.channels_in});
    weight_.decay = true;
    bias_.name = "fc.bias";
    bias_.value = Tensor({spec_.channels_out});
  }

  std::vector<int> output_shape(const std::vector<int>& in) const override {
    require(in.size() == 2, "fc expects (N, features) input");
    require(in[1] == spec_.channels_in, "fc feature mismatch");
    return {in[0], spec_.channels_out};
  }

  Tensor forward(const Tensor& x, bool, LayerCache* cache) override {
    const int n_batch = x.dim(0), fin = spec_.channels_in, fout = spec_.channels_out;
    Tensor out({n_batch, fout});
    const double* wp = weight_.value.data();
    for (int n = 0; n < n_batch; ++n) {
      const double* xp = x.data() + static_cast<size_t>(n) * fin;
      double* op = out.data() + static_cast<size_t>(n) * fout;
      for (int o = 0; o < fout; ++o) {
        const double* wrow = wp + static_cast<size_t>(o) * fin;
        double acc = bias_.value[static_cast<size_t>(o)];
        for (int i = 0; i < fin; ++i) acc += wrow[i] * xp[i];
        op[o] = acc;
      }
    }
    if (cache) cache->input = x;
    return out;
  }

  Tensor backward(const Tensor& grad_out, const LayerCache& cache) override {
    const Tensor& x = cache.input;
    const int n_batch = x.dim(0), fin = spec_.channels_in, fout = spec_.channels_out;
    Tensor gin({n_batch, fin});
    auto& gw = weight_.value.grad();
    auto& gb = bias_.value.grad();
    const double* wp = weight_.value.data();
    for (int n = 0; n < n_batch; ++n) {
      const double* xp = x.data() + static_cast<size_t>(n) * fin;
      const double* gp = grad_out.data() + static_cast<size_t>(n) * fout;
      double* gxp = gin.data() + static_cast<size_t>(n) * fin;
      for (int o = 0; o < fout; ++o) {
        const double g = gp[o];
        gb[static_cast<size_t>(o)] += g;
        const double* wrow = wp + static_cast<size_t>(o) * fin;
        double* gwrow = gw.data() + static_cast<size_t>(o) * fin;
        for (int i = 0; i < fin; ++i) {
          gwrow[i] += g * xp[i];
          gxp[i] += g * wrow[i];
        }
      }
    }
    return gin;
  }

  std::vector<Param*> params() override { return {&weight_, &bias_}; }

  void init(Rng& rng) override {
    const double limit = fan_in_limit(spec_.channels_in);
    for (auto& v : weight_.value.values()) v = rng.uniform(-limit, limit);
    bias_.value.fill(0.0);
  }

 private:
  Param weight_, bias_;
};

class ReluLayer : public Layer {
 public:
  explicit ReluLayer(LayerSpec spec) : Layer(std::move(spec)) {}

  std::vector<int> output_shape(const std::vector<int>& in) const override {
    return in;
  }

  Tensor forward(const Tensor& x, bool, LayerCache* cache) override {
    Tensor out = x;
    for (auto& v : out.values())
      if (v < 0.0) v = 0.0;
    if (cache) cache->input = x;
    return out;
  }

  Tensor backward(const Tensor& grad_out, const LayerCache& cache) override {
    Tensor gin = grad_out;
    const auto& xv = cache.input.values();
    auto& gv = gin.values();
    for (size_t i = 0; i < gv.size(); ++i)
      if (xv[i] <= 0.0) gv[i] = 0.0;
    return gin;
  }
};

// Normalizes over every axis except the channel axis (axis 1 for NCHW,
// the feature axis for (N, F)). Running statistics use momentum 0.1 and
// biased variance, matching the inference formula.
class BatchNormLayer : public Layer {
 public:
  explicit BatchNormLayer(LayerSpec spec) : Layer(std::move(spec)) {}

  void bind_input_shape(const std::vector<int>& in) override {
    require(in.size() == 2 || in.size() == 4, "batch_norm expects 2-d or 4-d input");
    ensure_initialized(in);
  }

  std::vector<int> output_shape(const std::vector<int>& in) const override {
    require(in.size() == 2 || in.size() == 4, "batch_norm expects 2-d or 4-d input");
    return in;
  }

  Tensor forward(const Tensor& x, bool training, LayerCache* cache) override {
    ensure_initialized(x.shape());
    const int channels = gamma_.value.dim(0);
    const auto [outer, inner] = plane(x.shape());
    const size_t per_channel = static_cast<size_t>(outer) * inner;

    std::vector<double> mean(static_cast<size_t>(channels));
    std::vector<double> inv_std(static_cast<size_t>(channels));
    if (training) {
      for (int c = 0; c < channels; ++c) {
        double mu = 0.0;
        for_channel(x, c, [&](double v) { mu += v; });
        mu /= static_cast<double>(per_channel);
        double var = 0.0;
        for_channel(x, c, [&](double v) { var += (v - mu) * (v - mu); });
        var /= static_cast<double>(per_channel);
        mean[static_cast<size_t>(c)] = mu;
        inv_std[static_cast<size_t>(c)] = 1.0 / std::sqrt(var + kEps);
        running_mean_.value[static_cast<size_t>(c)] =
            (1.0 - kMomentum) * running_mean_.value[static_cast<size_t>(c)] + kMomentum * mu;
        running_var_.value[static_cast<size_t>(c)] =
            (1.0 - kMomentum) * running_var_.value[static_cast<size_t>(c)] + kMomentum * var;
      }
    } else {
      for (int c = 0; c < channels; ++c) {
        mean[static_cast<size_t>(c)] = running_mean_.value[static_cast<size_t>(c)];
        inv_std[static_cast<size_t>(c)] =
            1.0 / std::sqrt(running_var_.value[static_cast<size_t>(c)] + kEps);
      }
    }

    Tensor out(x.shape());
    Tensor xhat(x.shape());
    apply_norm(x, mean, inv_std, xhat, out);
    if (cache) {
      cache->input = x;
      cache->normalized = xhat;
      cache->mean = std::move(mean);
      cache->inv_std = std::move(inv_std);
    }
    return out;
  }

  Tensor backward(const Tensor& grad_out, const LayerCache& cache) override {
    // Gradient through the batch statistics (training-mode formula).
    const int channels = gamma_.value.dim(0);
    const auto [outer, inner] = plane(grad_out.shape());
    const double m = static_cast<double>(outer) * inner;

    Tensor gin(grad_out.shape());
    auto& ggamma = gamma_.value.grad();
    auto& gbeta = beta_.value.grad();
    for (int c = 0; c < channels; ++c) {
      double sum_g = 0.0, sum_gx = 0.0;
      visit_channel(grad_out, c, [&](size_t i) {
        sum_g += grad_out[i];
        sum_gx += grad_out[i] * cache.normalized[i];
      });
      ggamma[static_cast<size_t>(c)] += sum_gx;
      gbeta[static_cast<size_t>(c)] += sum_g;

      const double gamma = gamma_.value[static_cast<size_t>(c)];
      const double istd = cache.inv_std[static_cast<size_t>(c)];
      visit_channel(grad_out, c, [&](size_t i) {
        const double gxhat = grad_out[i] * gamma;
        gin.values()[i] =
            istd * (gxhat - sum_g * gamma / m - cache.normalized[i] * sum_gx * gamma / m);
      });
    }
    return gin;
  }

  std::vector<Param*> params() override {
    return {&gamma_, &beta_, &running_mean_, &running_var_};
  }

 private:
  static constexpr double kEps = 1e-5;
  static constexpr double kMomentum = 0.1;

  void ensure_initialized(const std::vector<int>& shape) {
    const int channels = shape[1];
    if (gamma_.value.size() != 0) {
      require(gamma_.value.dim(0) == channels, "batch_norm channel mismatch");
      return;
    }
    gamma_ = {"bn.gamma", Tensor({channels}), true, false};
    beta_ = {"bn.beta", Tensor({channels}), true, false};
    running_mean_ = {"bn.running_mean", Tensor({channels}), false, false};
    running_var_ = {"bn.running_var", Tensor({channels}), false, false};
    gamma_.value.fill(1.0);
    running_var_.value.fill(1.0);
  }

  static std::pair<int, int> plane(const std::vector<int>& shape) {
    const int outer = shape[0];
    int inner = 1;
    for (size_t i = 2; i < shape.size(); ++i) inner *= shape[i];
    return {outer, inner};
  }

  template <typename F>
  void for_channel(const Tensor& x, int c, F&& f) const {
    visit_channel(x, c, [&](size_t i) { f(x[i]); });
  }

  template <typename F>
  static void visit_channel(const Tensor& x, int c, F&& f) {
    const auto& shape = x.shape();
    const int channels = shape[1];
    size_t inner = 1;
    for (size_t i = 2; i < shape.size(); ++i) inner *= static_cast<size_t>(shape[i]);
    for (int n = 0; n < shape[0]; ++n) {
      const size_t base = (static_cast<size_t>(n) * channels + static_cast<size_t>(c)) * inner;
      for (size_t i = 0; i < inner; ++i) f(base + i);
    }
  }

  void apply_norm(const Tensor& x, const std::vector<double>& mean,
                  const std::vector<double>& inv_std, Tensor& xhat, Tensor& out) const {
    const int channels = gamma_.value.dim(0);
    for (int c = 0; c < channels; ++c) {
      const double mu = mean[static_cast<size_t>(c)];
      const double istd = inv_std[static_cast<size_t>(c)];
      const double g = gamma_.value[static_cast<size_t>(c)];
      const double b = beta_.value[static_cast<size_t>(c)];
      visit_channel(x, c, [&](size_t i) {
        const double h = (x[i] - mu) * istd;
        xhat.values()[i] = h;
        out.values()[i] = g * h + b;
      });
    }
  }

  Param gamma_, beta_, running_mean_, running_var_;
};

class ReshapeLayer : public Layer {
 public:
  explicit ReshapeLayer(LayerSpec spec) : Layer(std::move(spec)) {
    require(!spec_.reshape_to.empty(), "reshape target missing");
  }

  std::vector<int> output_shape(const std::vector<int>& in) const override {
    size_t per_sample = 1;
    for (size_t i = 1; i < in.size(); ++i) per_sample *= static_cast<size_t>(in[i]);
    require(per_sample == shape_size(spec_.reshape_to),
            "reshape element count mismatch");
    std::vector<int> out{in[0]};
    out.insert(out.end(), spec_.reshape_to.begin(), spec_.reshape_to.end());
    return out;
  }

  Tensor forward(const Tensor& x, bool, LayerCache* cache) override {
    if (cache) cache->in_shape = x.shape();
    return x.reshaped(output_shape(x.shape()));
  }

  Tensor backward(const Tensor& grad_out, const LayerCache& cache) override {
    return grad_out.reshaped(cache.in_shape);
  }
};

}  // namespace

std::unique_ptr<Layer> make_layer(const LayerSpec& spec) {
  switch (spec.kind) {
    case LayerSpec::Kind::Conv: return std::make_unique<ConvLayer>(spec);
    case LayerSpec::Kind::Deconv: return std::make_unique<DeconvLayer>(spec);
    case LayerSpec::Kind::FullyConnected:
      return std::make_unique<FullyConnectedLayer>(spec);
    case LayerSpec::Kind::Relu: return std::make_unique<ReluLayer>(spec);
    case LayerSpec::Kind::BatchNorm: return std::make_unique<BatchNormLayer>(spec);
    case LayerSpec::Kind::Reshape: return std::make_unique<ReshapeLayer>(spec);
  }
  throw std::invalid_argument("unknown layer kind");
}

}  // namespace gapfill::nn
