// Copyright (C) 2026 the gapfill authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "gapfill/network.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "gapfill/adam.hpp"
#include "gapfill/common.hpp"

namespace gapfill::nn {

using nlohmann::json;

std::string variant_name(Variant v) {
  return v == Variant::Complex ? "complex" : "magnitude";
}

Variant variant_from_name(const std::string& name) {
  if (name == "complex") return Variant::Complex;
  if (name == "magnitude") return Variant::Magnitude;
  throw std::invalid_argument("unknown network variant '" + name + "'");
}

namespace {

void push_block(std::vector<LayerSpec>& seq, LayerSpec linear) {
  seq.push_back(std::move(linear));
  seq.push_back(LayerSpec::relu());
  seq.push_back(LayerSpec::batch_norm());
}

}  // namespace

NetworkConfig NetworkConfig::canonical(Variant v) {
  NetworkConfig c;
  c.variant = v;
  c.code_size = 2048;
  c.input_shape = {4, 257, 16};
  c.output_shape = {c.output_channels(), 257, 11};

  // Frequency-major downsampling: 257 -> 4 over six stride-2 stages, the
  // last two also halving the 16-frame time axis.
  push_block(c.encoder, LayerSpec::conv(4, 32, 4, 3, 2, 1, 1, 1, 1, 1));
  push_block(c.encoder, LayerSpec::conv(32, 64, 4, 3, 2, 1, 1, 1, 1, 1));
  push_block(c.encoder, LayerSpec::conv(64, 128, 4, 3, 2, 1, 1, 1, 1, 1));
  push_block(c.encoder, LayerSpec::conv(128, 256, 4, 3, 2, 1, 1, 1, 1, 1));
  push_block(c.encoder, LayerSpec::conv(256, 160, 4, 4, 2, 2, 1, 1, 1, 1));
  push_block(c.encoder, LayerSpec::conv(160, 128, 4, 4, 2, 2, 1, 1, 1, 1));
  c.encoder.push_back(LayerSpec::reshape({2048}));

  push_block(c.decoder, LayerSpec::fully_connected(2048, 2048));
  c.decoder.push_back(LayerSpec::reshape({128, 4, 4}));
  push_block(c.decoder, LayerSpec::deconv(128, 256, 3, 2, 1, 1, 1, 1, 0, 0));
  push_block(c.decoder, LayerSpec::deconv(256, 128, 3, 3, 1, 1, 1, 1, 1, 1));
  push_block(c.decoder, LayerSpec::deconv(128, 64, 4, 3, 2, 1, 1, 1, 1, 1));
  c.decoder.push_back(LayerSpec::reshape({32, 16, 5}));
  push_block(c.decoder, LayerSpec::deconv(32, 64, 4, 3, 2, 1, 1, 1, 1, 1));
  c.decoder.push_back(LayerSpec::reshape({32, 64, 5}));
  c.decoder.push_back(
      LayerSpec::deconv(32, c.output_channels(), 5, 3, 4, 2, 0, 0, 0, 0));
  return c;
}

NetworkConfig NetworkConfig::toy(Variant v) {
  NetworkConfig c;
  c.variant = v;
  c.code_size = 128;
  c.input_shape = {4, 257, 16};
  c.output_shape = {c.output_channels(), 257, 11};

  push_block(c.encoder, LayerSpec::conv(4, 8, 4, 3, 2, 1, 1, 1, 1, 1));
  push_block(c.encoder, LayerSpec::conv(8, 8, 4, 3, 2, 1, 1, 1, 1, 1));
  push_block(c.encoder, LayerSpec::conv(8, 8, 4, 3, 2, 1, 1, 1, 1, 1));
  push_block(c.encoder, LayerSpec::conv(8, 8, 4, 3, 2, 1, 1, 1, 1, 1));
  push_block(c.encoder, LayerSpec::conv(8, 8, 4, 4, 2, 2, 1, 1, 1, 1));
  push_block(c.encoder, LayerSpec::conv(8, 8, 4, 4, 2, 2, 1, 1, 1, 1));
  c.encoder.push_back(LayerSpec::reshape({128}));

  push_block(c.decoder, LayerSpec::fully_connected(128, 128));
  c.decoder.push_back(LayerSpec::reshape({8, 4, 4}));
  push_block(c.decoder, LayerSpec::deconv(8, 16, 3, 2, 1, 1, 1, 1, 0, 0));
  push_block(c.decoder, LayerSpec::deconv(16, 16, 3, 3, 1, 1, 1, 1, 1, 1));
  push_block(c.decoder, LayerSpec::deconv(16, 8, 4, 3, 2, 1, 1, 1, 1, 1));
  c.decoder.push_back(LayerSpec::reshape({4, 16, 5}));
  push_block(c.decoder, LayerSpec::deconv(4, 8, 4, 3, 2, 1, 1, 1, 1, 1));
  c.decoder.push_back(LayerSpec::reshape({4, 64, 5}));
  c.decoder.push_back(
      LayerSpec::deconv(4, c.output_channels(), 5, 3, 4, 2, 0, 0, 0, 0));
  return c;
}

namespace {

json spec_to_json(const LayerSpec& s) {
  json j;
  j["kind"] = kind_name(s.kind);
  switch (s.kind) {
    case LayerSpec::Kind::Conv:
    case LayerSpec::Kind::Deconv:
      j["channels"] = {s.channels_in, s.channels_out};
      j["kernel"] = {s.kernel_h, s.kernel_w};
      j["stride"] = {s.stride_h, s.stride_w};
      j["padding"] = {s.pad_top, s.pad_bottom, s.pad_left, s.pad_right};
      break;
    case LayerSpec::Kind::FullyConnected:
      j["features"] = {s.channels_in, s.channels_out};
      break;
    case LayerSpec::Kind::Reshape:
      j["to"] = s.reshape_to;
      break;
    default:
      break;
  }
  return j;
}

LayerSpec spec_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  auto geti = [](const json& arr, int i) { return arr.at(i).get<int>(); };
  if (kind == "conv" || kind == "deconv") {
    const auto& ch = j.at("channels");
    const auto& k = j.at("kernel");
    const auto& st = j.at("stride");
    const auto& p = j.at("padding");
    auto make = kind == "conv" ? LayerSpec::conv : LayerSpec::deconv;
    return make(geti(ch, 0), geti(ch, 1), geti(k, 0), geti(k, 1), geti(st, 0),
                geti(st, 1), geti(p, 0), geti(p, 1), geti(p, 2), geti(p, 3));
  }
  if (kind == "fully_connected") {
    const auto& f = j.at("features");
    return LayerSpec::fully_connected(geti(f, 0), geti(f, 1));
  }
  if (kind == "relu") return LayerSpec::relu();
  if (kind == "batch_norm") return LayerSpec::batch_norm();
  if (kind == "reshape")
    return LayerSpec::reshape(j.at("to").get<std::vector<int>>());
  throw std::invalid_argument("unknown layer kind '" + kind + "'");
}

}  // namespace

std::string config_to_json(const NetworkConfig& config) {
  json j;
  j["variant"] = variant_name(config.variant);
  j["code_size"] = config.code_size;
  j["input_shape"] = config.input_shape;
  j["output_shape"] = config.output_shape;
  j["encoder"] = json::array();
  for (const auto& s : config.encoder) j["encoder"].push_back(spec_to_json(s));
  j["decoder"] = json::array();
  for (const auto& s : config.decoder) j["decoder"].push_back(spec_to_json(s));
  return j.dump();
}

NetworkConfig config_from_json(const std::string& json_text) {
  json j = json::parse(json_text);
  NetworkConfig c;
  c.variant = variant_from_name(j.at("variant").get<std::string>());
  c.code_size = j.at("code_size").get<int>();
  const auto& in = j.at("input_shape");
  const auto& out = j.at("output_shape");
  c.input_shape = {in.at(0).get<int>(), in.at(1).get<int>(), in.at(2).get<int>()};
  c.output_shape = {out.at(0).get<int>(), out.at(1).get<int>(), out.at(2).get<int>()};
  for (const auto& js : j.at("encoder")) c.encoder.push_back(spec_from_json(js));
  for (const auto& js : j.at("decoder")) c.decoder.push_back(spec_from_json(js));
  return c;
}

Network::Network(const NetworkConfig& config) : config_(config) {
  require(config_.output_shape[0] == config_.output_channels(),
          "output channel count inconsistent with variant");
  require(!config_.encoder.empty() && !config_.decoder.empty(),
          "encoder and decoder must be nonempty");

  // Materialize and walk shapes, validating the whole pipeline.
  std::vector<int> shape{1, config_.input_shape[0], config_.input_shape[1],
                         config_.input_shape[2]};
  size_t layer_index = 0;
  auto add = [&](const LayerSpec& spec, const char* prefix) {
    auto layer = make_layer(spec);
    layer->bind_input_shape(shape);
    shape = layer->output_shape(shape);
    for (Param* p : layer->params())
      p->name = prefix + std::to_string(layer_index) + "." + p->name;
    ++layer_index;
    layers_.push_back(std::move(layer));
  };
  for (const auto& spec : config_.encoder) add(spec, "enc");
  require(shape.size() == 2 && shape[1] == config_.code_size,
          "encoder output does not flatten to code_size (got " +
              shape_str(shape) + ")");
  for (const auto& spec : config_.decoder) add(spec, "dec");

  require(shape.size() == 4, "decoder must end with a 4-d grid");
  require(shape[1] == config_.output_shape[0],
          "decoder output channels mismatch");
  require(shape[2] >= config_.output_shape[1] && shape[3] >= config_.output_shape[2],
          "decoder output smaller than the target grid");
  crop_h_ = shape[2] - config_.output_shape[1];
  crop_w_ = shape[3] - config_.output_shape[2];
  final_shape_ = shape;
}

void Network::init_params(Rng& rng) {
  for (auto& layer : layers_) layer->init(rng);
}

std::vector<Param*> Network::trainable_params() {
  std::vector<Param*> out;
  for (auto& layer : layers_)
    for (Param* p : layer->params())
      if (p->trainable) out.push_back(p);
  return out;
}

std::vector<Param*> Network::state_params() {
  std::vector<Param*> out;
  for (auto& layer : layers_)
    for (Param* p : layer->params()) out.push_back(p);
  return out;
}

void Network::zero_grad() {
  for (Param* p : state_params()) {
    p->value.grad();
    p->value.zero_grad();
  }
}

Tensor Network::forward(const Tensor& input, bool training, Trace* trace) {
  require(input.rank() == 4 && input.dim(1) == config_.input_shape[0] &&
              input.dim(2) == config_.input_shape[1] &&
              input.dim(3) == config_.input_shape[2],
          "input shape mismatch: got " + shape_str(input.shape()));
  if (trace) {
    trace->caches.assign(layers_.size(), LayerCache{});
    trace->valid = true;
  }
  Tensor x = input;
  for (size_t i = 0; i < layers_.size(); ++i)
    x = layers_[i]->forward(x, training, trace ? &trace->caches[i] : nullptr);

  if (trace) trace->pre_crop_shape = x.shape();
  if (crop_h_ == 0 && crop_w_ == 0) return x;

  const int n = x.dim(0), c = x.dim(1);
  const int th = config_.output_shape[1], tw = config_.output_shape[2];
  const int oh = crop_h_ / 2, ow = crop_w_ / 2;
  Tensor out({n, c, th, tw});
  for (int b = 0; b < n; ++b)
    for (int d = 0; d < c; ++d)
      for (int y = 0; y < th; ++y)
        for (int z = 0; z < tw; ++z)
          out.at4(b, d, y, z) = x.at4(b, d, y + oh, z + ow);
  return out;
}

void Network::backward(const Tensor& grad_output, const Trace& trace) {
  require(trace.valid && trace.caches.size() == layers_.size(),
          "backward requires a trace recorded by forward");
  Tensor g = grad_output;
  if (crop_h_ != 0 || crop_w_ != 0) {
    std::vector<int> pre = trace.pre_crop_shape;
    Tensor embedded(pre);
    const int n = g.dim(0), c = g.dim(1), th = g.dim(2), tw = g.dim(3);
    const int oh = crop_h_ / 2, ow = crop_w_ / 2;
    for (int b = 0; b < n; ++b)
      for (int d = 0; d < c; ++d)
        for (int y = 0; y < th; ++y)
          for (int z = 0; z < tw; ++z)
            embedded.at4(b, d, y + oh, z + ow) = g.at4(b, d, y, z);
    g = std::move(embedded);
  }
  for (size_t i = layers_.size(); i-- > 0;)
    g = layers_[i]->backward(g, trace.caches[i]);
}

double Network::weight_sq_sum() const {
  double acc = 0.0;
  for (const auto& layer : layers_)
    for (Param* p : const_cast<Layer&>(*layer).params())
      if (p->decay)
        for (double v : p->value.values()) acc += v * v;
  return acc;
}

void Network::accumulate_decay_grad(double lambda) {
  if (lambda == 0.0) return;
  for (auto& layer : layers_)
    for (Param* p : layer->params())
      if (p->decay) {
        auto& g = p->value.grad();
        const auto& v = p->value.values();
        for (size_t i = 0; i < v.size(); ++i) g[i] += lambda * v[i];
      }
}

Network Network::clone() const {
  Network copy(config_);
  auto& self = const_cast<Network&>(*this);
  auto src = self.state_params();
  auto dst = copy.state_params();
  for (size_t i = 0; i < src.size(); ++i)
    dst[i]->value.values() = src[i]->value.values();
  copy.step = step;
  return copy;
}

// ---------------------------------------------------------------------------
// Checkpoint format (version 1, little-endian):
//   "GFCK" | u32 version | u64 step | u32 config_len | config JSON
//   u32 n_tensors | per tensor: u16 name_len, name, u8 ndim, u32 dims[],
//   f32 data[] | u8 has_opt | per trainable tensor: f32 m[], f32 v[]

namespace {

constexpr char kCkptMagic[4] = {'G', 'F', 'C', 'K'};

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

void put_f32_block(std::ostream& out, const std::vector<double>& values) {
  for (double v : values) put<float>(out, static_cast<float>(v));
}

void get_f32_block(std::istream& in, std::vector<double>& values) {
  for (auto& v : values) v = static_cast<double>(get<float>(in));
}

}  // namespace

void save_checkpoint(const std::string& path, const Network& net,
                     const AdamState* opt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  auto& mutable_net = const_cast<Network&>(net);

  out.write(kCkptMagic, 4);
  put<uint32_t>(out, 1);
  put<uint64_t>(out, static_cast<uint64_t>(net.step));
  const std::string cfg = config_to_json(net.config());
  put<uint32_t>(out, static_cast<uint32_t>(cfg.size()));
  out.write(cfg.data(), static_cast<std::streamsize>(cfg.size()));

  auto params = mutable_net.state_params();
  put<uint32_t>(out, static_cast<uint32_t>(params.size()));
  for (Param* p : params) {
    put<uint16_t>(out, static_cast<uint16_t>(p->name.size()));
    out.write(p->name.data(), static_cast<std::streamsize>(p->name.size()));
    put<uint8_t>(out, static_cast<uint8_t>(p->value.rank()));
    for (int d : p->value.shape()) put<uint32_t>(out, static_cast<uint32_t>(d));
    put_f32_block(out, p->value.values());
  }

  auto trainable = mutable_net.trainable_params();
  if (opt && opt->m.size() == trainable.size()) {
    put<uint8_t>(out, 1);
    for (size_t i = 0; i < trainable.size(); ++i) {
      put_f32_block(out, opt->m[i]);
      put_f32_block(out, opt->v[i]);
    }
  } else {
    put<uint8_t>(out, 0);
  }
  if (!out) throw std::runtime_error("checkpoint write failed");
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");

  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kCkptMagic, 4) != 0)
    throw std::runtime_error("not a checkpoint file: " + path);
  const uint32_t version = get<uint32_t>(in);
  if (version != 1) throw std::runtime_error("unsupported checkpoint version");
  const uint64_t step = get<uint64_t>(in);
  const uint32_t cfg_len = get<uint32_t>(in);
  std::string cfg(cfg_len, '\0');
  in.read(cfg.data(), cfg_len);

  LoadedCheckpoint loaded;
  loaded.net = std::make_unique<Network>(config_from_json(cfg));
  loaded.net->step = static_cast<int64_t>(step);

  auto params = loaded.net->state_params();
  const uint32_t n_tensors = get<uint32_t>(in);
  if (n_tensors != params.size())
    throw std::runtime_error("checkpoint tensor count mismatch");
  for (Param* p : params) {
    const uint16_t name_len = get<uint16_t>(in);
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    if (name != p->name)
      throw std::runtime_error("checkpoint tensor '" + name +
                               "' does not match model tensor '" + p->name + "'");
    const uint8_t ndim = get<uint8_t>(in);
    std::vector<int> dims(ndim);
    for (auto& d : dims) d = static_cast<int>(get<uint32_t>(in));
    if (dims != p->value.shape())
      throw std::runtime_error("checkpoint tensor '" + name + "' shape mismatch");
    get_f32_block(in, p->value.values());
  }

  const uint8_t has_opt = get<uint8_t>(in);
  if (in && has_opt == 1) {
    auto trainable = loaded.net->trainable_params();
    loaded.adam_m.resize(trainable.size());
    loaded.adam_v.resize(trainable.size());
    for (size_t i = 0; i < trainable.size(); ++i) {
      loaded.adam_m[i].assign(trainable[i]->value.size(), 0.0);
      loaded.adam_v[i].assign(trainable[i]->value.size(), 0.0);
      get_f32_block(in, loaded.adam_m[i]);
      get_f32_block(in, loaded.adam_v[i]);
    }
  }
  if (!in) throw std::runtime_error("truncated checkpoint: " + path);
  return loaded;
}

}  // namespace gapfill::nn
