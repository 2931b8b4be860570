// Copyright (C) 2026 the gapfill authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "gapfill/adam.hpp"
#include "gapfill/loss.hpp"
#include "gapfill/network.hpp"
#include "nn_test_util.hpp"

using namespace gapfill;
using namespace gapfill::nn;
using gapfill::testutil::fd_check;
using gapfill::testutil::random_tensor;
using gapfill::testutil::tiny_config;

namespace {

Tensor forward_batch1(Network& net, const Tensor& input) {
  return net.forward(input, /*training=*/false);
}

}  // namespace

TEST_CASE("canonical configs walk the published shape pipeline") {
  for (Variant v : {Variant::Magnitude, Variant::Complex}) {
    Network net(NetworkConfig::canonical(v));
    Rng rng(1);
    net.init_params(rng);
    Tensor input = random_tensor({1, 4, 257, 16}, rng, 0.1);
    Tensor out = forward_batch1(net, input);
    REQUIRE(out.rank() == 4);
    CHECK(out.dim(0) == 1);
    CHECK(out.dim(1) == (v == Variant::Complex ? 2 : 1));
    CHECK(out.dim(2) == 257);
    CHECK(out.dim(3) == 11);
  }
}

TEST_CASE("toy config reaches the same output grid") {
  Network net(NetworkConfig::toy(Variant::Magnitude));
  Rng rng(2);
  net.init_params(rng);
  Tensor out = forward_batch1(net, random_tensor({2, 4, 257, 16}, rng, 0.1));
  CHECK(out.dim(0) == 2);
  CHECK(out.dim(1) == 1);
  CHECK(out.dim(2) == 257);
  CHECK(out.dim(3) == 11);
}

TEST_CASE("inconsistent configs are rejected at construction") {
  SUBCASE("encoder that does not flatten to code_size") {
    auto cfg = tiny_config(Variant::Magnitude);
    cfg.code_size = 64;
    CHECK_THROWS_AS(Network net(cfg), std::invalid_argument);
  }
  SUBCASE("decoder output smaller than the target grid") {
    auto cfg = tiny_config(Variant::Magnitude);
    cfg.output_shape = {1, 64, 64};
    CHECK_THROWS_AS(Network net(cfg), std::invalid_argument);
  }
  SUBCASE("variant and output channels must agree") {
    auto cfg = tiny_config(Variant::Magnitude);
    cfg.output_shape[0] = 2;
    CHECK_THROWS_AS(Network net(cfg), std::invalid_argument);
  }
}

TEST_CASE("zero weights map everything to zero") {
  Network net(NetworkConfig::toy(Variant::Magnitude));
  // All linear weights stay zero, so every pre-activation is zero and the
  // output collapses to the batch-norm shift, which is zero too.
  Rng rng(3);
  Tensor input = random_tensor({1, 4, 257, 16}, rng);
  Tensor out = forward_batch1(net, input);
  for (size_t i = 0; i < out.size(); ++i) CHECK(out[i] == 0.0);
}

TEST_CASE("random networks are not input-invariant") {
  Network net(NetworkConfig::toy(Variant::Magnitude));
  Rng rng(4);
  net.init_params(rng);
  Tensor input = random_tensor({1, 4, 257, 16}, rng, 0.3);
  Tensor doubled = input;
  for (auto& v : doubled.values()) v *= 2.0;
  Tensor a = forward_batch1(net, input);
  Tensor b = forward_batch1(net, doubled);
  double diff = 0.0;
  for (size_t i = 0; i < a.size(); ++i) diff += std::abs(a[i] - b[i]);
  CHECK(diff > 1e-6);
}

TEST_CASE("a decoder that overshoots the grid is center-cropped") {
  auto cfg = tiny_config(Variant::Magnitude);
  cfg.output_shape = {1, 7, 5};  // deconv yields 9 x 7
  Network net(cfg);
  Rng rng(5);
  net.init_params(rng);
  Tensor out = forward_batch1(net, random_tensor({1, 4, 9, 8}, rng));
  CHECK(out.dim(2) == 7);
  CHECK(out.dim(3) == 5);
}

TEST_CASE("loss golden values") {
  LossParams params;  // c = 5, lambda = 0.01
  Tensor target({2, 3});
  Tensor pred({2, 3});

  SUBCASE("nmse of an exact prediction is zero") {
    target.fill(0.7);
    pred = target;
    CHECK(loss_nmse(target, pred) == 0.0);
  }
  SUBCASE("nmse against a zero prediction is one") {
    Rng rng(6);
    for (auto& v : target.values()) v = rng.normal();
    pred.fill(0.0);
    CHECK(loss_nmse(target, pred) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("nmse of a doubled prediction is one") {
    Rng rng(7);
    for (auto& v : target.values()) v = rng.normal();
    for (size_t i = 0; i < pred.size(); ++i) pred[i] = 2.0 * target[i];
    CHECK(loss_nmse(target, pred) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("nmse rejects zero targets") {
    target.fill(0.0);
    CHECK_THROWS_AS(loss_nmse(target, pred), std::invalid_argument);
  }
  SUBCASE("F with ||S||^2 = 0.8 against zero is 0.8") {
    target.fill(0.0);
    target[0] = std::sqrt(0.8);
    pred.fill(0.0);
    CHECK(loss_f(target, pred, params) == doctest::Approx(0.8).epsilon(1e-12));
  }
  SUBCASE("F of zero target and zero prediction is zero") {
    target.fill(0.0);
    pred.fill(0.0);
    CHECK(loss_f(target, pred, params) == 0.0);
  }
  SUBCASE("F of zero target and unit-energy prediction is c") {
    target.fill(0.0);
    pred.fill(0.0);
    pred[3] = 1.0;
    CHECK(loss_f(target, pred, params) == doctest::Approx(5.0).epsilon(1e-12));
  }
  SUBCASE("loss ordering: F approaches NMSE for energetic targets") {
    Rng rng(8);
    Tensor big({64, 8});
    for (auto& v : big.values()) v = rng.normal();  // ||S||^2 ~ 512 >> 1/c
    Tensor noisy = big;
    for (auto& v : noisy.values()) v += 0.1 * rng.normal();
    const double ratio = loss_f(big, noisy, params) / loss_nmse(big, noisy);
    CHECK(ratio > 0.99);
    CHECK(ratio <= 1.0);
  }
  SUBCASE("loss ordering: F stays bounded as the target vanishes") {
    Tensor small({2, 3});
    small.fill(0.0);
    Tensor p2({2, 3});
    p2.fill(0.0);
    p2[0] = 0.3;
    CHECK(loss_f(small, p2, params) ==
          doctest::Approx(params.c * 0.09).epsilon(1e-12));
  }
}

TEST_CASE("total_loss includes the weight decay term") {
  // A 1x1 fully connected model holds a single weight.
  NetworkConfig cfg;
  cfg.variant = Variant::Magnitude;
  cfg.code_size = 1;
  cfg.input_shape = {1, 1, 1};
  cfg.output_shape = {1, 1, 1};
  cfg.encoder.push_back(LayerSpec::reshape({1}));
  cfg.decoder.push_back(LayerSpec::fully_connected(1, 1));
  cfg.decoder.push_back(LayerSpec::reshape({1, 1, 1}));
  Network net(cfg);
  auto params = net.trainable_params();
  REQUIRE(params.size() == 2);  // weight and bias
  params[0]->value[0] = 2.0;

  LossParams lp;  // lambda = 0.01
  Tensor t({1, 1, 1, 1}), p({1, 1, 1, 1});
  SUBCASE("single weight 2 with F = 0 gives 0.02") {
    CHECK(total_loss(t, p, net, lp) == doctest::Approx(0.02).epsilon(1e-12));
  }
  SUBCASE("lambda = 0 strips the penalty") {
    lp.lambda = 0.0;
    CHECK(total_loss(t, p, net, lp) == 0.0);
  }
  SUBCASE("zero weights leave only F") {
    params[0]->value[0] = 0.0;
    p[0] = 0.5;
    CHECK(total_loss(t, p, net, lp) ==
          doctest::Approx(loss_f(t, p, lp)).epsilon(1e-12));
  }
}

TEST_CASE("backward reproduces the scalar quadratic gradient") {
  // f(w) = (w*x - 3)^2 with x = 1: df/dw at w=0 is -6.
  NetworkConfig cfg;
  cfg.variant = Variant::Magnitude;
  cfg.code_size = 1;
  cfg.input_shape = {1, 1, 1};
  cfg.output_shape = {1, 1, 1};
  cfg.encoder.push_back(LayerSpec::reshape({1}));
  cfg.decoder.push_back(LayerSpec::fully_connected(1, 1));
  cfg.decoder.push_back(LayerSpec::reshape({1, 1, 1}));
  Network net(cfg);

  Tensor input({1, 1, 1, 1});
  input[0] = 1.0;
  Network::Trace trace;
  Tensor out = net.forward(input, true, &trace);
  CHECK(out[0] == 0.0);
  // d((y-3)^2)/dy = 2(y-3) = -6 at y = 0.
  Tensor grad_out({1, 1, 1, 1});
  grad_out[0] = -6.0;
  net.zero_grad();
  net.backward(grad_out, trace);
  auto params = net.trainable_params();
  CHECK(params[0]->value.grad()[0] == doctest::Approx(-6.0));  // weight
  CHECK(params[1]->value.grad()[0] == doctest::Approx(-6.0));  // bias
}

TEST_CASE("backward demands a recorded trace") {
  Network net(tiny_config(Variant::Magnitude));
  Network::Trace empty;
  Tensor grad({1, 1, 9, 7});
  CHECK_THROWS_AS(net.backward(grad, empty), std::invalid_argument);
}

TEST_CASE("finite differences confirm the composed network gradient") {
  // Through conv+relu+bn+reshape+fc+deconv via the training objective.
  Network net(tiny_config(Variant::Complex));
  Rng rng(11);
  net.init_params(rng);
  LossParams lp;

  Tensor input = random_tensor({3, 4, 9, 8}, rng, 0.5);
  Tensor target = random_tensor({3, 2, 9, 7}, rng, 0.5);

  auto loss_value = [&]() {
    Tensor pred = net.forward(input, true);
    return loss_f_batch(target, pred, lp) + 0.5 * lp.lambda * net.weight_sq_sum();
  };

  Network::Trace trace;
  Tensor pred = net.forward(input, true, &trace);
  net.zero_grad();
  net.backward(loss_f_batch_grad(target, pred, lp), trace);
  net.accumulate_decay_grad(lp.lambda);

  testutil::FdStats stats;
  for (Param* p : net.trainable_params())
    stats = fd_check(p->value.values(), p->value.grad(), loss_value, 1e-4, 40,
                     rng, stats);
  CHECK(stats.checked >= 200);
  CHECK(stats.max_rel < 1e-4);
}

TEST_CASE("adam") {
  SUBCASE("first step moves each coordinate by about lr") {
    NetworkConfig cfg = tiny_config(Variant::Magnitude);
    Network net(cfg);
    Rng rng(12);
    net.init_params(rng);
    auto params = net.trainable_params();
    std::vector<double> before = params[0]->value.values();
    for (Param* p : params) {
      p->value.grad();
      for (auto& g : p->value.grad()) g = rng.normal();
    }
    Adam adam(params);
    adam.step(1e-2, 1);
    int moved = 0;
    for (size_t i = 0; i < before.size(); ++i) {
      const double delta = std::abs(params[0]->value.values()[i] - before[i]);
      if (delta > 0.0) {
        ++moved;
        CHECK(delta < 1.01e-2);
        CHECK(delta > 0.9e-2);
      }
    }
    CHECK(moved > 0);
  }
  SUBCASE("zero gradients leave the weights untouched") {
    Network net(tiny_config(Variant::Magnitude));
    Rng rng(13);
    net.init_params(rng);
    auto params = net.trainable_params();
    std::vector<double> before = params[0]->value.values();
    net.zero_grad();
    Adam adam(params);
    for (int t = 1; t <= 50; ++t) adam.step(1e-2, t);
    CHECK(params[0]->value.values() == before);
  }
  SUBCASE("quadratic bowl converges") {
    // Minimize w^2 with gradient 2w from w = 3.
    Param w;
    w.name = "w";
    w.value = Tensor({1});
    w.value[0] = 3.0;
    w.value.grad();
    Adam adam({&w});
    for (int t = 1; t <= 5000; ++t) {
      w.value.grad()[0] = 2.0 * w.value[0];
      adam.step(1e-2, t);
    }
    CHECK(std::abs(w.value[0]) < 1e-3);
  }
}

TEST_CASE("batch norm statistics behave") {
  auto cfg = tiny_config(Variant::Magnitude);
  SUBCASE("inference is independent of batch composition") {
    Network net(cfg);
    Rng rng(14);
    net.init_params(rng);
    Tensor one = random_tensor({1, 4, 9, 8}, rng);
    Tensor pair({2, 4, 9, 8});
    std::copy(one.values().begin(), one.values().end(), pair.values().begin());
    for (size_t i = 0; i < one.size(); ++i)
      pair[one.size() + i] = rng.normal();
    Tensor a = net.forward(one, false);
    Tensor b = net.forward(pair, false);
    for (size_t i = 0; i < a.size(); ++i)
      CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
  }
  SUBCASE("identical-sample batches match inference after statistics sync") {
    Network net(cfg);
    Rng rng(15);
    net.init_params(rng);
    Tensor one = random_tensor({1, 4, 9, 8}, rng);
    Tensor batch({4, 4, 9, 8});
    for (int n = 0; n < 4; ++n)
      std::copy(one.values().begin(), one.values().end(),
                batch.values().begin() + static_cast<size_t>(n) * one.size());
    // Drive the running statistics to the batch statistics.
    Tensor trained;
    for (int it = 0; it < 400; ++it) trained = net.forward(batch, true);
    Tensor inferred = net.forward(one, false);
    for (size_t i = 0; i < inferred.size(); ++i)
      CHECK(std::abs(inferred[i] - trained[i]) < 1e-5);
  }
}

TEST_CASE("checkpoints round-trip the whole model state") {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "gapfill_ckpt_test";
  fs::create_directories(dir);
  const std::string path = (dir / "model.ckpt").string();

  Network net(tiny_config(Variant::Complex));
  Rng rng(16);
  net.init_params(rng);
  net.step = 1234;
  Adam adam(net.trainable_params());
  // One step to make the moments nontrivial.
  for (Param* p : net.trainable_params()) {
    p->value.grad();
    for (auto& g : p->value.grad()) g = rng.normal();
  }
  adam.step(1e-3, 1);

  save_checkpoint(path, net, &adam.state());
  auto loaded = load_checkpoint(path);
  CHECK(loaded.net->step == 1234);
  CHECK(loaded.net->config().variant == Variant::Complex);
  CHECK_FALSE(loaded.adam_m.empty());

  Tensor input = random_tensor({1, 4, 9, 8}, rng);
  Tensor a = net.forward(input, false);
  Tensor b = loaded.net->forward(input, false);
  for (size_t i = 0; i < a.size(); ++i)
    CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-6));

  SUBCASE("corrupted files are rejected") {
    std::ofstream(path, std::ios::binary) << "GFCKgarbage";
    CHECK_THROWS_AS(load_checkpoint(path), std::runtime_error);
  }
}
