#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numeric>

#include "aespec/autoencoder.hpp"
#include "aespec/data.hpp"
#include "aespec/rng.hpp"

using namespace aespec;
using namespace aespec::ae;

namespace {

bool margin_safe(const ActivationCache& c, double margin) {
  for (std::size_t l = c.first_layer; l < kLayerCount; ++l)
    if (activation_of(l) == Activation::Relu)
      for (double v : c.pre[l])
        if (std::abs(v) <= margin) return false;
  return true;
}

// A parameter/input pair whose pre-activations all stay clear of the ReLU kink.
std::pair<AutoencoderParams, std::vector<double>> margin_safe_point(std::size_t d, std::uint64_t seed) {
  const auto pts = data::synthetic_dataset(64, seed);
  for (std::uint64_t s = seed;; ++s) {
    AutoencoderParams p = init(d, s);
    for (const auto& x : pts.points)
      if (margin_safe(forward(p, x), 1e-3)) return {p, x};
  }
}

double loss_at(const AutoencoderParams& p, const std::vector<double>& x) {
  return loss(forward(p, x).reconstruction(), x);
}

}  // namespace

TEST_CASE("init bounds and determinism") {
  const auto p = init(8, 1);
  p.validate();
  for (double v : p.layers[0].weights.data()) {
    CHECK_UNARY(v >= -1.0 / 28.0);
    CHECK_UNARY(v <= 1.0 / 28.0);
  }
  for (double v : p.layers[4].weights.data()) CHECK_UNARY(std::abs(v) <= 1.0 / std::sqrt(8.0));
  for (double v : p.layers[4].biases) CHECK_UNARY(std::abs(v) <= 1.0 / std::sqrt(8.0));

  const auto w = p.layers[0].weights.data();
  const double mean = std::accumulate(w.begin(), w.end(), 0.0) / w.size();
  const double sigma = (1.0 / 28.0) / std::sqrt(3.0);
  CHECK(std::abs(mean) <= 3.0 * sigma / std::sqrt(128.0 * 784.0));

  CHECK(init(8, 1) == init(8, 1));
  CHECK_FALSE(init(8, 1) == init(8, 2));
  CHECK_THROWS_AS(init(1, 0), DomainError);
  CHECK_THROWS_AS(init(21, 0), DomainError);
}

TEST_CASE("forward pass basics") {
  const auto zero = AutoencoderParams::zeros(5);
  const auto x = data::synthetic_dataset(1, 3).points[0];
  const auto c = forward(zero, x);
  CHECK(c.latent() == std::vector<double>(5, 0.0));
  CHECK(c.reconstruction() == std::vector<double>(784, 0.0));

  auto p = init(5, 9);
  for (auto& layer : p.layers) std::fill(layer.biases.begin(), layer.biases.end(), 0.0);
  const auto c0 = forward(p, std::vector<double>(784, 0.0));
  CHECK(c0.reconstruction() == std::vector<double>(784, 0.0));

  const auto q = init(5, 10);
  const auto cq = forward(q, x);
  CHECK(cq.latent() == cq.post[3]);
  CHECK(cq.latent() == cq.pre[3]);
  for (double y : cq.reconstruction()) CHECK_UNARY(std::abs(y) < 1.0);
  CHECK_THROWS_AS(forward(q, std::vector<double>(783, 0.0)), linalg::ShapeError);
}

TEST_CASE("mean squared error") {
  const std::vector<double> ones(784, 1.0), zeros(784, 0.0), neg(784, -1.0);
  CHECK(loss(ones, ones) == 0.0);
  CHECK(loss(zeros, ones) == 1.0);
  CHECK(loss(neg, ones) == 4.0);
}

TEST_CASE("zero loss gives zero gradients") {
  const auto p = AutoencoderParams::zeros(4);
  const auto g = backward(p, forward(p, std::vector<double>(784, 0.0)));
  for (const auto& layer : g.layers) {
    for (double v : layer.weights.data()) CHECK(v == 0.0);
    for (double v : layer.biases) CHECK(v == 0.0);
  }
}

TEST_CASE("last-layer bias gradient matches the hand chain rule") {
  const auto p = init(6, 4);
  const auto x = data::synthetic_dataset(1, 8).points[0];
  const auto c = forward(p, x);
  const auto g = backward(p, c);
  const auto& y = c.reconstruction();
  for (std::size_t i = 0; i < 784; ++i) {
    CHECK(g.layers[7].biases[i] == doctest::Approx(2.0 / 784.0 * (y[i] - x[i]) * (1.0 - y[i] * y[i])).epsilon(1e-12));
  }
}

TEST_CASE("backward agrees with central finite differences") {
  const double h = 1e-5;
  for (std::size_t d : {2u, 7u}) {
    auto [p, x] = margin_safe_point(d, 31 * d);
    const auto g = backward(p, forward(p, x));
    CounterRng pick(d);
    double worst = 0.0;
    for (std::size_t l = 0; l < kLayerCount; ++l) {
      auto check = [&](double& slot, double analytic) {
        const double saved = slot;
        slot = saved + h;
        const double up = loss_at(p, x);
        slot = saved - h;
        const double down = loss_at(p, x);
        slot = saved;
        worst = std::max(worst, std::abs((up - down) / (2.0 * h) - analytic));
      };
      for (std::size_t i = 0; i < p.layers[l].biases.size(); ++i) check(p.layers[l].biases[i], g.layers[l].biases[i]);
      auto w = p.layers[l].weights.data();
      auto gw = g.layers[l].weights.data();
      const bool all = w.size() <= 4096;
      for (std::size_t k = 0; k < (all ? w.size() : 2000); ++k) {
        const std::size_t idx = all ? k : pick.below(w.size());
        check(w[idx], gw[idx]);
      }
    }
    CHECK(worst < 1e-4);
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("training contract") {
  const auto ds = data::synthetic_dataset(300, 5);
  const auto p0 = init(4, 0);

  SUBCASE("zero epochs returns the initialisation only") {
    TrainingConfig cfg;
    cfg.epochs = 0;
    const auto r = train(p0, ds.points, cfg);
    REQUIRE(r.checkpoints.size() == 1);
    CHECK(r.checkpoints[0].epoch == 0);
    CHECK(r.checkpoints[0].params == p0);
    CHECK(r.epoch_losses.empty());
  }

  SUBCASE("single-sample SGD moves parameters iff the gradient is nonzero") {
    TrainingConfig cfg;
    cfg.epochs = 1;
    cfg.optimizer = Sgd{};
    cfg.learning_rate = 0.1;
    cfg.checkpoint_epochs = {1};
    const auto zero = AutoencoderParams::zeros(4);
    const std::vector<std::vector<double>> origin{std::vector<double>(784, 0.0)};
    CHECK(train(zero, origin, cfg).checkpoints.back().params == zero);
    const std::vector<std::vector<double>> one{ds.points[0]};
    CHECK_FALSE(train(p0, one, cfg).checkpoints.back().params == p0);
  }

  SUBCASE("deterministic, range-preserving, and descending") {
    TrainingConfig cfg;
    cfg.epochs = 3;
    cfg.checkpoint_epochs = {1, 2, 3};
    cfg.batch_size = 32;
    const auto a = train(p0, ds.points, cfg);
    const auto b = train(p0, ds.points, cfg);
    REQUIRE(a.checkpoints.size() == 4);
    CHECK(a.checkpoints[0].params == p0);
    for (std::size_t i = 0; i < a.checkpoints.size(); ++i) {
      CHECK(a.checkpoints[i].params == b.checkpoints[i].params);
      for (std::size_t k = 0; k < 20; ++k)
        for (double y : forward(a.checkpoints[i].params, ds.points[k]).reconstruction()) CHECK_UNARY(std::abs(y) <= 1.0);
    }
    CHECK(a.epoch_losses == b.epoch_losses);
    CHECK(a.epoch_losses.back() < a.epoch_losses.front());
  }

  SUBCASE("checkpoint sink receives checkpoints in order") {
    TrainingConfig cfg;
    cfg.epochs = 2;
    cfg.checkpoint_epochs = {2};
    std::vector<std::size_t> seen;
    const auto r = train(p0, ds.points, cfg, [&](const Checkpoint& c) { seen.push_back(c.epoch); });
    CHECK(seen == std::vector<std::size_t>{0, 2});
    CHECK(r.checkpoints.empty());
  }

  SUBCASE("non-finite loss aborts with its location") {
    TrainingConfig cfg;
    cfg.epochs = 2;
    cfg.optimizer = Sgd{};
    cfg.learning_rate = 1e300;
    try {
      train(p0, ds.points, cfg);
      FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
      CHECK(std::string(e.what()).find("epoch") != std::string::npos);
      CHECK(std::string(e.what()).find("batch") != std::string::npos);
    }
  }
}

TEST_CASE("epoch permutations are reproducible shuffles") {
  const auto a = epoch_permutation(1000, 3, 1);
  CHECK(a == epoch_permutation(1000, 3, 1));
  CHECK_FALSE(a == epoch_permutation(1000, 3, 2));
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) CHECK(sorted[i] == i);
}

TEST_CASE("checkpoint normalisation") {
  TrainingConfig cfg;
  cfg.epochs = 10;
  cfg.checkpoint_epochs = {50, 4, 1, 4, 10};
  CHECK(cfg.normalized_checkpoints() == std::vector<std::size_t>{0, 1, 4, 10});
}

TEST_CASE("checkpoint files round-trip bit-exactly") {
  const auto p = init(13, 77);
  const auto bytes = encode_checkpoint(p, 50, 0xdeadbeefULL);
  CHECK(std::string(bytes.begin(), bytes.begin() + 8) == "AESPEC01");
  CheckpointHeader h{};
  const auto q = decode_checkpoint(bytes, &h);
  CHECK(q == p);
  CHECK(h.latent_dim == 13);
  CHECK(h.epoch == 50);
  CHECK(h.seed == 0xdeadbeefULL);
  CHECK(encode_checkpoint(q, 50, 0xdeadbeefULL) == bytes);
  // header (24) + 8 records of 8-byte shape + 8-byte values
  CHECK(bytes.size() == 24 + 8 * 8 + 8 * p.parameter_count());

  const auto path = std::filesystem::temp_directory_path() / "aespec_test_roundtrip.ckpt";
  write_checkpoint(path, p, 50, 0xdeadbeefULL);
  CHECK(read_checkpoint(path) == p);
  CHECK(data::read_file(path) == bytes);
  std::filesystem::remove(path);

  auto bad = bytes;
  bad[7] = '2';
  CHECK_THROWS_AS(decode_checkpoint(bad), FormatError);
  CHECK_THROWS_AS(decode_checkpoint(std::span(bytes).first(bytes.size() - 1)), FormatError);
  auto wrong_dim = bytes;
  wrong_dim[8] = 14;  // latent dim no longer matches the stored shapes
  CHECK_THROWS_AS(decode_checkpoint(wrong_dim), FormatError);
}
