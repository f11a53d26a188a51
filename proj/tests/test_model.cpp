#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracle_helpers.hpp"
#include "rudn/feature_extractor.hpp"
#include "rudn/grad_check.hpp"
#include "rudn/resunet.hpp"

using namespace rudn;
using oracle::max_abs_diff;

namespace {

double weighted_sum(const DTensor& y, const DTensor& r) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.data.size(); ++i) s += y.data[i] * r.data[i];
  return s;
}

DTensor random_field(Shape s, std::uint64_t seed) {
  Rng rng(seed);
  DTensor r(s);
  oracle::fill_uniform(r, rng, -1.0, 1.0);
  return r;
}

// parameter-count formula computed independently of the model code:
// a residual block (in -> out) holds two 3x3 convs, a 1x1 projection, three
// bias vectors and three batchnorm (gamma, beta) pairs.
std::int64_t block_params(std::int64_t in, std::int64_t out) {
  return 9 * in * out + out     // conv1
       + 9 * out * out + out    // conv2
       + in * out + out         // shortcut 1x1
       + 6 * out;               // three BN pairs
}

std::int64_t expected_params(const ModelConfig& cfg) {
  std::int64_t total = 0;
  std::int64_t in = 1;
  for (int c : cfg.channels) {
    total += block_params(in, c);
    in = c;
  }
  total += block_params(in, cfg.bottleneck_channels);
  std::int64_t deeper = cfg.bottleneck_channels;
  for (int l = cfg.depth - 1; l >= 0; --l) {
    const std::int64_t c = cfg.channels[l];
    total += 4 * deeper * c + c;              // 2x2 transposed conv
    total += block_params(2 * c, c);          // decoder block on concat
    deeper = c;
  }
  total += cfg.channels[0] + 1;               // 1x1 head
  return total;
}

}  // namespace

// ---------------------------------------------------------------------------
// residual block
// ---------------------------------------------------------------------------

TEST_CASE("residual block: shape contract and nonnegative output") {
  Rng rng(1);
  ResidualBlock<float> block(3, 8, "blk");
  block.init(rng);
  Tensor x(Shape{2, 8, 8, 3});
  oracle::fill_uniform(x, rng);
  Tensor y = block.forward(x, Mode::kTrain);
  CHECK(y.shape == Shape{2, 8, 8, 8});
  for (float v : y.data) CHECK(v >= 0.0f);  // final ReLU
  CHECK(block.params().size() == 12);
  CHECK(block.state_tensors().size() == 6);
}

TEST_CASE("residual block: full gradient check on an 8x8 input") {
  Rng rng(2);
  ResidualBlock<double> block(2, 3, "blk");
  block.init(rng);
  Parameter<double> xp("x", Shape{1, 8, 8, 2});
  oracle::fill_uniform(xp.value, rng);
  const DTensor r = random_field(Shape{1, 8, 8, 3}, 77);

  std::vector<Parameter<double>*> params = block.params();
  for (auto* p : params) p->zero_grad();
  xp.zero_grad();
  block.forward(xp.value, Mode::kTrain);
  xp.grad = block.backward(r);
  auto loss = [&] {
    return weighted_sum(block.forward(xp.value, Mode::kTrain), r);
  };
  std::vector<Parameter<double>*> all = params;
  all.push_back(&xp);
  auto res = grad_check(loss, all);
  CAPTURE(res.worst_param);
  CHECK(res.max_rel_error < 1e-5);  // comfortably, in 64-bit
  CHECK(res.max_rel_error < 1e-7);
}

TEST_CASE("residual block: infer mode gradient check") {
  Rng rng(3);
  ResidualBlock<double> block(2, 2, "blk");
  block.init(rng);
  Parameter<double> xp("x", Shape{1, 4, 4, 2});
  oracle::fill_uniform(xp.value, rng);
  // move the running stats off their initial values first
  block.forward(xp.value, Mode::kTrain);
  const DTensor r = random_field(Shape{1, 4, 4, 2}, 76);

  std::vector<Parameter<double>*> params = block.params();
  for (auto* p : params) p->zero_grad();
  block.forward(xp.value, Mode::kInfer);
  xp.grad = block.backward(r);
  auto loss = [&] {
    return weighted_sum(block.forward(xp.value, Mode::kInfer), r);
  };
  std::vector<Parameter<double>*> all = params;
  all.push_back(&xp);
  auto res = grad_check(loss, all);
  CAPTURE(res.worst_param);
  CHECK(res.max_rel_error < 1e-6);
}

// ---------------------------------------------------------------------------
// model config
// ---------------------------------------------------------------------------

TEST_CASE("model config: validation") {
  ModelConfig cfg;  // defaults: 200x400, depth 3, {32,64,128}, 256
  CHECK_NOTHROW(cfg.validate());

  ModelConfig bad = cfg;
  bad.input_height = 100;  // 100 not divisible by 8
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = cfg;
  bad.channels = {32, 64};  // size != depth
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = cfg;
  bad.depth = 0;
  bad.channels = {};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = cfg;
  bad.bottleneck_channels = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// full model
// ---------------------------------------------------------------------------

TEST_CASE("resunet: default config keeps shape, stays in (0,1), pins params") {
  ModelConfig cfg;  // 200x400, depth 3
  ResUNet<float> model(cfg);

  // regression constant for the default architecture
  CHECK(model.param_count() == 2016001);
  CHECK(model.param_count() == expected_params(cfg));

  Rng rng(4);
  Tensor x(Shape{1, 200, 400, 1});
  oracle::fill_uniform(x, rng, 0.0, 1.0);
  Tensor y = model.forward(x, Mode::kTrain);
  CHECK(y.shape == x.shape);
  for (float v : y.data) {
    REQUIRE(v > 0.0f);
    REQUIRE(v < 1.0f);
  }
}

TEST_CASE("resunet: 96x192 depth-2 variant keeps shape and range") {
  ModelConfig cfg;
  cfg.input_height = 96;
  cfg.input_width = 192;
  cfg.depth = 2;
  cfg.channels = {8, 16};
  cfg.bottleneck_channels = 32;
  ResUNet<float> model(cfg);
  CHECK(model.param_count() == expected_params(cfg));

  Rng rng(5);
  Tensor x(Shape{2, 96, 192, 1});
  oracle::fill_uniform(x, rng, 0.0, 1.0);
  Tensor y = model.forward(x, Mode::kInfer);
  CHECK(y.shape == x.shape);
  for (float v : y.data) {
    REQUIRE(v > 0.0f);
    REQUIRE(v < 1.0f);
  }

  Tensor wrong(Shape{1, 96, 190, 1});
  CHECK_THROWS_AS(model.forward(wrong, Mode::kInfer), std::invalid_argument);
}

TEST_CASE("resunet: initialization is deterministic per seed") {
  ModelConfig cfg;
  cfg.input_height = 16;
  cfg.input_width = 16;
  cfg.depth = 1;
  cfg.channels = {8};
  cfg.bottleneck_channels = 16;
  cfg.seed = 11;

  ResUNet<float> a(cfg), b(cfg);
  auto pa = a.params(), pb = b.params();
  REQUIRE(pa.size() == pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i) {
    CHECK(pa[i]->name == pb[i]->name);
    CHECK(max_abs_diff(pa[i]->value, pb[i]->value) == 0.0);
  }

  ModelConfig other = cfg;
  other.seed = 12;
  ResUNet<float> c(other);
  auto pc = c.params();
  double diff = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    diff = std::max(diff, max_abs_diff(pa[i]->value, pc[i]->value));
  }
  CHECK(diff > 1e-4);
}

TEST_CASE("resunet: He initialization variance on the largest kernel") {
  ModelConfig cfg;  // default: bottleneck conv2 is 3x3x256x256
  ResUNet<float> model(cfg);
  for (Parameter<float>* p : model.params()) {
    if (p->name == "bottleneck.conv2.w") {
      const double fan_in = 9.0 * 256.0;
      std::vector<double> vals(p->value.data.begin(), p->value.data.end());
      oracle::Moments m = oracle::moments(vals);
      CHECK(std::abs(m.mean) < 0.001);
      const double var = m.stddev * m.stddev;
      CHECK(var == doctest::Approx(2.0 / fan_in).epsilon(0.10));
      return;
    }
  }
  FAIL("bottleneck.conv2.w not found");
}

TEST_CASE("resunet: biases and batchnorm start at identity") {
  ModelConfig cfg;
  cfg.input_height = 16;
  cfg.input_width = 16;
  cfg.depth = 1;
  cfg.channels = {4};
  cfg.bottleneck_channels = 8;
  ResUNet<float> model(cfg);
  for (Parameter<float>* p : model.params()) {
    const std::string& n = p->name;
    if (n.ends_with(".b") || n.ends_with("beta")) {
      for (float v : p->value.data) CHECK(v == 0.0f);
    }
    if (n.ends_with("gamma")) {
      for (float v : p->value.data) CHECK(v == 1.0f);
    }
  }
}

TEST_CASE("resunet: skip connections are load-bearing") {
  ModelConfig cfg;
  cfg.input_height = 32;
  cfg.input_width = 32;
  cfg.depth = 2;
  cfg.channels = {8, 16};
  cfg.bottleneck_channels = 32;
  cfg.seed = 21;
  ResUNet<float> model(cfg);

  Rng rng(6);
  Tensor x(Shape{1, 32, 32, 1});
  oracle::fill_uniform(x, rng, 0.0, 1.0);

  Tensor clean = model.forward(x, Mode::kInfer);
  for (int level = 0; level < cfg.depth; ++level) {
    model.ablate_skip(level);
    Tensor ablated = model.forward(x, Mode::kInfer);
    CAPTURE(level);
    CHECK(max_abs_diff(clean, ablated) > 1e-4);
  }
  // the ablation hook arms a single forward only
  Tensor again = model.forward(x, Mode::kInfer);
  CHECK(max_abs_diff(clean, again) == 0.0);
}

TEST_CASE("resunet: miniature end-to-end gradient check") {
  ModelConfig cfg;
  cfg.input_height = 8;
  cfg.input_width = 8;
  cfg.depth = 1;
  cfg.channels = {4};
  cfg.bottleneck_channels = 8;
  cfg.seed = 31;
  ResUNet<double> model(cfg);

  Rng rng(7);
  Parameter<double> xp("x", Shape{1, 8, 8, 1});
  oracle::fill_uniform(xp.value, rng, 0.1, 0.9);
  const DTensor r = random_field(Shape{1, 8, 8, 1}, 75);

  std::vector<Parameter<double>*> params = model.params();
  for (auto* p : params) p->zero_grad();
  model.forward(xp.value, Mode::kTrain);
  xp.grad = model.backward(r);
  auto loss = [&] {
    return weighted_sum(model.forward(xp.value, Mode::kTrain), r);
  };
  std::vector<Parameter<double>*> all = params;
  all.push_back(&xp);
  auto res = grad_check(loss, all);
  CAPTURE(res.worst_param);
  CHECK(res.max_rel_error < 1e-5);
}

// ---------------------------------------------------------------------------
// feature extractor
// ---------------------------------------------------------------------------

TEST_CASE("feature extractor: frozen, seeded, and shape-halving") {
  FeatureExtractor<float> fx;
  for (Parameter<float>* p : fx.params()) CHECK_FALSE(p->trainable);

  FeatureExtractor<float> fx2;  // same default config
  auto pa = fx.params(), pb = fx2.params();
  REQUIRE(pa.size() == pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i) {
    CHECK(max_abs_diff(pa[i]->value, pb[i]->value) == 0.0);
  }

  Rng rng(8);
  Tensor x(Shape{1, 16, 16, 1});
  oracle::fill_uniform(x, rng, 0.0, 1.0);
  auto stack = fx.forward(x);
  REQUIRE(stack.layers.size() == 3);
  CHECK(stack.layers[0].shape == Shape{1, 8, 8, 16});
  CHECK(stack.layers[1].shape == Shape{1, 4, 4, 32});
  CHECK(stack.layers[2].shape == Shape{1, 2, 2, 64});
  for (std::size_t l = 0; l < 3; ++l) {
    CHECK(stack.element_counts[l] == stack.layers[l].shape.elems());
    for (float v : stack.layers[l].data) CHECK(v >= 0.0f);  // post-ReLU
  }

  auto stack2 = fx.forward(x);
  for (std::size_t l = 0; l < 3; ++l) {
    CHECK(max_abs_diff(stack.layers[l], stack2.layers[l]) == 0.0);
  }

  // dims must divide by 2^stages
  Tensor bad(Shape{1, 12, 16, 1});
  CHECK_THROWS_AS(fx.forward(bad), std::invalid_argument);
}

TEST_CASE("feature extractor: input gradient matches finite differences") {
  FeatureExtractorConfig fcfg;
  fcfg.stages = 2;
  fcfg.channels = {4, 8};
  FeatureExtractor<double> fx(fcfg);

  Rng rng(9);
  Parameter<double> xp("x", Shape{1, 8, 8, 1});
  oracle::fill_uniform(xp.value, rng, 0.1, 0.9);
  const DTensor r0 = random_field(Shape{1, 4, 4, 4}, 74);
  const DTensor r1 = random_field(Shape{1, 2, 2, 8}, 73);

  fx.forward(xp.value);
  xp.grad = fx.backward({r0, r1});
  auto loss = [&] {
    auto stack = fx.forward(xp.value);
    return weighted_sum(stack.layers[0], r0) +
           weighted_sum(stack.layers[1], r1);
  };
  auto res = grad_check(loss, {&xp});
  CHECK(res.max_rel_error < 1e-6);
}
