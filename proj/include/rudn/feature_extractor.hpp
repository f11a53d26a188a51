#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "rudn/ops.hpp"
#include "rudn/rng.hpp"

namespace rudn {

struct FeatureExtractorConfig {
  int stages = 3;
  std::vector<int> channels = {16, 32, 64};
  std::uint64_t seed = 0x0EF5EC7012345678ull;
};

// Per-layer feature maps of one image (or batch), plus each layer's element
// count for the averaging in the perceptual loss.
template <class S>
struct FeatureStack {
  std::vector<Tensor4<S>> layers;
  std::vector<std::int64_t> element_counts;
};

// Frozen convolutional feature pyramid standing in for a pre-trained
// backbone. The single input channel is replicated to 3 and normalized with
// the usual per-channel ImageNet constants, then each stage applies a
// same-padded 3x3 conv sampled at even centers (stride 2) and a ReLU, so
// layer l has spatial dims input / 2^(l+1). Weights are seeded He draws and
// are never trained; gradients flow only to the input.
template <class S>
class FeatureExtractor {
 public:
  explicit FeatureExtractor(FeatureExtractorConfig cfg = {});

  // x must be (b, h, w, 1) with h and w divisible by 2^stages.
  FeatureStack<S> forward(const Tensor4<S>& x);

  // Backward for the latest forward; layer_grads[l] matches layers[l].
  Tensor4<S> backward(const std::vector<Tensor4<S>>& layer_grads);

  std::vector<Parameter<S>*> params();  // all frozen
  const FeatureExtractorConfig& config() const { return cfg_; }

  static constexpr std::array<double, 3> kMean = {0.485, 0.456, 0.406};
  static constexpr std::array<double, 3> kStd = {0.229, 0.224, 0.225};

 private:
  FeatureExtractorConfig cfg_;
  std::vector<Parameter<S>> conv_w_, conv_b_;

  // forward caches
  std::vector<Tensor4<S>> stage_in_;   // input of each stage's conv
  std::vector<Tensor4<S>> pre_relu_;   // downsampled conv output
  std::vector<Shape> conv_out_shape_;
};

extern template class FeatureExtractor<float>;
extern template class FeatureExtractor<double>;

}  // namespace rudn
