#include "rudn/feature_extractor.hpp"

#include <stdexcept>

#include "rudn/residual_block.hpp"

namespace rudn {

template <class S>
FeatureExtractor<S>::FeatureExtractor(FeatureExtractorConfig cfg)
    : cfg_(std::move(cfg)) {
  if (cfg_.stages < 1 ||
      static_cast<int>(cfg_.channels.size()) != cfg_.stages) {
    throw std::invalid_argument(
        "FeatureExtractor: channel schedule does not match stage count");
  }
  Rng rng = Rng(cfg_.seed).stream("extractor");
  int in_c = 3;
  for (int l = 0; l < cfg_.stages; ++l) {
    const int out_c = cfg_.channels[l];
    conv_w_.emplace_back("fx.stage" + std::to_string(l) + ".w",
                         Shape{3, 3, in_c, out_c}, /*trainable=*/false);
    conv_b_.emplace_back("fx.stage" + std::to_string(l) + ".b",
                         Shape{1, 1, 1, out_c}, /*trainable=*/false);
    he_init(conv_w_.back().value, 9 * in_c, rng);
    in_c = out_c;
  }
}

template <class S>
FeatureStack<S> FeatureExtractor<S>::forward(const Tensor4<S>& x) {
  if (x.shape.c != 1) {
    throw std::invalid_argument("FeatureExtractor: expected 1 channel, got " +
                                x.shape.str());
  }
  const int div = 1 << cfg_.stages;
  if (x.shape.h % div != 0 || x.shape.w % div != 0) {
    throw std::invalid_argument("FeatureExtractor: dims of " + x.shape.str() +
                                " must divide by " + std::to_string(div));
  }

  // Replicate the channel to 3 and normalize per channel.
  Tensor4<S> pre(Shape{x.shape.n, x.shape.h, x.shape.w, 3});
  const std::int64_t pixels = x.size();
  for (std::int64_t p = 0; p < pixels; ++p) {
    const double v = x.data[p];
    for (int c = 0; c < 3; ++c) {
      pre.data[p * 3 + c] = static_cast<S>((v - kMean[c]) / kStd[c]);
    }
  }

  stage_in_.assign(cfg_.stages, Tensor4<S>{});
  pre_relu_.assign(cfg_.stages, Tensor4<S>{});
  conv_out_shape_.assign(cfg_.stages, Shape{});

  FeatureStack<S> stack;
  Tensor4<S> a = std::move(pre);
  for (int l = 0; l < cfg_.stages; ++l) {
    stage_in_[l] = a;
    Tensor4<S> c = conv2d(a, conv_w_[l], conv_b_[l]);
    conv_out_shape_[l] = c.shape;
    pre_relu_[l] = downsample2(c);
    a = relu(pre_relu_[l]);
    stack.layers.push_back(a);
    stack.element_counts.push_back(a.size());
  }
  return stack;
}

template <class S>
Tensor4<S> FeatureExtractor<S>::backward(
    const std::vector<Tensor4<S>>& layer_grads) {
  if (static_cast<int>(layer_grads.size()) != cfg_.stages) {
    throw std::invalid_argument("FeatureExtractor::backward: expected " +
                                std::to_string(cfg_.stages) + " layer grads");
  }
  Tensor4<S> g = layer_grads.back();
  for (int l = cfg_.stages - 1; l >= 0; --l) {
    Tensor4<S> g_d = relu_backward(pre_relu_[l], g);
    Tensor4<S> g_c = downsample2_backward(conv_out_shape_[l], g_d);
    g = conv2d_backward(stage_in_[l], conv_w_[l], conv_b_[l], g_c);
    if (l > 0) {
      require_same_shape(g.shape, layer_grads[l - 1].shape,
                         "FeatureExtractor::backward");
      for (std::int64_t i = 0; i < g.size(); ++i) {
        g.data[i] += layer_grads[l - 1].data[i];
      }
    }
  }

  // Undo the replicate + normalize preprocessing.
  Tensor4<S> gx(Shape{g.shape.n, g.shape.h, g.shape.w, 1});
  const std::int64_t pixels = gx.size();
  for (std::int64_t p = 0; p < pixels; ++p) {
    double acc = 0;
    for (int c = 0; c < 3; ++c) {
      acc += g.data[p * 3 + c] / kStd[c];
    }
    gx.data[p] = static_cast<S>(acc);
  }
  return gx;
}

template <class S>
std::vector<Parameter<S>*> FeatureExtractor<S>::params() {
  std::vector<Parameter<S>*> out;
  for (int l = 0; l < cfg_.stages; ++l) {
    out.push_back(&conv_w_[l]);
    out.push_back(&conv_b_[l]);
  }
  return out;
}

template class FeatureExtractor<float>;
template class FeatureExtractor<double>;

}  // namespace rudn
