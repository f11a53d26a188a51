#include "rudn/resunet.hpp"

#include <stdexcept>

namespace rudn {

void ModelConfig::validate() const {
  if (depth < 1) {
    throw std::invalid_argument("ModelConfig: depth must be >= 1");
  }
  if (static_cast<int>(channels.size()) != depth) {
    throw std::invalid_argument(
        "ModelConfig: channel schedule has " +
        std::to_string(channels.size()) + " entries for depth " +
        std::to_string(depth));
  }
  for (int c : channels) {
    if (c < 1) throw std::invalid_argument("ModelConfig: channels must be >= 1");
  }
  if (bottleneck_channels < 1) {
    throw std::invalid_argument("ModelConfig: bottleneck channels must be >= 1");
  }
  const int div = 1 << depth;
  if (input_height < div || input_width < div || input_height % div != 0 ||
      input_width % div != 0) {
    throw std::invalid_argument(
        "ModelConfig: input " + std::to_string(input_height) + "x" +
        std::to_string(input_width) + " is not divisible by 2^depth = " +
        std::to_string(div));
  }
}

namespace {

template <class S>
std::vector<ResidualBlock<S>> build_encoder(const ModelConfig& cfg) {
  std::vector<ResidualBlock<S>> blocks;
  int in_c = 1;
  for (int l = 0; l < cfg.depth; ++l) {
    blocks.emplace_back(in_c, cfg.channels[l], "enc" + std::to_string(l));
    in_c = cfg.channels[l];
  }
  return blocks;
}

template <class S>
std::vector<ResidualBlock<S>> build_decoder(const ModelConfig& cfg) {
  std::vector<ResidualBlock<S>> blocks;
  for (int l = 0; l < cfg.depth; ++l) {
    blocks.emplace_back(2 * cfg.channels[l], cfg.channels[l],
                        "dec" + std::to_string(l));
  }
  return blocks;
}

}  // namespace

template <class S>
ResUNet<S>::ResUNet(const ModelConfig& cfg)
    : cfg_((cfg.validate(), cfg)),
      encoder_(build_encoder<S>(cfg)),
      bottleneck_(cfg.channels.back(), cfg.bottleneck_channels, "bottleneck"),
      decoder_(build_decoder<S>(cfg)),
      head_w_("head.w", Shape{1, 1, cfg.channels[0], 1}),
      head_b_("head.b", Shape{1, 1, 1, 1}) {
  // Transposed convs, one per level: level l maps the channel count of the
  // stage above it down to channels[l].
  for (int l = 0; l < cfg_.depth; ++l) {
    const int in_c =
        (l == cfg_.depth - 1) ? cfg_.bottleneck_channels : cfg_.channels[l + 1];
    tconv_w_.emplace_back("up" + std::to_string(l) + ".w",
                          Shape{2, 2, in_c, cfg_.channels[l]});
    tconv_b_.emplace_back("up" + std::to_string(l) + ".b",
                          Shape{1, 1, 1, cfg_.channels[l]});
  }

  Rng rng = Rng(cfg_.seed).stream("init");
  for (auto& b : encoder_) b.init(rng);
  bottleneck_.init(rng);
  for (int l = 0; l < cfg_.depth; ++l) {
    he_init(tconv_w_[l].value, 4 * tconv_w_[l].value.shape.w, rng);
    decoder_[l].init(rng);
  }
  he_init(head_w_.value, cfg_.channels[0], rng);
}

template <class S>
Tensor4<S> ResUNet<S>::forward(const Tensor4<S>& x, Mode mode) {
  if (x.shape.h != cfg_.input_height || x.shape.w != cfg_.input_width ||
      x.shape.c != 1) {
    throw std::invalid_argument(
        "ResUNet::forward: input " + x.shape.str() + " does not match config " +
        std::to_string(cfg_.input_height) + "x" +
        std::to_string(cfg_.input_width) + "x1");
  }

  skips_.assign(cfg_.depth, Tensor4<S>{});
  pools_.assign(cfg_.depth, PoolResult<S>{});

  Tensor4<S> a = x;
  for (int l = 0; l < cfg_.depth; ++l) {
    a = encoder_[l].forward(a, mode);
    skips_[l] = a;
    pools_[l] = maxpool2(a);
    a = pools_[l].y;
  }
  a = bottleneck_.forward(a, mode);

  tconv_in_.assign(cfg_.depth, Tensor4<S>{});
  for (int l = cfg_.depth - 1; l >= 0; --l) {
    tconv_in_[l] = a;
    Tensor4<S> up = conv2d_transpose(a, tconv_w_[l], tconv_b_[l]);
    if (ablate_skip_ == l) {
      a = concat_channels(up, Tensor4<S>(skips_[l].shape));
    } else {
      a = concat_channels(up, skips_[l]);
    }
    a = decoder_[l].forward(a, mode);
  }
  ablate_skip_ = -1;

  head_in_ = a;
  Tensor4<S> logits = conv2d(a, head_w_, head_b_);
  y_ = sigmoid(logits);
  return y_;
}

template <class S>
Tensor4<S> ResUNet<S>::backward(const Tensor4<S>& gy) {
  Tensor4<S> g_logits = sigmoid_backward(y_, gy);
  Tensor4<S> g = conv2d_backward(head_in_, head_w_, head_b_, g_logits);

  std::vector<Tensor4<S>> skip_grads(cfg_.depth);
  for (int l = 0; l < cfg_.depth; ++l) {
    g = decoder_[l].backward(g);
    Tensor4<S> g_up;
    split_channels(g, cfg_.channels[l], &g_up, &skip_grads[l]);
    g = conv2d_transpose_backward(tconv_in_[l], tconv_w_[l], tconv_b_[l], g_up);
  }

  g = bottleneck_.backward(g);

  for (int l = cfg_.depth - 1; l >= 0; --l) {
    Tensor4<S> g_prepool = maxpool2_backward(pools_[l], skips_[l].shape, g);
    for (std::int64_t i = 0; i < g_prepool.size(); ++i) {
      g_prepool.data[i] += skip_grads[l].data[i];
    }
    g = encoder_[l].backward(g_prepool);
  }
  return g;
}

template <class S>
std::vector<Parameter<S>*> ResUNet<S>::params() {
  std::vector<Parameter<S>*> out;
  for (auto& b : encoder_) {
    for (auto* p : b.params()) out.push_back(p);
  }
  for (auto* p : bottleneck_.params()) out.push_back(p);
  for (int l = 0; l < cfg_.depth; ++l) {
    out.push_back(&tconv_w_[l]);
    out.push_back(&tconv_b_[l]);
    for (auto* p : decoder_[l].params()) out.push_back(p);
  }
  out.push_back(&head_w_);
  out.push_back(&head_b_);
  return out;
}

template <class S>
std::vector<std::pair<std::string, Tensor4<S>*>> ResUNet<S>::state_tensors() {
  std::vector<std::pair<std::string, Tensor4<S>*>> out;
  for (auto& b : encoder_) {
    for (auto& s : b.state_tensors()) out.push_back(s);
  }
  for (auto& s : bottleneck_.state_tensors()) out.push_back(s);
  for (auto& b : decoder_) {
    for (auto& s : b.state_tensors()) out.push_back(s);
  }
  return out;
}

template <class S>
std::int64_t ResUNet<S>::param_count() {
  std::int64_t n = 0;
  for (auto* p : params()) n += p->value.size();
  return n;
}

template class ResUNet<float>;
template class ResUNet<double>;

}  // namespace rudn
