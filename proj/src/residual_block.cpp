#include "rudn/residual_block.hpp"

#include <cmath>

namespace rudn {

template <class S>
void he_init(Tensor4<S>& w, int fan_in, Rng& rng) {
  const double stddev = std::sqrt(2.0 / fan_in);
  for (auto& v : w.data) v = static_cast<S>(stddev * rng.normal());
}

template <class S>
ResidualBlock<S>::ResidualBlock(int in_channels, int out_channels,
                                const std::string& prefix)
    : conv1_w(prefix + ".conv1.w", Shape{3, 3, in_channels, out_channels}),
      conv1_b(prefix + ".conv1.b", Shape{1, 1, 1, out_channels}),
      conv2_w(prefix + ".conv2.w", Shape{3, 3, out_channels, out_channels}),
      conv2_b(prefix + ".conv2.b", Shape{1, 1, 1, out_channels}),
      sc_w(prefix + ".shortcut.w", Shape{1, 1, in_channels, out_channels}),
      sc_b(prefix + ".shortcut.b", Shape{1, 1, 1, out_channels}),
      bn1_gamma(prefix + ".bn1.gamma", Shape{1, 1, 1, out_channels}),
      bn1_beta(prefix + ".bn1.beta", Shape{1, 1, 1, out_channels}),
      bn2_gamma(prefix + ".bn2.gamma", Shape{1, 1, 1, out_channels}),
      bn2_beta(prefix + ".bn2.beta", Shape{1, 1, 1, out_channels}),
      scbn_gamma(prefix + ".scbn.gamma", Shape{1, 1, 1, out_channels}),
      scbn_beta(prefix + ".scbn.beta", Shape{1, 1, 1, out_channels}),
      bn1_state(out_channels),
      bn2_state(out_channels),
      scbn_state(out_channels),
      in_channels_(in_channels),
      out_channels_(out_channels),
      prefix_(prefix) {
  bn1_gamma.value.fill(S(1));
  bn2_gamma.value.fill(S(1));
  scbn_gamma.value.fill(S(1));
}

template <class S>
void ResidualBlock<S>::init(Rng& rng) {
  he_init(conv1_w.value, 9 * in_channels_, rng);
  he_init(conv2_w.value, 9 * out_channels_, rng);
  he_init(sc_w.value, in_channels_, rng);
}

template <class S>
Tensor4<S> ResidualBlock<S>::forward(const Tensor4<S>& x, Mode mode) {
  if (x.shape.c != in_channels_) {
    throw std::invalid_argument(prefix_ + ": expected " +
                                std::to_string(in_channels_) +
                                " input channels, got " + x.shape.str());
  }
  x_ = x;
  Tensor4<S> c1 = conv2d(x, conv1_w, conv1_b);
  relu1_in_ = batchnorm(c1, bn1_gamma, bn1_beta, bn1_state, mode, &bn1_cache_);
  relu1_out_ = relu(relu1_in_);
  Tensor4<S> c2 = conv2d(relu1_out_, conv2_w, conv2_b);
  Tensor4<S> main =
      batchnorm(c2, bn2_gamma, bn2_beta, bn2_state, mode, &bn2_cache_);

  Tensor4<S> sc = conv2d(x, sc_w, sc_b);
  Tensor4<S> sc_bn =
      batchnorm(sc, scbn_gamma, scbn_beta, scbn_state, mode, &scbn_cache_);

  pre_act_ = add(main, sc_bn);
  return relu(pre_act_);
}

template <class S>
Tensor4<S> ResidualBlock<S>::backward(const Tensor4<S>& gy) {
  Tensor4<S> g_pre = relu_backward(pre_act_, gy);

  // main path
  Tensor4<S> g_c2 = batchnorm_backward(bn2_cache_, bn2_gamma, bn2_beta, g_pre);
  Tensor4<S> g_r1 = conv2d_backward(relu1_out_, conv2_w, conv2_b, g_c2);
  Tensor4<S> g_bn1 = relu_backward(relu1_in_, g_r1);
  Tensor4<S> g_c1 = batchnorm_backward(bn1_cache_, bn1_gamma, bn1_beta, g_bn1);
  Tensor4<S> gx = conv2d_backward(x_, conv1_w, conv1_b, g_c1);

  // shortcut path
  Tensor4<S> g_sc =
      batchnorm_backward(scbn_cache_, scbn_gamma, scbn_beta, g_pre);
  Tensor4<S> gx_sc = conv2d_backward(x_, sc_w, sc_b, g_sc);

  for (std::int64_t i = 0; i < gx.size(); ++i) gx.data[i] += gx_sc.data[i];
  return gx;
}

template <class S>
std::vector<Parameter<S>*> ResidualBlock<S>::params() {
  return {&conv1_w,   &conv1_b,   &bn1_gamma,  &bn1_beta,
          &conv2_w,   &conv2_b,   &bn2_gamma,  &bn2_beta,
          &sc_w,      &sc_b,      &scbn_gamma, &scbn_beta};
}

template <class S>
std::vector<std::pair<std::string, Tensor4<S>*>>
ResidualBlock<S>::state_tensors() {
  return {{prefix_ + ".bn1.mean", &bn1_state.running_mean},
          {prefix_ + ".bn1.var", &bn1_state.running_var},
          {prefix_ + ".bn2.mean", &bn2_state.running_mean},
          {prefix_ + ".bn2.var", &bn2_state.running_var},
          {prefix_ + ".scbn.mean", &scbn_state.running_mean},
          {prefix_ + ".scbn.var", &scbn_state.running_var}};
}

template class ResidualBlock<float>;
template class ResidualBlock<double>;
template void he_init<float>(Tensor4<float>&, int, Rng&);
template void he_init<double>(Tensor4<double>&, int, Rng&);

}  // namespace rudn
