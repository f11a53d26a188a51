#pragma once

#include <string>
#include <vector>

#include "rudn/ops.hpp"
#include "rudn/rng.hpp"

namespace rudn {

// Fills a conv weight with zero-mean He draws (variance 2 / fan_in, fan_in =
// kh * kw * in_c). Draw order is the tensor's storage order.
template <class S>
void he_init(Tensor4<S>& w, int fan_in, Rng& rng);

// conv3x3 -> BN -> ReLU -> conv3x3 -> BN, plus a 1x1-conv + BN projection of
// the input; the two paths are summed and pass through a final ReLU.
// Spatial dims are preserved; channels go in_channels -> out_channels.
template <class S>
class ResidualBlock {
 public:
  ResidualBlock(int in_channels, int out_channels, const std::string& prefix);

  void init(Rng& rng);

  Tensor4<S> forward(const Tensor4<S>& x, Mode mode);
  // Uses the caches of the latest forward; accumulates parameter grads.
  Tensor4<S> backward(const Tensor4<S>& gy);

  std::vector<Parameter<S>*> params();
  // Running BN statistics, serialized alongside parameters.
  std::vector<std::pair<std::string, Tensor4<S>*>> state_tensors();

  int in_channels() const { return in_channels_; }
  int out_channels() const { return out_channels_; }

  Parameter<S> conv1_w, conv1_b, conv2_w, conv2_b;
  Parameter<S> sc_w, sc_b;
  Parameter<S> bn1_gamma, bn1_beta, bn2_gamma, bn2_beta;
  Parameter<S> scbn_gamma, scbn_beta;
  BnState<S> bn1_state, bn2_state, scbn_state;

 private:
  int in_channels_, out_channels_;
  std::string prefix_;

  // forward caches
  Tensor4<S> x_, relu1_in_, relu1_out_, pre_act_;
  BnCache<S> bn1_cache_, bn2_cache_, scbn_cache_;
};

extern template class ResidualBlock<float>;
extern template class ResidualBlock<double>;
extern template void he_init<float>(Tensor4<float>&, int, Rng&);
extern template void he_init<double>(Tensor4<double>&, int, Rng&);

}  // namespace rudn
