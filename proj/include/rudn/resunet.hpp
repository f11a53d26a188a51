#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rudn/residual_block.hpp"

namespace rudn {

struct ModelConfig {
  int input_height = 200;
  int input_width = 400;
  int depth = 3;                            // number of 2x2 poolings
  std::vector<int> channels = {32, 64, 128};  // encoder levels, top down
  int bottleneck_channels = 256;
  std::uint64_t seed = 0;

  // Throws std::invalid_argument; spatial dims must divide by 2^depth.
  void validate() const;
};

// Residual U-Net for single-channel images in [0,1]: per encoder level a
// residual block followed by a 2x2 max pool, a bottleneck block, then per
// decoder level a stride-2 transposed conv, channel concatenation with the
// matching encoder pre-pool activation, and a residual block. The head is a
// 1x1 conv + sigmoid, so outputs keep the input shape with values in (0,1).
template <class S>
class ResUNet {
 public:
  explicit ResUNet(const ModelConfig& cfg);

  Tensor4<S> forward(const Tensor4<S>& x, Mode mode);
  Tensor4<S> backward(const Tensor4<S>& gy);

  std::vector<Parameter<S>*> params();
  std::vector<std::pair<std::string, Tensor4<S>*>> state_tensors();
  std::int64_t param_count();  // trainable elements

  const ModelConfig& config() const { return cfg_; }

  // Test hook: when set, the skip input of decoder level `level` is zeroed
  // on the next forward.
  void ablate_skip(int level) { ablate_skip_ = level; }

 private:
  ModelConfig cfg_;
  std::vector<ResidualBlock<S>> encoder_;
  ResidualBlock<S> bottleneck_;
  std::vector<Parameter<S>> tconv_w_, tconv_b_;
  std::vector<ResidualBlock<S>> decoder_;
  Parameter<S> head_w_, head_b_;
  int ablate_skip_ = -1;

  // forward caches
  std::vector<Tensor4<S>> skips_;
  std::vector<PoolResult<S>> pools_;
  std::vector<Tensor4<S>> tconv_in_;
  Tensor4<S> head_in_, y_;
};

extern template class ResUNet<float>;
extern template class ResUNet<double>;

}  // namespace rudn
