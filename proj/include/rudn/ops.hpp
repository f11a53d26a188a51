#pragma once

#include <cstdint>
#include <vector>

#include "rudn/param.hpp"
#include "rudn/tensor.hpp"

namespace rudn {

enum class Mode { kTrain, kInfer };

// ---------------------------------------------------------------------------
// Convolutions. Activations are (batch, h, w, c); weights are
// (kh, kw, in_c, out_c); biases are (1, 1, 1, out_c). All convolutions are
// stride 1 with zero "same" padding unless noted. Backward kernels return the
// input gradient and accumulate (+=) into w.grad / b.grad when trainable.
// ---------------------------------------------------------------------------

// kernel 1x1 or 3x3, output spatial dims equal input dims.
template <class S>
Tensor4<S> conv2d(const Tensor4<S>& x, const Parameter<S>& w,
                  const Parameter<S>& b);

template <class S>
Tensor4<S> conv2d_backward(const Tensor4<S>& x, Parameter<S>& w,
                           Parameter<S>& b, const Tensor4<S>& gy);

// 2x2 kernel, stride 2: output spatial dims are exactly doubled.
template <class S>
Tensor4<S> conv2d_transpose(const Tensor4<S>& x, const Parameter<S>& w,
                            const Parameter<S>& b);

template <class S>
Tensor4<S> conv2d_transpose_backward(const Tensor4<S>& x, Parameter<S>& w,
                                     Parameter<S>& b, const Tensor4<S>& gy);

// ---------------------------------------------------------------------------
// 2x2 max pooling, stride 2. Input dims must be even. argmax keeps the
// row-major window offset (0..3) of the winning element; ties go to the
// first element in window order, which pins the gradient routing.
// ---------------------------------------------------------------------------

template <class S>
struct PoolResult {
  Tensor4<S> y;
  std::vector<std::uint8_t> argmax;
};

template <class S>
PoolResult<S> maxpool2(const Tensor4<S>& x);

template <class S>
Tensor4<S> maxpool2_backward(const PoolResult<S>& fwd, const Shape& x_shape,
                             const Tensor4<S>& gy);

// ---------------------------------------------------------------------------
// Batch normalization over (batch, h, w) per channel. gamma/beta and the
// running stats are all shaped (1, 1, 1, c). Train mode normalizes with
// batch statistics (biased variance) and folds them into the running stats
// with fixed momentum; infer mode reads the running stats. Both modes are
// deterministic.
// ---------------------------------------------------------------------------

template <class S>
struct BnState {
  Tensor4<S> running_mean;
  Tensor4<S> running_var;

  BnState() = default;
  explicit BnState(int channels)
      : running_mean(Shape{1, 1, 1, channels}, S(0)),
        running_var(Shape{1, 1, 1, channels}, S(1)) {}
};

template <class S>
struct BnCache {
  Tensor4<S> xhat;
  std::vector<S> inv_std;  // per channel
  Mode mode = Mode::kTrain;
};

inline constexpr double kBnMomentum = 0.9;
inline constexpr double kBnEpsilon = 1e-5;

template <class S>
Tensor4<S> batchnorm(const Tensor4<S>& x, const Parameter<S>& gamma,
                     const Parameter<S>& beta, BnState<S>& state, Mode mode,
                     BnCache<S>* cache = nullptr,
                     double momentum = kBnMomentum,
                     double epsilon = kBnEpsilon);

template <class S>
Tensor4<S> batchnorm_backward(const BnCache<S>& cache, Parameter<S>& gamma,
                              Parameter<S>& beta, const Tensor4<S>& gy);

// ---------------------------------------------------------------------------
// Elementwise and structural ops.
// ---------------------------------------------------------------------------

template <class S>
Tensor4<S> relu(const Tensor4<S>& x);

template <class S>
Tensor4<S> relu_backward(const Tensor4<S>& x, const Tensor4<S>& gy);

// Output is clamped into the open interval (0, 1): in float arithmetic the
// raw logistic saturates to exactly 0 or 1 for |x| above ~17.
template <class S>
Tensor4<S> sigmoid(const Tensor4<S>& x);

// Takes the forward output, d/dx = y * (1 - y).
template <class S>
Tensor4<S> sigmoid_backward(const Tensor4<S>& y, const Tensor4<S>& gy);

template <class S>
Tensor4<S> add(const Tensor4<S>& a, const Tensor4<S>& b);

// Stacks b's channels after a's; batch and spatial dims must match.
template <class S>
Tensor4<S> concat_channels(const Tensor4<S>& a, const Tensor4<S>& b);

template <class S>
void split_channels(const Tensor4<S>& g, int c_a, Tensor4<S>* ga,
                    Tensor4<S>* gb);

// Keeps even-indexed rows and columns; with a same-padded 3x3 conv in front
// this is a stride-2 convolution sampled at even centers. Input dims must be
// even.
template <class S>
Tensor4<S> downsample2(const Tensor4<S>& x);

template <class S>
Tensor4<S> downsample2_backward(const Shape& x_shape, const Tensor4<S>& gy);

}  // namespace rudn
