#pragma once

#include "rudn/feature_extractor.hpp"
#include "rudn/tensor.hpp"

namespace rudn {

struct LossConfig {
  double alpha = 0.8;  // weight of the perceptual term, in [0, 1]

  void validate() const;
};

// Mean squared error over every element (batch included in the averaging).
// Accumulated in double regardless of S.
template <class S>
double mse_loss(const Tensor4<S>& y_true, const Tensor4<S>& y_pred);

// d(mse)/d(y_pred) = 2 (y_pred - y_true) / elems.
template <class S>
Tensor4<S> mse_loss_grad(const Tensor4<S>& y_true, const Tensor4<S>& y_pred);

// Sum over layers of the per-layer mean squared feature difference. When
// grad_pred is non-null it receives d(loss)/d(y_pred), propagated through the
// frozen extractor.
template <class S>
double perceptual_loss(const Tensor4<S>& y_true, const Tensor4<S>& y_pred,
                       FeatureExtractor<S>& extractor,
                       Tensor4<S>* grad_pred = nullptr);

// (1 - alpha) * MSE + alpha * PL.
template <class S>
double combined_loss(const Tensor4<S>& y_true, const Tensor4<S>& y_pred,
                     const LossConfig& cfg, FeatureExtractor<S>& extractor,
                     Tensor4<S>* grad_pred = nullptr);

}  // namespace rudn
