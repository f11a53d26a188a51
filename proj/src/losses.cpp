#include "rudn/losses.hpp"

#include <stdexcept>

namespace rudn {

void LossConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("LossConfig: alpha must be in [0, 1]");
  }
}

template <class S>
double mse_loss(const Tensor4<S>& y_true, const Tensor4<S>& y_pred) {
  require_same_shape(y_true.shape, y_pred.shape, "mse_loss");
  double acc = 0.0;
  for (std::int64_t i = 0; i < y_true.size(); ++i) {
    const double d =
        static_cast<double>(y_true.data[i]) - static_cast<double>(y_pred.data[i]);
    acc += d * d;
  }
  return acc / static_cast<double>(y_true.size());
}

template <class S>
Tensor4<S> mse_loss_grad(const Tensor4<S>& y_true, const Tensor4<S>& y_pred) {
  require_same_shape(y_true.shape, y_pred.shape, "mse_loss_grad");
  Tensor4<S> g(y_true.shape);
  const double scale = 2.0 / static_cast<double>(y_true.size());
  for (std::int64_t i = 0; i < y_true.size(); ++i) {
    g.data[i] = static_cast<S>(
        scale * (static_cast<double>(y_pred.data[i]) - y_true.data[i]));
  }
  return g;
}

template <class S>
double perceptual_loss(const Tensor4<S>& y_true, const Tensor4<S>& y_pred,
                       FeatureExtractor<S>& extractor, Tensor4<S>* grad_pred) {
  require_same_shape(y_true.shape, y_pred.shape, "perceptual_loss");
  FeatureStack<S> true_stack = extractor.forward(y_true);
  // Predicted image last, so the extractor's caches belong to it when the
  // backward pass runs.
  FeatureStack<S> pred_stack = extractor.forward(y_pred);

  double loss = 0.0;
  std::vector<Tensor4<S>> layer_grads;
  for (std::size_t l = 0; l < pred_stack.layers.size(); ++l) {
    const Tensor4<S>& ft = true_stack.layers[l];
    const Tensor4<S>& fp = pred_stack.layers[l];
    const double n = static_cast<double>(pred_stack.element_counts[l]);
    double acc = 0.0;
    for (std::int64_t i = 0; i < fp.size(); ++i) {
      const double d =
          static_cast<double>(ft.data[i]) - static_cast<double>(fp.data[i]);
      acc += d * d;
    }
    loss += acc / n;
    if (grad_pred) {
      Tensor4<S> g(fp.shape);
      const double scale = 2.0 / n;
      for (std::int64_t i = 0; i < fp.size(); ++i) {
        g.data[i] = static_cast<S>(
            scale * (static_cast<double>(fp.data[i]) - ft.data[i]));
      }
      layer_grads.push_back(std::move(g));
    }
  }
  if (grad_pred) {
    *grad_pred = extractor.backward(layer_grads);
  }
  return loss;
}

template <class S>
double combined_loss(const Tensor4<S>& y_true, const Tensor4<S>& y_pred,
                     const LossConfig& cfg, FeatureExtractor<S>& extractor,
                     Tensor4<S>* grad_pred) {
  cfg.validate();
  const double mse = mse_loss(y_true, y_pred);
  Tensor4<S> pl_grad;
  const double pl = perceptual_loss(y_true, y_pred, extractor,
                                    grad_pred ? &pl_grad : nullptr);
  if (grad_pred) {
    Tensor4<S> mse_grad = mse_loss_grad(y_true, y_pred);
    Tensor4<S> g(y_true.shape);
    for (std::int64_t i = 0; i < g.size(); ++i) {
      g.data[i] = static_cast<S>((1.0 - cfg.alpha) * mse_grad.data[i] +
                                 cfg.alpha * pl_grad.data[i]);
    }
    *grad_pred = std::move(g);
  }
  return (1.0 - cfg.alpha) * mse + cfg.alpha * pl;
}

#define RUDN_INSTANTIATE_LOSSES(S)                                           \
  template double mse_loss<S>(const Tensor4<S>&, const Tensor4<S>&);         \
  template Tensor4<S> mse_loss_grad<S>(const Tensor4<S>&, const Tensor4<S>&);\
  template double perceptual_loss<S>(const Tensor4<S>&, const Tensor4<S>&,   \
                                     FeatureExtractor<S>&, Tensor4<S>*);     \
  template double combined_loss<S>(const Tensor4<S>&, const Tensor4<S>&,     \
                                   const LossConfig&, FeatureExtractor<S>&,  \
                                   Tensor4<S>*);

RUDN_INSTANTIATE_LOSSES(float)
RUDN_INSTANTIATE_LOSSES(double)

#undef RUDN_INSTANTIATE_LOSSES

}  // namespace rudn
