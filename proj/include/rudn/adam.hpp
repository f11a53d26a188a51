#pragma once

#include <cstdint>
#include <vector>

#include "rudn/param.hpp"

namespace rudn {

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Standard bias-corrected Adam over a fixed set of trainable parameters.
// Moments are kept per parameter in registration order, which is also the
// order used by the checkpoint writer.
template <class S>
class Adam {
 public:
  Adam(std::vector<Parameter<S>*> params, AdamConfig cfg = {});

  // One update from the gradients currently stored in the parameters.
  // A non-finite gradient aborts before touching any state and names the
  // offending parameter.
  void step();

  std::int64_t t() const { return t_; }
  void set_t(std::int64_t t) { t_ = t; }

  const std::vector<Parameter<S>*>& params() const { return params_; }
  std::vector<S>& m(std::size_t i) { return m_[i]; }
  std::vector<S>& v(std::size_t i) { return v_[i]; }

 private:
  std::vector<Parameter<S>*> params_;
  AdamConfig cfg_;
  std::vector<std::vector<S>> m_, v_;
  std::int64_t t_ = 0;
};

extern template class Adam<float>;
extern template class Adam<double>;

}  // namespace rudn
