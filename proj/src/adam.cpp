#include "rudn/adam.hpp"

#include <cmath>

#include "rudn/errors.hpp"

namespace rudn {

template <class S>
Adam<S>::Adam(std::vector<Parameter<S>*> params, AdamConfig cfg)
    : params_(std::move(params)), cfg_(cfg) {
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (const Parameter<S>* p : params_) {
    m_.emplace_back(p->value.data.size(), S(0));
    v_.emplace_back(p->value.data.size(), S(0));
  }
}

template <class S>
void Adam<S>::step() {
  for (const Parameter<S>* p : params_) {
    for (S g : p->grad.data) {
      if (!std::isfinite(static_cast<double>(g))) {
        throw numeric_error("adam: non-finite gradient in parameter '" +
                            p->name + "'");
      }
    }
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Parameter<S>& p = *params_[i];
    if (!p.trainable) continue;
    std::vector<S>& m = m_[i];
    std::vector<S>& v = v_[i];
    for (std::size_t k = 0; k < p.value.data.size(); ++k) {
      const double g = static_cast<double>(p.grad.data[k]);
      const double mk = cfg_.beta1 * static_cast<double>(m[k]) +
                        (1.0 - cfg_.beta1) * g;
      const double vk = cfg_.beta2 * static_cast<double>(v[k]) +
                        (1.0 - cfg_.beta2) * g * g;
      m[k] = static_cast<S>(mk);
      v[k] = static_cast<S>(vk);
      const double mhat = mk / bc1;
      const double vhat = vk / bc2;
      p.value.data[k] = static_cast<S>(
          static_cast<double>(p.value.data[k]) -
          cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps));
    }
  }
}

template class Adam<float>;
template class Adam<double>;

}  // namespace rudn
