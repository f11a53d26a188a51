#pragma once

#include <string>

#include "rudn/tensor.hpp"

namespace rudn {

// Named learnable tensor plus its gradient accumulator. Frozen parameters
// (trainable == false) keep receiving zero-filled grad storage but are never
// touched by the optimizer and never accumulated into by backward kernels.
template <class S>
struct Parameter {
  std::string name;
  Tensor4<S> value;
  Tensor4<S> grad;
  bool trainable = true;

  Parameter() = default;
  Parameter(std::string n, Shape s, bool train = true)
      : name(std::move(n)), value(s), grad(s), trainable(train) {}

  void zero_grad() { grad.fill(S(0)); }
};

}  // namespace rudn
