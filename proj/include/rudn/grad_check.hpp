#pragma once

#include <functional>
#include <string>
#include <vector>

#include "rudn/param.hpp"

namespace rudn {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_param;
  std::int64_t worst_index = -1;
};

// Central-difference verification of analytic gradients, 64-bit only.
//
// Protocol: the caller runs its analytic backward first, leaving gradients in
// each params[i]->grad; loss_fn must re-evaluate the scalar loss at the
// current parameter values without depending on hidden randomness. Each
// parameter element is then perturbed by +/-step and the central difference
// is compared against the stored analytic value.
//
// Returned error: max over elements of
//   |analytic - central| / max(1, |central|).
// A non-finite loss at any evaluation point throws numeric_error.
GradCheckResult grad_check(const std::function<double()>& loss_fn,
                           const std::vector<Parameter<double>*>& params,
                           double step = 1e-4);

}  // namespace rudn
