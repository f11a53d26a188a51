#include "rudn/grad_check.hpp"

#include <cmath>

#include "rudn/errors.hpp"

namespace rudn {

GradCheckResult grad_check(const std::function<double()>& loss_fn,
                           const std::vector<Parameter<double>*>& params,
                           double step) {
  GradCheckResult res;
  for (Parameter<double>* p : params) {
    for (std::int64_t i = 0; i < p->value.size(); ++i) {
      const double saved = p->value.data[i];
      p->value.data[i] = saved + step;
      const double up = loss_fn();
      p->value.data[i] = saved - step;
      const double down = loss_fn();
      p->value.data[i] = saved;
      if (!std::isfinite(up) || !std::isfinite(down)) {
        throw numeric_error("grad_check: non-finite loss while perturbing " +
                            p->name + "[" + std::to_string(i) + "]");
      }
      const double central = (up - down) / (2.0 * step);
      const double analytic = p->grad.data[i];
      const double err =
          std::abs(analytic - central) / std::max(1.0, std::abs(central));
      if (err > res.max_rel_error) {
        res.max_rel_error = err;
        res.worst_param = p->name;
        res.worst_index = i;
      }
    }
  }
  return res;
}

}  // namespace rudn
