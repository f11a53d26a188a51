#include "rudn/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace rudn {

template <class S>
double psnr_paper(const Tensor4<S>& f_o, const Tensor4<S>& f_l) {
  require_same_shape(f_o.shape, f_l.shape, "psnr_paper");
  double err = 0.0, ref = 0.0;
  for (std::int64_t i = 0; i < f_o.size(); ++i) {
    const double o = f_o.data[i];
    const double d = o - static_cast<double>(f_l.data[i]);
    err += d * d;
    ref += o * o;
  }
  if (ref == 0.0) {
    throw std::invalid_argument("psnr_paper: reference image is all zero");
  }
  if (err == 0.0) return std::numeric_limits<double>::infinity();
  return -10.0 * std::log10(err / ref);
}

template <class S>
double psnr_standard(const Tensor4<S>& f_o, const Tensor4<S>& f_l,
                     double peak) {
  require_same_shape(f_o.shape, f_l.shape, "psnr_standard");
  double err = 0.0;
  for (std::int64_t i = 0; i < f_o.size(); ++i) {
    const double d =
        static_cast<double>(f_o.data[i]) - static_cast<double>(f_l.data[i]);
    err += d * d;
  }
  const double mse = err / static_cast<double>(f_o.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

namespace {

double ssim_formula(double mu_x, double mu_y, double var_x, double var_y,
                    double cov, double c1, double c2) {
  return ((2.0 * mu_x * mu_y + c1) * (2.0 * cov + c2)) /
         ((mu_x * mu_x + mu_y * mu_y + c1) * (var_x + var_y + c2));
}

template <class S>
void check_ssim_args(const Tensor4<S>& x, const Tensor4<S>& y,
                     const SsimParams& p) {
  require_same_shape(x.shape, y.shape, "ssim");
  if (x.shape.n != 1 || x.shape.c != 1) {
    throw std::invalid_argument(
        "ssim: expected a single single-channel image, got " + x.shape.str());
  }
  if (p.c1 <= 0.0 || p.c2 <= 0.0) {
    throw std::invalid_argument("ssim: stabilizing constants must be positive");
  }
}

}  // namespace

template <class S>
double ssim(const Tensor4<S>& x, const Tensor4<S>& y, const SsimParams& p) {
  check_ssim_args(x, y, p);
  const int H = x.shape.h, W = x.shape.w;

  if (p.window == SsimWindow::kGlobal) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (std::int64_t i = 0; i < x.size(); ++i) {
      const double a = x.data[i], b = y.data[i];
      sx += a;
      sy += b;
      sxx += a * a;
      syy += b * b;
      sxy += a * b;
    }
    const double mu_x = sx / n, mu_y = sy / n;
    return ssim_formula(mu_x, mu_y, sxx / n - mu_x * mu_x,
                        syy / n - mu_y * mu_y, sxy / n - mu_x * mu_y, p.c1,
                        p.c2);
  }

  const int K = p.window_size;
  if (K < 1 || K % 2 == 0) {
    throw std::invalid_argument("ssim: window size must be odd and positive");
  }
  if (H < K || W < K) {
    throw std::invalid_argument("ssim: image " + x.shape.str() +
                                " is smaller than the " + std::to_string(K) +
                                "x" + std::to_string(K) + " window");
  }

  // Normalized separable Gaussian weights.
  std::vector<double> g(K);
  {
    const int half = K / 2;
    double sum = 0;
    for (int i = 0; i < K; ++i) {
      const double d = i - half;
      g[i] = std::exp(-d * d / (2.0 * p.window_sigma * p.window_sigma));
      sum += g[i];
    }
    for (double& v : g) v /= sum;
  }

  double total = 0.0;
  std::int64_t windows = 0;
  for (int cy = 0; cy + K <= H; ++cy) {
    for (int cx = 0; cx + K <= W; ++cx) {
      double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
      for (int iy = 0; iy < K; ++iy) {
        const S* xr = x.row(0, cy + iy, cx);
        const S* yr = y.row(0, cy + iy, cx);
        for (int ix = 0; ix < K; ++ix) {
          const double wgt = g[iy] * g[ix];
          const double a = xr[ix], b = yr[ix];
          sx += wgt * a;
          sy += wgt * b;
          sxx += wgt * a * a;
          syy += wgt * b * b;
          sxy += wgt * a * b;
        }
      }
      total += ssim_formula(sx, sy, sxx - sx * sx, syy - sy * sy,
                            sxy - sx * sy, p.c1, p.c2);
      ++windows;
    }
  }
  return total / static_cast<double>(windows);
}

#define RUDN_INSTANTIATE_METRICS(S)                                          \
  template double psnr_paper<S>(const Tensor4<S>&, const Tensor4<S>&);       \
  template double psnr_standard<S>(const Tensor4<S>&, const Tensor4<S>&,     \
                                   double);                                  \
  template double ssim<S>(const Tensor4<S>&, const Tensor4<S>&,              \
                          const SsimParams&);

RUDN_INSTANTIATE_METRICS(float)
RUDN_INSTANTIATE_METRICS(double)

#undef RUDN_INSTANTIATE_METRICS

}  // namespace rudn
