#pragma once

#include "rudn/tensor.hpp"

namespace rudn {

// PSNR exactly as the norm-ratio form: -10 log10(|fo - fl|^2 / |fo|^2) with
// |.|^2 the sum of squared elements. Identical inputs return +infinity; an
// all-zero reference is rejected (the ratio is undefined).
template <class S>
double psnr_paper(const Tensor4<S>& f_o, const Tensor4<S>& f_l);

// Conventional peak form: 10 log10(peak^2 / mse); +infinity when mse == 0.
template <class S>
double psnr_standard(const Tensor4<S>& f_o, const Tensor4<S>& f_l,
                     double peak = 1.0);

enum class SsimWindow { kGlobal, kGaussian };

struct SsimParams {
  double c1 = 0.01 * 0.01;  // (0.01 R)^2, dynamic range R = 1
  double c2 = 0.03 * 0.03;  // (0.03 R)^2
  SsimWindow window = SsimWindow::kGaussian;
  int window_size = 11;
  double window_sigma = 1.5;

  static SsimParams global() {
    SsimParams p;
    p.window = SsimWindow::kGlobal;
    return p;
  }
};

// Structural similarity of two single-channel images (batch 1). Global mode
// evaluates the formula once from whole-image moments; Gaussian mode
// evaluates it per fully-contained window and returns the mean. Symmetric in
// its arguments.
template <class S>
double ssim(const Tensor4<S>& x, const Tensor4<S>& y,
            const SsimParams& p = {});

}  // namespace rudn
