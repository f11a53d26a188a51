#include "rudn/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rudn {

void NoiseConfig::validate() const {
  if (!(sigma_min >= 0.0) || !(sigma_max >= sigma_min)) {
    throw std::invalid_argument("NoiseConfig: need 0 <= sigma_min <= sigma_max");
  }
}

Tensor pad_to(const Tensor& img, int target_h, int target_w) {
  const int h = img.shape.h, w = img.shape.w;
  const int top = (target_h - h) / 2;
  const int left = (target_w - w) / 2;
  Tensor out(Shape{1, target_h, target_w, 1});
  for (int r = 0; r < h; ++r) {
    std::copy_n(img.row(0, r, 0), w, out.row(0, r + top, left));
  }
  return out;
}

Tensor resize_bilinear(const Tensor& img, int out_h, int out_w) {
  const int h = img.shape.h, w = img.shape.w;
  Tensor out(Shape{1, out_h, out_w, 1});
  const double sy = static_cast<double>(h) / out_h;
  const double sx = static_cast<double>(w) / out_w;
  for (int r = 0; r < out_h; ++r) {
    double fy = (r + 0.5) * sy - 0.5;
    if (fy < 0) fy = 0;
    if (fy > h - 1) fy = h - 1;
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, h - 1);
    const float wy = static_cast<float>(fy - y0);
    const float* row0 = img.row(0, y0, 0);
    const float* row1 = img.row(0, y1, 0);
    float* dst = out.row(0, r, 0);
    for (int c = 0; c < out_w; ++c) {
      double fx = (c + 0.5) * sx - 0.5;
      if (fx < 0) fx = 0;
      if (fx > w - 1) fx = w - 1;
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, w - 1);
      const float wx = static_cast<float>(fx - x0);
      // lerp form keeps constant images exactly constant
      const float top = row0[x0] + wx * (row0[x1] - row0[x0]);
      const float bot = row1[x0] + wx * (row1[x1] - row1[x0]);
      dst[c] = top + wy * (bot - top);
    }
  }
  return out;
}

ImageRecord preprocess(const ImageRecord& rec, int target_h, int target_w) {
  if (target_h <= 0 || target_w <= 0) {
    throw std::invalid_argument("preprocess: target dims must be positive");
  }
  ImageRecord out = rec;
  const int h = rec.pixels.shape.h, w = rec.pixels.shape.w;
  if (out.orig_h == 0) out.orig_h = h;
  if (out.orig_w == 0) out.orig_w = w;
  if (h == target_h && w == target_w) return out;
  if (h <= target_h && w <= target_w) {
    out.pixels = pad_to(rec.pixels, target_h, target_w);
  } else {
    out.pixels = resize_bilinear(rec.pixels, target_h, target_w);
  }
  return out;
}

Tensor apply_affine(const Tensor& img, double angle_deg, double dx,
                    double dy) {
  if (angle_deg == 0.0 && dx == 0.0 && dy == 0.0) return img;
  const int h = img.shape.h, w = img.shape.w;
  const double cy = (h - 1) / 2.0, cx = (w - 1) / 2.0;
  const double theta = angle_deg * std::numbers::pi / 180.0;
  // inverse mapping: undo the translation, then rotate by -theta about the
  // center to find the source location of each output pixel.
  const double ct = std::cos(theta), st = std::sin(theta);
  Tensor out(Shape{1, h, w, 1});
  for (int r = 0; r < h; ++r) {
    const double ry = (r - dy) - cy;
    float* dst = out.row(0, r, 0);
    for (int c = 0; c < w; ++c) {
      const double rx = (c - dx) - cx;
      const double sxf = ct * rx + st * ry + cx;
      const double syf = -st * rx + ct * ry + cy;
      const int x0 = static_cast<int>(std::floor(sxf));
      const int y0 = static_cast<int>(std::floor(syf));
      const double wx = sxf - x0, wy = syf - y0;
      double acc = 0.0;
      for (int j = 0; j < 2; ++j) {
        const int yy = y0 + j;
        if (yy < 0 || yy >= h) continue;
        const double wj = j ? wy : 1.0 - wy;
        for (int i = 0; i < 2; ++i) {
          const int xx = x0 + i;
          if (xx < 0 || xx >= w) continue;
          const double wi = i ? wx : 1.0 - wx;
          acc += wj * wi * img.at(0, yy, xx, 0);
        }
      }
      dst[c] = static_cast<float>(std::clamp(acc, 0.0, 1.0));
    }
  }
  return out;
}

AugmentDraw draw_augment(const AugmentConfig& cfg, Rng& rng) {
  AugmentDraw d;
  d.angle_deg = rng.uniform(-cfg.max_rotation_degrees, cfg.max_rotation_degrees);
  d.dx = rng.uniform(-cfg.max_translation_pixels, cfg.max_translation_pixels);
  d.dy = rng.uniform(-cfg.max_translation_pixels, cfg.max_translation_pixels);
  return d;
}

ImageRecord augment(const ImageRecord& rec, const AugmentConfig& cfg,
                    Rng& rng) {
  const AugmentDraw d = draw_augment(cfg, rng);
  ImageRecord out = rec;
  out.pixels = apply_affine(rec.pixels, d.angle_deg, d.dx, d.dy);
  return out;
}

std::pair<ImageRecord, double> add_noise(const ImageRecord& rec,
                                         const NoiseConfig& cfg, Rng& rng) {
  cfg.validate();
  const double sigma = rng.uniform(cfg.sigma_min, cfg.sigma_max);
  ImageRecord out = rec;
  for (float& v : out.pixels.data) {
    double noisy = v + sigma * rng.normal();
    if (cfg.clip) noisy = std::clamp(noisy, 0.0, 1.0);
    v = static_cast<float>(noisy);
  }
  return {std::move(out), sigma};
}

}  // namespace rudn
