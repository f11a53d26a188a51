#pragma once

#include <cstdint>
#include <utility>

#include "rudn/image_io.hpp"
#include "rudn/rng.hpp"

namespace rudn {

struct NoiseConfig {
  double sigma_min = 0.02;
  double sigma_max = 0.5;
  bool clip = true;  // clamp the noisy image back into [0, 1]
  std::uint64_t seed = 0;

  void validate() const;  // 0 <= sigma_min <= sigma_max
};

struct AugmentConfig {
  double max_rotation_degrees = 10.0;
  double max_translation_pixels = 10.0;
  std::uint64_t seed = 0;
};

// Uniform size rule: when both source dims fit inside the target, zero-pad
// symmetrically (odd remainder goes to the bottom/right); otherwise bilinear
// resize to the target. Output dims are exactly (target_h, target_w).
ImageRecord preprocess(const ImageRecord& rec, int target_h, int target_w);

Tensor pad_to(const Tensor& img, int target_h, int target_w);

// Half-pixel-center bilinear resampling with edge clamping; a constant image
// stays exactly constant.
Tensor resize_bilinear(const Tensor& img, int out_h, int out_w);

// Rotation about the image center followed by a translation of (dx, dy)
// pixels (columns, rows), sampled bilinearly with zero fill outside the
// source and the result clamped to [0, 1]. The all-zero transform is a
// bit-exact identity.
Tensor apply_affine(const Tensor& img, double angle_deg, double dx, double dy);

struct AugmentDraw {
  double angle_deg = 0.0;
  double dx = 0.0;
  double dy = 0.0;
};

// Consumes exactly three uniforms, in the order angle, dx, dy.
AugmentDraw draw_augment(const AugmentConfig& cfg, Rng& rng);

ImageRecord augment(const ImageRecord& rec, const AugmentConfig& cfg,
                    Rng& rng);

// sigma ~ U[sigma_min, sigma_max] drawn first, then one standard normal per
// pixel in row-major order. Returns the noisy record and the drawn sigma.
std::pair<ImageRecord, double> add_noise(const ImageRecord& rec,
                                         const NoiseConfig& cfg, Rng& rng);

}  // namespace rudn
