#include "rudn/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace rudn {

void PhantomConfig::validate() const {
  if (height <= 0 || width <= 0) {
    throw std::invalid_argument("PhantomConfig: dims must be positive");
  }
  if (family == Source::kExternal) {
    throw std::invalid_argument(
        "PhantomConfig: family must be posterior or anterior");
  }
  if (bands_min < 2 || bands_max < bands_min) {
    throw std::invalid_argument("PhantomConfig: need 2 <= bands_min <= bands_max");
  }
  if (vessels_min < 0 || vessels_max < vessels_min) {
    throw std::invalid_argument("PhantomConfig: bad vessel count range");
  }
  if (curvature_min < 0 || curvature_max < curvature_min) {
    throw std::invalid_argument("PhantomConfig: bad curvature range");
  }
  if (speckle < 0) {
    throw std::invalid_argument("PhantomConfig: speckle must be >= 0");
  }
}

namespace {

constexpr double kPi = std::numbers::pi;

void apply_speckle_and_clip(Tensor& img, double s, Rng& rng) {
  if (s > 0) {
    for (float& v : img.data) {
      v = static_cast<float>(v * (1.0 + s * rng.normal()));
    }
  }
  for (float& v : img.data) {
    if (v < 0.0f) v = 0.0f;
    if (v > 1.0f) v = 1.0f;
  }
}

Tensor posterior_phantom(const PhantomConfig& cfg, Rng& rng) {
  const int h = cfg.height, w = cfg.width;

  const int nb =
      cfg.bands_min +
      static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.bands_max - cfg.bands_min + 1)));

  // band boundaries: evenly spaced with a jitter small enough to keep every
  // band at least 2/3 of its nominal thickness
  std::vector<double> bounds(nb - 1);
  for (int i = 1; i < nb; ++i) {
    const double base = static_cast<double>(h) * i / nb;
    const double j = rng.uniform(-1.0, 1.0) * h / (6.0 * nb);
    bounds[i - 1] = base + j;
  }

  // distinct mean intensities: an evenly spaced ladder, shuffled, plus a
  // small per-band jitter that cannot close the gaps
  std::vector<double> levels(nb);
  for (int i = 0; i < nb; ++i) {
    levels[i] = nb == 1 ? 0.5 : 0.15 + 0.7 * i / (nb - 1);
  }
  rng.shuffle(levels);
  for (double& v : levels) v += rng.uniform(-0.02, 0.02);

  const double amp = rng.uniform(cfg.curvature_min, cfg.curvature_max) * h;
  const double cycles = rng.uniform(0.5, 1.5);
  const double phase = rng.uniform(0.0, 2.0 * kPi);

  const int nv =
      cfg.vessels_min +
      static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.vessels_max - cfg.vessels_min + 1)));
  struct Vessel {
    double cx, sigma, depth;
  };
  std::vector<Vessel> vessels(nv);
  for (Vessel& v : vessels) {
    v.cx = rng.uniform(0.15, 0.85) * w;
    v.sigma = rng.uniform(0.008, 0.02) * w + 1.0;
    v.depth = rng.uniform(0.35, 0.65);
  }

  // column-wise attenuation from the vessel shadows
  std::vector<double> shade(w, 1.0);
  for (int c = 0; c < w; ++c) {
    for (const Vessel& v : vessels) {
      const double z = (c - v.cx) / v.sigma;
      shade[c] *= 1.0 - v.depth * std::exp(-0.5 * z * z);
    }
  }

  constexpr double kEdge = 0.75;  // crossfade half-width at band boundaries
  Tensor img(Shape{1, h, w, 1});
  for (int c = 0; c < w; ++c) {
    const double shift = amp * std::sin(2.0 * kPi * cycles * c / w + phase);
    for (int r = 0; r < h; ++r) {
      const double rr = r - shift;  // row in the un-curved band frame
      int k = 0;
      while (k < nb - 1 && rr >= bounds[k]) ++k;
      double v = levels[k];
      // blend across the nearest boundary for a smooth edge
      if (k > 0 && rr - bounds[k - 1] < kEdge) {
        const double t = 0.5 + (rr - bounds[k - 1]) / (2.0 * kEdge);
        v = levels[k - 1] + (levels[k] - levels[k - 1]) * t;
      } else if (k < nb - 1 && bounds[k] - rr < kEdge) {
        const double t = 0.5 - (bounds[k] - rr) / (2.0 * kEdge);
        v = levels[k] + (levels[k + 1] - levels[k]) * t;
      }
      img.at(0, r, c, 0) = static_cast<float>(v * shade[c]);
    }
  }
  return img;
}

Tensor anterior_phantom(const PhantomConfig& cfg, Rng& rng) {
  const int h = cfg.height, w = cfg.width;

  const double bg = rng.uniform(0.02, 0.05);

  // cornea: bright elliptical arc over the top half
  const double ccy = rng.uniform(0.6, 0.8) * h;
  const double crx = rng.uniform(0.55, 0.7) * w;
  const double cry = rng.uniform(0.5, 0.65) * h;
  const double thick = rng.uniform(0.015, 0.03);
  const double cornea_b = rng.uniform(0.65, 0.85);

  // iris: two wedges sloping outward-down from a central pupil gap
  const double iris_y = rng.uniform(0.55, 0.7) * h;
  const double iris_half = rng.uniform(0.04, 0.07) * h;
  const double slope = rng.uniform(0.08, 0.2);
  const double pupil_half = rng.uniform(0.08, 0.15) * w;
  const double iris_b = rng.uniform(0.45, 0.6);

  const double cx = (w - 1) / 2.0;
  Tensor img(Shape{1, h, w, 1});
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double v = bg;
      if (r < ccy) {
        const double ex = (c - cx) / crx;
        const double ey = (r - ccy) / cry;
        const double d = std::sqrt(ex * ex + ey * ey);
        const double z = (d - 1.0) / thick;
        if (std::abs(z) < 4.0) {
          v = std::max(v, cornea_b * std::exp(-z * z));
        }
      }
      const double lc = std::abs(c - cx);
      if (lc >= pupil_half) {
        const double wedge_y = iris_y + slope * (lc - pupil_half);
        const double z = (r - wedge_y) / iris_half;
        const double z2 = z * z;
        if (z2 < 16.0) {
          v = std::max(v, iris_b * std::exp(-z2 * z2));
        }
      }
      img.at(0, r, c, 0) = static_cast<float>(v);
    }
  }
  return img;
}

}  // namespace

ImageRecord generate_phantom(const PhantomConfig& cfg, Rng& rng) {
  cfg.validate();
  ImageRecord rec;
  rec.source = cfg.family;
  rec.pixels = cfg.family == Source::kPosterior ? posterior_phantom(cfg, rng)
                                                : anterior_phantom(cfg, rng);
  apply_speckle_and_clip(rec.pixels, cfg.speckle, rng);
  rec.orig_h = cfg.height;
  rec.orig_w = cfg.width;
  return rec;
}

ImageRecord generate_phantom(const PhantomConfig& cfg) {
  Rng rng = Rng(cfg.seed).stream("phantom");
  return generate_phantom(cfg, rng);
}

}  // namespace rudn
