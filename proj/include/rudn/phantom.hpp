#pragma once

#include <cstdint>

#include "rudn/image_io.hpp"
#include "rudn/rng.hpp"

namespace rudn {

// Synthetic OCT-like test images. Posterior-family phantoms are stacks of
// 4-8 smooth horizontal bands with distinct mean intensities, a shared
// sinusoidal curvature, and 1-3 dark vertical vessel shadows. Anterior-family
// phantoms are a bright elliptical arc (cornea) plus two angled wedges (iris)
// over a dark background. Optional multiplicative speckle on top; all pixels
// end up in [0, 1].
struct PhantomConfig {
  Source family = Source::kPosterior;
  int height = 200;
  int width = 400;

  // posterior family
  int bands_min = 4;
  int bands_max = 8;
  double curvature_min = 0.01;  // sinusoid amplitude, fraction of height
  double curvature_max = 0.03;
  int vessels_min = 1;
  int vessels_max = 3;

  // multiplicative speckle strength s: pixel *= (1 + s * g), then clip
  double speckle = 0.0;

  std::uint64_t seed = 0;

  void validate() const;  // throws std::invalid_argument
};

// All draws come from the provided stream, so the image is a pure function
// of (cfg, stream state). The single-argument overload derives the stream
// from cfg.seed.
ImageRecord generate_phantom(const PhantomConfig& cfg, Rng& rng);
ImageRecord generate_phantom(const PhantomConfig& cfg);

}  // namespace rudn
