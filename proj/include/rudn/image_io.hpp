#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rudn/tensor.hpp"

namespace rudn {

enum class Source { kPosterior, kAnterior, kExternal };

const char* source_name(Source s);
Source parse_source(const std::string& name);  // throws data_error

// One grayscale image in the pipeline: pixels are (1, h, w, 1) in [0, 1].
struct ImageRecord {
  std::string id;
  Tensor pixels;
  Source source = Source::kExternal;
  int orig_h = 0;
  int orig_w = 0;
};

// 8-bit quantization used for every write: round(clamp(v, 0, 1) * 255).
std::vector<std::uint8_t> quantize_u8(const Tensor& img);

// Readers dispatch on the file's magic bytes (binary PGM "P5" or PNG); the
// writer dispatches on the extension (.pgm / .png). Values scale by the
// stored maximum so 255 maps to 1.0. Failures throw data_error naming the
// path.
Tensor load_gray8(const std::string& path);
void save_gray8(const Tensor& img, const std::string& path);

// load_gray8 plus record bookkeeping: id defaults to the filename stem.
ImageRecord load_image(const std::string& path);

}  // namespace rudn
