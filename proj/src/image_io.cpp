#include "rudn/image_io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "rudn/errors.hpp"

namespace rudn {

const char* source_name(Source s) {
  switch (s) {
    case Source::kPosterior: return "posterior";
    case Source::kAnterior: return "anterior";
    case Source::kExternal: return "external";
  }
  return "external";
}

Source parse_source(const std::string& name) {
  if (name == "posterior") return Source::kPosterior;
  if (name == "anterior") return Source::kAnterior;
  if (name == "external") return Source::kExternal;
  throw data_error("unknown source family: '" + name + "'");
}

std::vector<std::uint8_t> quantize_u8(const Tensor& img) {
  std::vector<std::uint8_t> out(img.data.size());
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    float v = img.data[i];
    if (v < 0.0f) v = 0.0f;
    if (v > 1.0f) v = 1.0f;
    out[i] = static_cast<std::uint8_t>(std::lround(v * 255.0f));
  }
  return out;
}

namespace {

void require_image_shape(const Tensor& img, const std::string& path) {
  if (img.shape.n != 1 || img.shape.c != 1 || img.shape.h <= 0 ||
      img.shape.w <= 0) {
    throw data_error(path + ": expected a (1,h,w,1) image tensor, got " +
                     img.shape.str());
  }
}

// --- binary PGM (P5) -------------------------------------------------------
// Header: "P5", then width, height, maxval as ASCII decimals separated by
// whitespace, with '#' comments allowed anywhere between tokens; exactly one
// whitespace byte separates the maxval from the raster.

int pgm_token(std::ifstream& in, const std::string& path, const char* what) {
  // skip whitespace and comments
  int ch = in.get();
  while (ch != EOF) {
    if (ch == '#') {
      while (ch != EOF && ch != '\n' && ch != '\r') ch = in.get();
    } else if (std::isspace(ch)) {
      ch = in.get();
    } else {
      break;
    }
  }
  if (ch == EOF || !std::isdigit(ch)) {
    throw data_error(path + ": malformed PGM header (missing " +
                     std::string(what) + ")");
  }
  long v = 0;
  while (ch != EOF && std::isdigit(ch)) {
    v = v * 10 + (ch - '0');
    if (v > 1'000'000'000L) {
      throw data_error(path + ": PGM " + std::string(what) + " out of range");
    }
    ch = in.get();
  }
  if (ch != EOF) in.unget();
  return static_cast<int>(v);
}

Tensor load_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error(path + ": cannot open file");
  char m0 = 0, m1 = 0;
  in.get(m0);
  in.get(m1);
  if (m0 != 'P' || m1 != '5') {
    throw data_error(path + ": not a binary PGM (P5) file");
  }
  int w = pgm_token(in, path, "width");
  int h = pgm_token(in, path, "height");
  int maxval = pgm_token(in, path, "maxval");
  if (w <= 0 || h <= 0) {
    throw data_error(path + ": invalid PGM dimensions " + std::to_string(w) +
                     "x" + std::to_string(h));
  }
  if (maxval <= 0 || maxval > 255) {
    throw data_error(path + ": unsupported PGM maxval " +
                     std::to_string(maxval) + " (need 8-bit, <= 255)");
  }
  int sep = in.get();
  if (sep == EOF || !std::isspace(sep)) {
    throw data_error(path + ": malformed PGM header (missing raster separator)");
  }
  std::vector<std::uint8_t> raw(static_cast<std::size_t>(w) * h);
  in.read(reinterpret_cast<char*>(raw.data()),
          static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size())) {
    throw data_error(path + ": truncated PGM raster");
  }
  Tensor img(Shape{1, h, w, 1});
  const float scale = 1.0f / static_cast<float>(maxval);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    img.data[i] = static_cast<float>(raw[i]) * scale;
  }
  return img;
}

void save_pgm(const Tensor& img, const std::string& path) {
  std::vector<std::uint8_t> raw = quantize_u8(img);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw data_error(path + ": cannot open file for writing");
  out << "P5\n" << img.shape.w << " " << img.shape.h << "\n255\n";
  out.write(reinterpret_cast<const char*>(raw.data()),
            static_cast<std::streamsize>(raw.size()));
  if (!out) throw data_error(path + ": write failed");
}

// --- PNG (via OpenCV imgcodecs) --------------------------------------------

Tensor load_png(const std::string& path) {
  cv::Mat mat = cv::imread(path, cv::IMREAD_UNCHANGED);
  if (mat.empty()) throw data_error(path + ": cannot decode PNG");
  if (mat.type() != CV_8UC1) {
    throw data_error(path + ": expected 8-bit single-channel PNG, got type " +
                     std::to_string(mat.type()));
  }
  Tensor img(Shape{1, mat.rows, mat.cols, 1});
  for (int r = 0; r < mat.rows; ++r) {
    const std::uint8_t* src = mat.ptr<std::uint8_t>(r);
    float* dst = img.row(0, r, 0);
    for (int c = 0; c < mat.cols; ++c) {
      dst[c] = static_cast<float>(src[c]) * (1.0f / 255.0f);
    }
  }
  return img;
}

void save_png(const Tensor& img, const std::string& path) {
  std::vector<std::uint8_t> raw = quantize_u8(img);
  cv::Mat mat(img.shape.h, img.shape.w, CV_8UC1, raw.data());
  bool ok = false;
  try {
    ok = cv::imwrite(path, mat);
  } catch (const cv::Exception& e) {
    throw data_error(path + ": PNG encode failed (" + std::string(e.what()) +
                     ")");
  }
  if (!ok) throw data_error(path + ": PNG write failed");
}

}  // namespace

Tensor load_gray8(const std::string& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw data_error(path + ": cannot open file");
  unsigned char magic[8] = {0};
  probe.read(reinterpret_cast<char*>(magic), sizeof magic);
  std::streamsize got = probe.gcount();
  probe.close();
  if (got >= 2 && magic[0] == 'P' && magic[1] == '5') {
    return load_pgm(path);
  }
  static const unsigned char kPng[8] = {0x89, 'P', 'N', 'G',
                                        '\r', '\n', 0x1a, '\n'};
  if (got >= 8 && std::equal(kPng, kPng + 8, magic)) {
    return load_png(path);
  }
  throw data_error(path + ": unsupported image format (need binary PGM or PNG)");
}

void save_gray8(const Tensor& img, const std::string& path) {
  require_image_shape(img, path);
  std::string ext = std::filesystem::path(path).extension().string();
  for (char& c : ext) c = static_cast<char>(std::tolower(c));
  if (ext == ".pgm") {
    save_pgm(img, path);
  } else if (ext == ".png") {
    save_png(img, path);
  } else {
    throw data_error(path + ": unsupported output extension '" + ext +
                     "' (need .pgm or .png)");
  }
}

ImageRecord load_image(const std::string& path) {
  ImageRecord rec;
  rec.pixels = load_gray8(path);
  rec.id = std::filesystem::path(path).stem().string();
  rec.orig_h = rec.pixels.shape.h;
  rec.orig_w = rec.pixels.shape.w;
  return rec;
}

}  // namespace rudn
