#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rudn {

// Rank-4 shape, (batch, height, width, channels) for activations.
// Convolution weights reuse the same rank: (kh, kw, in_c, out_c).
struct Shape {
  int n = 0;
  int h = 0;
  int w = 0;
  int c = 0;

  std::int64_t elems() const {
    return static_cast<std::int64_t>(n) * h * w * c;
  }
  bool operator==(const Shape&) const = default;
  std::string str() const {
    return "(" + std::to_string(n) + "," + std::to_string(h) + "," +
           std::to_string(w) + "," + std::to_string(c) + ")";
  }
};

// Dense row-major rank-4 array. float for training, double for gradient
// verification.
template <class S>
struct Tensor4 {
  Shape shape;
  std::vector<S> data;

  Tensor4() = default;
  explicit Tensor4(Shape s, S fill = S(0))
      : shape(s), data(checked_elems(s), fill) {}

  static std::size_t checked_elems(const Shape& s) {
    if (s.n < 0 || s.h < 0 || s.w < 0 || s.c < 0) {
      throw std::invalid_argument("Tensor4: negative dimension in " + s.str());
    }
    return static_cast<std::size_t>(s.elems());
  }

  static Tensor4 zeros_like(const Tensor4& t) { return Tensor4(t.shape); }

  std::int64_t size() const { return static_cast<std::int64_t>(data.size()); }

  std::int64_t index(int b, int y, int x, int ch) const {
    return ((static_cast<std::int64_t>(b) * shape.h + y) * shape.w + x) *
               shape.c +
           ch;
  }
  S& at(int b, int y, int x, int ch) { return data[index(b, y, x, ch)]; }
  S at(int b, int y, int x, int ch) const { return data[index(b, y, x, ch)]; }

  S* ptr() { return data.data(); }
  const S* ptr() const { return data.data(); }
  S* row(int b, int y, int x) { return data.data() + index(b, y, x, 0); }
  const S* row(int b, int y, int x) const {
    return data.data() + index(b, y, x, 0);
  }

  void fill(S v) { std::fill(data.begin(), data.end(), v); }

  template <class T>
  Tensor4<T> cast() const {
    Tensor4<T> out(shape);
    for (std::size_t i = 0; i < data.size(); ++i) {
      out.data[i] = static_cast<T>(data[i]);
    }
    return out;
  }
};

using Tensor = Tensor4<float>;
using DTensor = Tensor4<double>;

inline void require_same_shape(const Shape& a, const Shape& b,
                               const char* op) {
  if (!(a == b)) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch " +
                                a.str() + " vs " + b.str());
  }
}

}  // namespace rudn
