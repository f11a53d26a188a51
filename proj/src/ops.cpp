#include "rudn/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rudn {

namespace {

template <class S>
void check_conv_args(const Tensor4<S>& x, const Parameter<S>& w,
                     const Parameter<S>& b, const char* op) {
  const Shape& ws = w.value.shape;
  if (ws.n != ws.h || (ws.n != 1 && ws.n != 3)) {
    throw std::invalid_argument(std::string(op) + ": kernel must be 1x1 or 3x3, got " +
                                ws.str());
  }
  if (x.shape.c != ws.w) {
    throw std::invalid_argument(std::string(op) + ": input channels " +
                                x.shape.str() + " do not match weight " +
                                ws.str());
  }
  if (b.value.shape.elems() != ws.c) {
    throw std::invalid_argument(std::string(op) + ": bias shape " +
                                b.value.shape.str() + " does not match weight " +
                                ws.str());
  }
}

// Weight reindexed as (kh, kw, out_c, in_c) so backward input-gradient loops
// run contiguously over in_c.
template <class S>
std::vector<S> transpose_oc_ic(const Tensor4<S>& w) {
  const Shape& s = w.shape;  // (kh, kw, ic, oc)
  std::vector<S> t(static_cast<std::size_t>(s.elems()));
  const S* src = w.ptr();
  for (int ky = 0; ky < s.n; ++ky) {
    for (int kx = 0; kx < s.h; ++kx) {
      const S* blk = src + (static_cast<std::int64_t>(ky) * s.h + kx) * s.w * s.c;
      S* out = t.data() + (static_cast<std::int64_t>(ky) * s.h + kx) * s.w * s.c;
      for (int ic = 0; ic < s.w; ++ic) {
        for (int oc = 0; oc < s.c; ++oc) {
          out[static_cast<std::int64_t>(oc) * s.w + ic] =
              blk[static_cast<std::int64_t>(ic) * s.c + oc];
        }
      }
    }
  }
  return t;
}

}  // namespace

// ---------------------------------------------------------------------------
// conv2d
// ---------------------------------------------------------------------------

template <class S>
Tensor4<S> conv2d(const Tensor4<S>& x, const Parameter<S>& w,
                  const Parameter<S>& b) {
  check_conv_args(x, w, b, "conv2d");
  const int K = w.value.shape.n;
  const int off = K / 2;
  const int B = x.shape.n, H = x.shape.h, W = x.shape.w, Ci = x.shape.c;
  const int Co = w.value.shape.c;

  Tensor4<S> y(Shape{B, H, W, Co});
  const S* bias = b.value.ptr();
  const S* wp = w.value.ptr();

  for (int bi = 0; bi < B; ++bi) {
    for (int yi = 0; yi < H; ++yi) {
      for (int xi = 0; xi < W; ++xi) {
        S* out = y.row(bi, yi, xi);
        for (int oc = 0; oc < Co; ++oc) out[oc] = bias[oc];
        for (int ky = 0; ky < K; ++ky) {
          const int sy = yi + ky - off;
          if (sy < 0 || sy >= H) continue;
          for (int kx = 0; kx < K; ++kx) {
            const int sx = xi + kx - off;
            if (sx < 0 || sx >= W) continue;
            const S* xp = x.row(bi, sy, sx);
            const S* wrow =
                wp + (static_cast<std::int64_t>(ky) * K + kx) * Ci * Co;
            for (int ic = 0; ic < Ci; ++ic) {
              const S v = xp[ic];
              const S* ww = wrow + static_cast<std::int64_t>(ic) * Co;
              for (int oc = 0; oc < Co; ++oc) out[oc] += v * ww[oc];
            }
          }
        }
      }
    }
  }
  return y;
}

template <class S>
Tensor4<S> conv2d_backward(const Tensor4<S>& x, Parameter<S>& w,
                           Parameter<S>& b, const Tensor4<S>& gy) {
  check_conv_args(x, w, b, "conv2d_backward");
  const int K = w.value.shape.n;
  const int off = K / 2;
  const int B = x.shape.n, H = x.shape.h, W = x.shape.w, Ci = x.shape.c;
  const int Co = w.value.shape.c;
  if (gy.shape.n != B || gy.shape.h != H || gy.shape.w != W ||
      gy.shape.c != Co) {
    throw std::invalid_argument("conv2d_backward: grad shape " +
                                gy.shape.str() + " does not match output of " +
                                x.shape.str());
  }

  Tensor4<S> gx(x.shape);
  const std::vector<S> wt = transpose_oc_ic(w.value);  // (kh,kw,oc,ic)
  const bool train = w.trainable;
  S* gw = w.grad.ptr();
  S* gb = b.grad.ptr();

  for (int bi = 0; bi < B; ++bi) {
    for (int yi = 0; yi < H; ++yi) {
      for (int xi = 0; xi < W; ++xi) {
        const S* g = gy.row(bi, yi, xi);
        if (train) {
          for (int oc = 0; oc < Co; ++oc) gb[oc] += g[oc];
        }
        for (int ky = 0; ky < K; ++ky) {
          const int sy = yi + ky - off;
          if (sy < 0 || sy >= H) continue;
          for (int kx = 0; kx < K; ++kx) {
            const int sx = xi + kx - off;
            if (sx < 0 || sx >= W) continue;
            // gx[sy, sx, :] += g . w^T ; gw[ky, kx, :, :] += x outer g
            S* gxr = gx.row(bi, sy, sx);
            const S* wtr =
                wt.data() + (static_cast<std::int64_t>(ky) * K + kx) * Ci * Co;
            for (int oc = 0; oc < Co; ++oc) {
              const S gv = g[oc];
              const S* wrow = wtr + static_cast<std::int64_t>(oc) * Ci;
              for (int ic = 0; ic < Ci; ++ic) gxr[ic] += gv * wrow[ic];
            }
            if (train) {
              const S* xp = x.row(bi, sy, sx);
              S* gwr =
                  gw + (static_cast<std::int64_t>(ky) * K + kx) * Ci * Co;
              for (int ic = 0; ic < Ci; ++ic) {
                const S v = xp[ic];
                S* gww = gwr + static_cast<std::int64_t>(ic) * Co;
                for (int oc = 0; oc < Co; ++oc) gww[oc] += v * g[oc];
              }
            }
          }
        }
      }
    }
  }
  return gx;
}

// ---------------------------------------------------------------------------
// conv2d_transpose (2x2 kernel, stride 2)
// ---------------------------------------------------------------------------

namespace {

template <class S>
void check_tconv_args(const Tensor4<S>& x, const Parameter<S>& w,
                      const Parameter<S>& b, const char* op) {
  const Shape& ws = w.value.shape;
  if (ws.n != 2 || ws.h != 2) {
    throw std::invalid_argument(std::string(op) + ": kernel must be 2x2, got " +
                                ws.str());
  }
  if (x.shape.c != ws.w) {
    throw std::invalid_argument(std::string(op) + ": input channels " +
                                x.shape.str() + " do not match weight " +
                                ws.str());
  }
  if (b.value.shape.elems() != ws.c) {
    throw std::invalid_argument(std::string(op) + ": bias shape " +
                                b.value.shape.str() + " does not match weight " +
                                ws.str());
  }
}

}  // namespace

template <class S>
Tensor4<S> conv2d_transpose(const Tensor4<S>& x, const Parameter<S>& w,
                            const Parameter<S>& b) {
  check_tconv_args(x, w, b, "conv2d_transpose");
  const int B = x.shape.n, H = x.shape.h, W = x.shape.w, Ci = x.shape.c;
  const int Co = w.value.shape.c;

  Tensor4<S> y(Shape{B, 2 * H, 2 * W, Co});
  const S* bias = b.value.ptr();
  {
    S* out = y.ptr();
    const std::int64_t pixels = static_cast<std::int64_t>(B) * 4 * H * W;
    for (std::int64_t p = 0; p < pixels; ++p) {
      for (int oc = 0; oc < Co; ++oc) out[p * Co + oc] = bias[oc];
    }
  }
  const S* wp = w.value.ptr();
  for (int bi = 0; bi < B; ++bi) {
    for (int yi = 0; yi < H; ++yi) {
      for (int xi = 0; xi < W; ++xi) {
        const S* xp = x.row(bi, yi, xi);
        for (int dy = 0; dy < 2; ++dy) {
          for (int dx = 0; dx < 2; ++dx) {
            S* out = y.row(bi, 2 * yi + dy, 2 * xi + dx);
            const S* wrow =
                wp + (static_cast<std::int64_t>(dy) * 2 + dx) * Ci * Co;
            for (int ic = 0; ic < Ci; ++ic) {
              const S v = xp[ic];
              const S* ww = wrow + static_cast<std::int64_t>(ic) * Co;
              for (int oc = 0; oc < Co; ++oc) out[oc] += v * ww[oc];
            }
          }
        }
      }
    }
  }
  return y;
}

template <class S>
Tensor4<S> conv2d_transpose_backward(const Tensor4<S>& x, Parameter<S>& w,
                                     Parameter<S>& b, const Tensor4<S>& gy) {
  check_tconv_args(x, w, b, "conv2d_transpose_backward");
  const int B = x.shape.n, H = x.shape.h, W = x.shape.w, Ci = x.shape.c;
  const int Co = w.value.shape.c;
  if (gy.shape.n != B || gy.shape.h != 2 * H || gy.shape.w != 2 * W ||
      gy.shape.c != Co) {
    throw std::invalid_argument("conv2d_transpose_backward: grad shape " +
                                gy.shape.str() + " does not match output of " +
                                x.shape.str());
  }

  Tensor4<S> gx(x.shape);
  const std::vector<S> wt = transpose_oc_ic(w.value);
  const bool train = w.trainable;
  S* gw = w.grad.ptr();
  S* gb = b.grad.ptr();

  if (train) {
    const S* g = gy.ptr();
    const std::int64_t pixels = static_cast<std::int64_t>(B) * 4 * H * W;
    for (std::int64_t p = 0; p < pixels; ++p) {
      for (int oc = 0; oc < Co; ++oc) gb[oc] += g[p * Co + oc];
    }
  }

  for (int bi = 0; bi < B; ++bi) {
    for (int yi = 0; yi < H; ++yi) {
      for (int xi = 0; xi < W; ++xi) {
        S* gxr = gx.row(bi, yi, xi);
        const S* xp = x.row(bi, yi, xi);
        for (int dy = 0; dy < 2; ++dy) {
          for (int dx = 0; dx < 2; ++dx) {
            const S* g = gy.row(bi, 2 * yi + dy, 2 * xi + dx);
            const S* wtr =
                wt.data() + (static_cast<std::int64_t>(dy) * 2 + dx) * Ci * Co;
            for (int oc = 0; oc < Co; ++oc) {
              const S gv = g[oc];
              const S* wrow = wtr + static_cast<std::int64_t>(oc) * Ci;
              for (int ic = 0; ic < Ci; ++ic) gxr[ic] += gv * wrow[ic];
            }
            if (train) {
              S* gwr =
                  gw + (static_cast<std::int64_t>(dy) * 2 + dx) * Ci * Co;
              for (int ic = 0; ic < Ci; ++ic) {
                const S v = xp[ic];
                S* gww = gwr + static_cast<std::int64_t>(ic) * Co;
                for (int oc = 0; oc < Co; ++oc) gww[oc] += v * g[oc];
              }
            }
          }
        }
      }
    }
  }
  return gx;
}

// ---------------------------------------------------------------------------
// maxpool2
// ---------------------------------------------------------------------------

template <class S>
PoolResult<S> maxpool2(const Tensor4<S>& x) {
  const int B = x.shape.n, H = x.shape.h, W = x.shape.w, C = x.shape.c;
  if (H % 2 != 0 || W % 2 != 0) {
    throw std::invalid_argument("maxpool2: spatial dims must be even, got " +
                                x.shape.str());
  }
  PoolResult<S> r{Tensor4<S>(Shape{B, H / 2, W / 2, C}), {}};
  r.argmax.resize(static_cast<std::size_t>(r.y.size()));

  for (int bi = 0; bi < B; ++bi) {
    for (int yi = 0; yi < H / 2; ++yi) {
      for (int xi = 0; xi < W / 2; ++xi) {
        S* out = r.y.row(bi, yi, xi);
        std::uint8_t* am =
            r.argmax.data() + r.y.index(bi, yi, xi, 0);
        const S* w00 = x.row(bi, 2 * yi, 2 * xi);
        const S* w01 = x.row(bi, 2 * yi, 2 * xi + 1);
        const S* w10 = x.row(bi, 2 * yi + 1, 2 * xi);
        const S* w11 = x.row(bi, 2 * yi + 1, 2 * xi + 1);
        for (int c = 0; c < C; ++c) {
          S best = w00[c];
          std::uint8_t idx = 0;
          if (w01[c] > best) { best = w01[c]; idx = 1; }
          if (w10[c] > best) { best = w10[c]; idx = 2; }
          if (w11[c] > best) { best = w11[c]; idx = 3; }
          out[c] = best;
          am[c] = idx;
        }
      }
    }
  }
  return r;
}

template <class S>
Tensor4<S> maxpool2_backward(const PoolResult<S>& fwd, const Shape& x_shape,
                             const Tensor4<S>& gy) {
  require_same_shape(fwd.y.shape, gy.shape, "maxpool2_backward");
  const int B = x_shape.n, C = x_shape.c;
  const int HO = fwd.y.shape.h, WO = fwd.y.shape.w;
  Tensor4<S> gx(x_shape);
  for (int bi = 0; bi < B; ++bi) {
    for (int yi = 0; yi < HO; ++yi) {
      for (int xi = 0; xi < WO; ++xi) {
        const S* g = gy.row(bi, yi, xi);
        const std::uint8_t* am = fwd.argmax.data() + fwd.y.index(bi, yi, xi, 0);
        for (int c = 0; c < C; ++c) {
          const int dy = am[c] >> 1;
          const int dx = am[c] & 1;
          gx.at(bi, 2 * yi + dy, 2 * xi + dx, c) += g[c];
        }
      }
    }
  }
  return gx;
}

// ---------------------------------------------------------------------------
// batchnorm
// ---------------------------------------------------------------------------

template <class S>
Tensor4<S> batchnorm(const Tensor4<S>& x, const Parameter<S>& gamma,
                     const Parameter<S>& beta, BnState<S>& state, Mode mode,
                     BnCache<S>* cache, double momentum, double epsilon) {
  const int C = x.shape.c;
  const std::int64_t reduce = static_cast<std::int64_t>(x.shape.n) *
                              x.shape.h * x.shape.w;
  if (reduce == 0) {
    throw std::invalid_argument("batchnorm: zero-size batch " + x.shape.str());
  }
  if (gamma.value.shape.elems() != C || beta.value.shape.elems() != C ||
      state.running_mean.shape.elems() != C) {
    throw std::invalid_argument("batchnorm: per-channel params do not match " +
                                x.shape.str());
  }
  if (epsilon <= 0) {
    throw std::invalid_argument("batchnorm: epsilon must be positive");
  }

  std::vector<double> mean(C), var(C);
  if (mode == Mode::kTrain) {
    std::vector<double> sum(C, 0.0), sq(C, 0.0);
    const S* xp = x.ptr();
    for (std::int64_t p = 0; p < reduce; ++p) {
      const S* r = xp + p * C;
      for (int c = 0; c < C; ++c) {
        sum[c] += r[c];
        sq[c] += static_cast<double>(r[c]) * r[c];
      }
    }
    for (int c = 0; c < C; ++c) {
      mean[c] = sum[c] / static_cast<double>(reduce);
      var[c] = sq[c] / static_cast<double>(reduce) - mean[c] * mean[c];
      if (var[c] < 0) var[c] = 0;  // rounding guard
      state.running_mean.data[c] = static_cast<S>(
          momentum * state.running_mean.data[c] + (1.0 - momentum) * mean[c]);
      state.running_var.data[c] = static_cast<S>(
          momentum * state.running_var.data[c] + (1.0 - momentum) * var[c]);
    }
  } else {
    for (int c = 0; c < C; ++c) {
      mean[c] = state.running_mean.data[c];
      var[c] = state.running_var.data[c];
    }
  }

  std::vector<S> inv_std(C);
  for (int c = 0; c < C; ++c) {
    inv_std[c] = static_cast<S>(1.0 / std::sqrt(var[c] + epsilon));
  }

  Tensor4<S> y(x.shape);
  Tensor4<S> xhat(x.shape);
  const S* gp = gamma.value.ptr();
  const S* bp = beta.value.ptr();
  const S* xp = x.ptr();
  S* yp = y.ptr();
  S* hp = xhat.ptr();
  for (std::int64_t p = 0; p < reduce; ++p) {
    const S* r = xp + p * C;
    S* yr = yp + p * C;
    S* hr = hp + p * C;
    for (int c = 0; c < C; ++c) {
      const S h = static_cast<S>((r[c] - mean[c])) * inv_std[c];
      hr[c] = h;
      yr[c] = gp[c] * h + bp[c];
    }
  }
  if (cache) {
    cache->xhat = std::move(xhat);
    cache->inv_std = std::move(inv_std);
    cache->mode = mode;
  }
  return y;
}

template <class S>
Tensor4<S> batchnorm_backward(const BnCache<S>& cache, Parameter<S>& gamma,
                              Parameter<S>& beta, const Tensor4<S>& gy) {
  require_same_shape(cache.xhat.shape, gy.shape, "batchnorm_backward");
  const int C = gy.shape.c;
  const std::int64_t reduce = static_cast<std::int64_t>(gy.shape.n) *
                              gy.shape.h * gy.shape.w;

  std::vector<double> sum_g(C, 0.0), sum_gh(C, 0.0);
  const S* gp = gy.ptr();
  const S* hp = cache.xhat.ptr();
  for (std::int64_t p = 0; p < reduce; ++p) {
    const S* gr = gp + p * C;
    const S* hr = hp + p * C;
    for (int c = 0; c < C; ++c) {
      sum_g[c] += gr[c];
      sum_gh[c] += static_cast<double>(gr[c]) * hr[c];
    }
  }
  if (gamma.trainable) {
    for (int c = 0; c < C; ++c) {
      gamma.grad.data[c] += static_cast<S>(sum_gh[c]);
      beta.grad.data[c] += static_cast<S>(sum_g[c]);
    }
  }

  Tensor4<S> gx(gy.shape);
  S* ox = gx.ptr();
  const S* gam = gamma.value.ptr();
  if (cache.mode == Mode::kTrain) {
    std::vector<S> mean_g(C), mean_gh(C), scale(C);
    for (int c = 0; c < C; ++c) {
      mean_g[c] = static_cast<S>(sum_g[c] / static_cast<double>(reduce));
      mean_gh[c] = static_cast<S>(sum_gh[c] / static_cast<double>(reduce));
      scale[c] = gam[c] * cache.inv_std[c];
    }
    for (std::int64_t p = 0; p < reduce; ++p) {
      const S* gr = gp + p * C;
      const S* hr = hp + p * C;
      S* oxr = ox + p * C;
      for (int c = 0; c < C; ++c) {
        oxr[c] = scale[c] * (gr[c] - mean_g[c] - hr[c] * mean_gh[c]);
      }
    }
  } else {
    for (std::int64_t p = 0; p < reduce; ++p) {
      const S* gr = gp + p * C;
      S* oxr = ox + p * C;
      for (int c = 0; c < C; ++c) {
        oxr[c] = gam[c] * cache.inv_std[c] * gr[c];
      }
    }
  }
  return gx;
}

// ---------------------------------------------------------------------------
// elementwise / structural
// ---------------------------------------------------------------------------

template <class S>
Tensor4<S> relu(const Tensor4<S>& x) {
  Tensor4<S> y(x.shape);
  for (std::int64_t i = 0; i < x.size(); ++i) {
    y.data[i] = x.data[i] > S(0) ? x.data[i] : S(0);
  }
  return y;
}

template <class S>
Tensor4<S> relu_backward(const Tensor4<S>& x, const Tensor4<S>& gy) {
  require_same_shape(x.shape, gy.shape, "relu_backward");
  Tensor4<S> gx(x.shape);
  for (std::int64_t i = 0; i < x.size(); ++i) {
    gx.data[i] = x.data[i] > S(0) ? gy.data[i] : S(0);
  }
  return gx;
}

template <class S>
Tensor4<S> sigmoid(const Tensor4<S>& x) {
  constexpr S lo = std::numeric_limits<S>::min();
  const S hi = S(1) - std::numeric_limits<S>::epsilon() / S(2);
  Tensor4<S> y(x.shape);
  for (std::int64_t i = 0; i < x.size(); ++i) {
    const S v = S(1) / (S(1) + std::exp(-x.data[i]));
    y.data[i] = std::clamp(v, lo, hi);
  }
  return y;
}

template <class S>
Tensor4<S> sigmoid_backward(const Tensor4<S>& y, const Tensor4<S>& gy) {
  require_same_shape(y.shape, gy.shape, "sigmoid_backward");
  Tensor4<S> gx(y.shape);
  for (std::int64_t i = 0; i < y.size(); ++i) {
    gx.data[i] = gy.data[i] * y.data[i] * (S(1) - y.data[i]);
  }
  return gx;
}

template <class S>
Tensor4<S> add(const Tensor4<S>& a, const Tensor4<S>& b) {
  require_same_shape(a.shape, b.shape, "add");
  Tensor4<S> y(a.shape);
  for (std::int64_t i = 0; i < a.size(); ++i) {
    y.data[i] = a.data[i] + b.data[i];
  }
  return y;
}

template <class S>
Tensor4<S> concat_channels(const Tensor4<S>& a, const Tensor4<S>& b) {
  if (a.shape.n != b.shape.n || a.shape.h != b.shape.h ||
      a.shape.w != b.shape.w) {
    throw std::invalid_argument("concat_channels: batch/spatial mismatch " +
                                a.shape.str() + " vs " + b.shape.str());
  }
  const int Ca = a.shape.c, Cb = b.shape.c;
  Tensor4<S> y(Shape{a.shape.n, a.shape.h, a.shape.w, Ca + Cb});
  const std::int64_t pixels =
      static_cast<std::int64_t>(a.shape.n) * a.shape.h * a.shape.w;
  const S* pa = a.ptr();
  const S* pb = b.ptr();
  S* py = y.ptr();
  for (std::int64_t p = 0; p < pixels; ++p) {
    std::copy(pa + p * Ca, pa + (p + 1) * Ca, py + p * (Ca + Cb));
    std::copy(pb + p * Cb, pb + (p + 1) * Cb, py + p * (Ca + Cb) + Ca);
  }
  return y;
}

template <class S>
void split_channels(const Tensor4<S>& g, int c_a, Tensor4<S>* ga,
                    Tensor4<S>* gb) {
  const int C = g.shape.c;
  if (c_a <= 0 || c_a >= C) {
    throw std::invalid_argument("split_channels: bad split point " +
                                std::to_string(c_a) + " for " + g.shape.str());
  }
  const int c_b = C - c_a;
  *ga = Tensor4<S>(Shape{g.shape.n, g.shape.h, g.shape.w, c_a});
  *gb = Tensor4<S>(Shape{g.shape.n, g.shape.h, g.shape.w, c_b});
  const std::int64_t pixels =
      static_cast<std::int64_t>(g.shape.n) * g.shape.h * g.shape.w;
  const S* pg = g.ptr();
  for (std::int64_t p = 0; p < pixels; ++p) {
    std::copy(pg + p * C, pg + p * C + c_a, ga->ptr() + p * c_a);
    std::copy(pg + p * C + c_a, pg + (p + 1) * C, gb->ptr() + p * c_b);
  }
}

template <class S>
Tensor4<S> downsample2(const Tensor4<S>& x) {
  const int B = x.shape.n, H = x.shape.h, W = x.shape.w, C = x.shape.c;
  if (H % 2 != 0 || W % 2 != 0) {
    throw std::invalid_argument("downsample2: spatial dims must be even, got " +
                                x.shape.str());
  }
  Tensor4<S> y(Shape{B, H / 2, W / 2, C});
  for (int bi = 0; bi < B; ++bi) {
    for (int yi = 0; yi < H / 2; ++yi) {
      for (int xi = 0; xi < W / 2; ++xi) {
        const S* src = x.row(bi, 2 * yi, 2 * xi);
        std::copy(src, src + C, y.row(bi, yi, xi));
      }
    }
  }
  return y;
}

template <class S>
Tensor4<S> downsample2_backward(const Shape& x_shape, const Tensor4<S>& gy) {
  Tensor4<S> gx(x_shape);
  const int B = x_shape.n, C = x_shape.c;
  for (int bi = 0; bi < B; ++bi) {
    for (int yi = 0; yi < gy.shape.h; ++yi) {
      for (int xi = 0; xi < gy.shape.w; ++xi) {
        const S* g = gy.row(bi, yi, xi);
        std::copy(g, g + C, gx.row(bi, 2 * yi, 2 * xi));
      }
    }
  }
  return gx;
}

// ---------------------------------------------------------------------------
// explicit instantiations
// ---------------------------------------------------------------------------

#define RUDN_INSTANTIATE_OPS(S)                                               \
  template Tensor4<S> conv2d<S>(const Tensor4<S>&, const Parameter<S>&,       \
                                const Parameter<S>&);                         \
  template Tensor4<S> conv2d_backward<S>(const Tensor4<S>&, Parameter<S>&,    \
                                         Parameter<S>&, const Tensor4<S>&);   \
  template Tensor4<S> conv2d_transpose<S>(const Tensor4<S>&,                  \
                                          const Parameter<S>&,                \
                                          const Parameter<S>&);               \
  template Tensor4<S> conv2d_transpose_backward<S>(                           \
      const Tensor4<S>&, Parameter<S>&, Parameter<S>&, const Tensor4<S>&);    \
  template PoolResult<S> maxpool2<S>(const Tensor4<S>&);                      \
  template Tensor4<S> maxpool2_backward<S>(const PoolResult<S>&,              \
                                           const Shape&, const Tensor4<S>&);  \
  template Tensor4<S> batchnorm<S>(const Tensor4<S>&, const Parameter<S>&,    \
                                   const Parameter<S>&, BnState<S>&, Mode,    \
                                   BnCache<S>*, double, double);              \
  template Tensor4<S> batchnorm_backward<S>(const BnCache<S>&, Parameter<S>&, \
                                            Parameter<S>&, const Tensor4<S>&);\
  template Tensor4<S> relu<S>(const Tensor4<S>&);                             \
  template Tensor4<S> relu_backward<S>(const Tensor4<S>&, const Tensor4<S>&); \
  template Tensor4<S> sigmoid<S>(const Tensor4<S>&);                          \
  template Tensor4<S> sigmoid_backward<S>(const Tensor4<S>&,                  \
                                          const Tensor4<S>&);                 \
  template Tensor4<S> add<S>(const Tensor4<S>&, const Tensor4<S>&);           \
  template Tensor4<S> concat_channels<S>(const Tensor4<S>&,                   \
                                         const Tensor4<S>&);                  \
  template void split_channels<S>(const Tensor4<S>&, int, Tensor4<S>*,        \
                                  Tensor4<S>*);                               \
  template Tensor4<S> downsample2<S>(const Tensor4<S>&);                      \
  template Tensor4<S> downsample2_backward<S>(const Shape&, const Tensor4<S>&);

RUDN_INSTANTIATE_OPS(float)
RUDN_INSTANTIATE_OPS(double)

#undef RUDN_INSTANTIATE_OPS

}  // namespace rudn
