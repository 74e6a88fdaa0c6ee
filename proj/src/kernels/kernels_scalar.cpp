#include <algorithm>
#include <cmath>

#include "streetscope/kernels/kernels.hpp"

namespace streetscope::kernels {

namespace {

inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

void conv_rows_f32_scalar(const float* src, float* dst, int width, int height,
                          const float* taps, int radius) {
  const int n = 2 * radius + 1;
  for (int y = 0; y < height; ++y) {
    const float* row = src + static_cast<std::size_t>(y) * width;
    float* out = dst + static_cast<std::size_t>(y) * width;
    for (int x = 0; x < width; ++x) {
      float acc = 0.0f;
      for (int k = 0; k < n; ++k)
        acc += taps[k] * row[clampi(x + k - radius, 0, width - 1)];
      out[x] = acc;
    }
  }
}

void conv_cols_f32_scalar(const float* src, float* dst, int width, int height,
                          const float* taps, int radius) {
  const int n = 2 * radius + 1;
  for (int y = 0; y < height; ++y) {
    float* out = dst + static_cast<std::size_t>(y) * width;
    for (int x = 0; x < width; ++x) {
      float acc = 0.0f;
      for (int k = 0; k < n; ++k) {
        const int yy = clampi(y + k - radius, 0, height - 1);
        acc += taps[k] * src[static_cast<std::size_t>(yy) * width + x];
      }
      out[x] = acc;
    }
  }
}

void scale_u8_f32_scalar(const std::uint8_t* src, float* dst, std::size_t n,
                         float gain) {
  for (std::size_t i = 0; i < n; ++i)
    dst[i] = gain * static_cast<float>(src[i]);
}

void gradient4_f32_scalar(const float* src, int width, int height, float* mag,
                          std::uint8_t* sector) {
  std::fill(mag, mag + static_cast<std::size_t>(width) * height, 0.0f);
  std::fill(sector, sector + static_cast<std::size_t>(width) * height,
            std::uint8_t{0});
  for (int y = 1; y + 1 < height; ++y) {
    const float* r0 = src + static_cast<std::size_t>(y - 1) * width;
    const float* r1 = src + static_cast<std::size_t>(y) * width;
    const float* r2 = src + static_cast<std::size_t>(y + 1) * width;
    float* m = mag + static_cast<std::size_t>(y) * width;
    std::uint8_t* s = sector + static_cast<std::size_t>(y) * width;
    for (int x = 1; x + 1 < width; ++x) {
      const float gx = ((r0[x + 1] + 2.0f * r1[x + 1]) + r2[x + 1]) -
                       ((r0[x - 1] + 2.0f * r1[x - 1]) + r2[x - 1]);
      const float gy = ((r2[x - 1] + 2.0f * r2[x]) + r2[x + 1]) -
                       ((r0[x - 1] + 2.0f * r0[x]) + r0[x + 1]);
      const float g45 = ((r0[x] + 2.0f * r0[x + 1]) + r1[x + 1]) -
                        ((r1[x - 1] + 2.0f * r2[x - 1]) + r2[x]);
      const float g135 = ((r1[x + 1] + 2.0f * r2[x + 1]) + r2[x]) -
                         ((r0[x] + 2.0f * r0[x - 1]) + r1[x - 1]);
      m[x] = std::sqrt(gx * gx + gy * gy);
      const float ax = std::fabs(gx);
      const float a135 = std::fabs(g135);
      const float ay = std::fabs(gy);
      const float a45 = std::fabs(g45);
      std::uint8_t best = 0;
      float bv = ax;
      if (a135 > bv) { bv = a135; best = 1; }
      if (ay > bv) { bv = ay; best = 2; }
      if (a45 > bv) { best = 3; }
      s[x] = best;
    }
  }
}

void products_u8_f64_scalar(const std::uint8_t* x, const std::uint8_t* y,
                            std::size_t n, double* fx, double* fy, double* xx,
                            double* yy, double* xy) {
  for (std::size_t i = 0; i < n; ++i) {
    const double a = static_cast<double>(x[i]);
    const double b = static_cast<double>(y[i]);
    fx[i] = a;
    fy[i] = b;
    xx[i] = a * a;
    yy[i] = b * b;
    xy[i] = a * b;
  }
}

void box_cols_f64_scalar(const double* src, double* dst, int width, int height,
                         int win) {
  const int out_h = height - win + 1;
  for (int x = 0; x < width; ++x) {
    double acc = 0.0;
    for (int k = 0; k < win; ++k)
      acc += src[static_cast<std::size_t>(k) * width + x];
    dst[x] = acc;
    for (int y = 1; y < out_h; ++y) {
      acc += src[static_cast<std::size_t>(y + win - 1) * width + x] -
             src[static_cast<std::size_t>(y - 1) * width + x];
      dst[static_cast<std::size_t>(y) * width + x] = acc;
    }
  }
}

void accumulate_u32_scalar(const std::uint8_t* src, std::uint32_t* acc,
                           std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += src[i];
}

void sum_sumsq_u8_scalar(const std::uint8_t* src, std::size_t n,
                         std::uint64_t* sum, std::uint64_t* sumsq) {
  std::uint64_t s = 0, s2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t v = src[i];
    s += v;
    s2 += v * v;
  }
  *sum = s;
  *sumsq = s2;
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops table = {
      "scalar",
      conv_rows_f32_scalar,
      conv_cols_f32_scalar,
      scale_u8_f32_scalar,
      gradient4_f32_scalar,
      products_u8_f64_scalar,
      box_cols_f64_scalar,
      accumulate_u32_scalar,
      sum_sumsq_u8_scalar,
  };
  return table;
}

void box_rows_f64(const double* src, double* dst, int width, int height,
                  int win) {
  const int out_w = width - win + 1;
  for (int y = 0; y < height; ++y) {
    const double* row = src + static_cast<std::size_t>(y) * width;
    double* out = dst + static_cast<std::size_t>(y) * out_w;
    double acc = 0.0;
    for (int k = 0; k < win; ++k) acc += row[k];
    out[0] = acc;
    for (int x = 1; x < out_w; ++x) {
      acc += row[x + win - 1] - row[x - 1];
      out[x] = acc;
    }
  }
}

}  // namespace streetscope::kernels
