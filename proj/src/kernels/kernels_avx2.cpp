#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "streetscope/kernels/kernels.hpp"

namespace streetscope::kernels {

namespace {

inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

void conv_rows_f32_avx2(const float* src, float* dst, int width, int height,
                        const float* taps, int radius) {
  const int n = 2 * radius + 1;
  const int vec_begin = radius;
  const int vec_end = width - radius - 7;  // last valid 8-wide base + 1
  for (int y = 0; y < height; ++y) {
    const float* row = src + static_cast<std::size_t>(y) * width;
    float* out = dst + static_cast<std::size_t>(y) * width;
    int x = 0;
    for (; x < std::min(vec_begin, width); ++x) {
      float acc = 0.0f;
      for (int k = 0; k < n; ++k)
        acc += taps[k] * row[clampi(x + k - radius, 0, width - 1)];
      out[x] = acc;
    }
    for (; x < vec_end; x += 8) {
      __m256 acc = _mm256_setzero_ps();
      for (int k = 0; k < n; ++k) {
        const __m256 t = _mm256_set1_ps(taps[k]);
        const __m256 v = _mm256_loadu_ps(row + x + k - radius);
        acc = _mm256_add_ps(acc, _mm256_mul_ps(t, v));
      }
      _mm256_storeu_ps(out + x, acc);
    }
    for (; x < width; ++x) {
      float acc = 0.0f;
      for (int k = 0; k < n; ++k)
        acc += taps[k] * row[clampi(x + k - radius, 0, width - 1)];
      out[x] = acc;
    }
  }
}

void conv_cols_f32_avx2(const float* src, float* dst, int width, int height,
                        const float* taps, int radius) {
  const int n = 2 * radius + 1;
  for (int y = 0; y < height; ++y) {
    float* out = dst + static_cast<std::size_t>(y) * width;
    int x = 0;
    for (; x + 8 <= width; x += 8) {
      __m256 acc = _mm256_setzero_ps();
      for (int k = 0; k < n; ++k) {
        const int yy = clampi(y + k - radius, 0, height - 1);
        const __m256 t = _mm256_set1_ps(taps[k]);
        const __m256 v =
            _mm256_loadu_ps(src + static_cast<std::size_t>(yy) * width + x);
        acc = _mm256_add_ps(acc, _mm256_mul_ps(t, v));
      }
      _mm256_storeu_ps(out + x, acc);
    }
    for (; x < width; ++x) {
      float acc = 0.0f;
      for (int k = 0; k < n; ++k) {
        const int yy = clampi(y + k - radius, 0, height - 1);
        acc += taps[k] * src[static_cast<std::size_t>(yy) * width + x];
      }
      out[x] = acc;
    }
  }
}

void scale_u8_f32_avx2(const std::uint8_t* src, float* dst, std::size_t n,
                       float gain) {
  const __m256 g = _mm256_set1_ps(gain);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m128i bytes = _mm_loadl_epi64(
        reinterpret_cast<const __m128i*>(src + i));
    const __m256i v32 = _mm256_cvtepu8_epi32(bytes);
    const __m256 f = _mm256_cvtepi32_ps(v32);
    _mm256_storeu_ps(dst + i, _mm256_mul_ps(g, f));
  }
  for (; i < n; ++i) dst[i] = gain * static_cast<float>(src[i]);
}

void gradient4_f32_avx2(const float* src, int width, int height, float* mag,
                        std::uint8_t* sector) {
  std::fill(mag, mag + static_cast<std::size_t>(width) * height, 0.0f);
  std::fill(sector, sector + static_cast<std::size_t>(width) * height,
            std::uint8_t{0});
  const __m256 two = _mm256_set1_ps(2.0f);
  const __m256 absmask = _mm256_castsi256_ps(_mm256_set1_epi32(0x7fffffff));
  alignas(32) std::int32_t best_buf[8];
  for (int y = 1; y + 1 < height; ++y) {
    const float* r0 = src + static_cast<std::size_t>(y - 1) * width;
    const float* r1 = src + static_cast<std::size_t>(y) * width;
    const float* r2 = src + static_cast<std::size_t>(y + 1) * width;
    float* m = mag + static_cast<std::size_t>(y) * width;
    std::uint8_t* s = sector + static_cast<std::size_t>(y) * width;
    int x = 1;
    for (; x + 8 <= width - 1; x += 8) {
      const __m256 r0l = _mm256_loadu_ps(r0 + x - 1);
      const __m256 r0c = _mm256_loadu_ps(r0 + x);
      const __m256 r0r = _mm256_loadu_ps(r0 + x + 1);
      const __m256 r1l = _mm256_loadu_ps(r1 + x - 1);
      const __m256 r1r = _mm256_loadu_ps(r1 + x + 1);
      const __m256 r2l = _mm256_loadu_ps(r2 + x - 1);
      const __m256 r2c = _mm256_loadu_ps(r2 + x);
      const __m256 r2r = _mm256_loadu_ps(r2 + x + 1);

      const __m256 gx = _mm256_sub_ps(
          _mm256_add_ps(_mm256_add_ps(r0r, _mm256_mul_ps(two, r1r)), r2r),
          _mm256_add_ps(_mm256_add_ps(r0l, _mm256_mul_ps(two, r1l)), r2l));
      const __m256 gy = _mm256_sub_ps(
          _mm256_add_ps(_mm256_add_ps(r2l, _mm256_mul_ps(two, r2c)), r2r),
          _mm256_add_ps(_mm256_add_ps(r0l, _mm256_mul_ps(two, r0c)), r0r));
      const __m256 g45 = _mm256_sub_ps(
          _mm256_add_ps(_mm256_add_ps(r0c, _mm256_mul_ps(two, r0r)), r1r),
          _mm256_add_ps(_mm256_add_ps(r1l, _mm256_mul_ps(two, r2l)), r2c));
      const __m256 g135 = _mm256_sub_ps(
          _mm256_add_ps(_mm256_add_ps(r1r, _mm256_mul_ps(two, r2r)), r2c),
          _mm256_add_ps(_mm256_add_ps(r0c, _mm256_mul_ps(two, r0l)), r1l));

      const __m256 magv = _mm256_sqrt_ps(
          _mm256_add_ps(_mm256_mul_ps(gx, gx), _mm256_mul_ps(gy, gy)));
      _mm256_storeu_ps(m + x, magv);

      const __m256 ax = _mm256_and_ps(gx, absmask);
      const __m256 a135 = _mm256_and_ps(g135, absmask);
      const __m256 ay = _mm256_and_ps(gy, absmask);
      const __m256 a45 = _mm256_and_ps(g45, absmask);

      __m256 bv = ax;
      __m256i best = _mm256_setzero_si256();
      __m256 gt = _mm256_cmp_ps(a135, bv, _CMP_GT_OQ);
      bv = _mm256_blendv_ps(bv, a135, gt);
      best = _mm256_blendv_epi8(best, _mm256_set1_epi32(1),
                                _mm256_castps_si256(gt));
      gt = _mm256_cmp_ps(ay, bv, _CMP_GT_OQ);
      bv = _mm256_blendv_ps(bv, ay, gt);
      best = _mm256_blendv_epi8(best, _mm256_set1_epi32(2),
                                _mm256_castps_si256(gt));
      gt = _mm256_cmp_ps(a45, bv, _CMP_GT_OQ);
      best = _mm256_blendv_epi8(best, _mm256_set1_epi32(3),
                                _mm256_castps_si256(gt));

      _mm256_store_si256(reinterpret_cast<__m256i*>(best_buf), best);
      for (int j = 0; j < 8; ++j)
        s[x + j] = static_cast<std::uint8_t>(best_buf[j]);
    }
    for (; x + 1 < width; ++x) {
      const float gx = ((r0[x + 1] + 2.0f * r1[x + 1]) + r2[x + 1]) -
                       ((r0[x - 1] + 2.0f * r1[x - 1]) + r2[x - 1]);
      const float gy = ((r2[x - 1] + 2.0f * r2[x]) + r2[x + 1]) -
                       ((r0[x - 1] + 2.0f * r0[x]) + r0[x + 1]);
      const float g45 = ((r0[x] + 2.0f * r0[x + 1]) + r1[x + 1]) -
                        ((r1[x - 1] + 2.0f * r2[x - 1]) + r2[x]);
      const float g135 = ((r1[x + 1] + 2.0f * r2[x + 1]) + r2[x]) -
                         ((r0[x] + 2.0f * r0[x - 1]) + r1[x - 1]);
      m[x] = std::sqrt(gx * gx + gy * gy);
      const float axv = std::fabs(gx);
      const float a135v = std::fabs(g135);
      const float ayv = std::fabs(gy);
      const float a45v = std::fabs(g45);
      std::uint8_t best = 0;
      float bv = axv;
      if (a135v > bv) { bv = a135v; best = 1; }
      if (ayv > bv) { bv = ayv; best = 2; }
      if (a45v > bv) { best = 3; }
      s[x] = best;
    }
  }
}

void products_u8_f64_avx2(const std::uint8_t* x, const std::uint8_t* y,
                          std::size_t n, double* fx, double* fy, double* xx,
                          double* yy, double* xy) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256i xv =
        _mm256_cvtepu8_epi32(_mm_loadl_epi64(reinterpret_cast<const __m128i*>(x + i)));
    const __m256i yv =
        _mm256_cvtepu8_epi32(_mm_loadl_epi64(reinterpret_cast<const __m128i*>(y + i)));
    const __m256d xlo = _mm256_cvtepi32_pd(_mm256_castsi256_si128(xv));
    const __m256d xhi = _mm256_cvtepi32_pd(_mm256_extracti128_si256(xv, 1));
    const __m256d ylo = _mm256_cvtepi32_pd(_mm256_castsi256_si128(yv));
    const __m256d yhi = _mm256_cvtepi32_pd(_mm256_extracti128_si256(yv, 1));
    _mm256_storeu_pd(fx + i, xlo);
    _mm256_storeu_pd(fx + i + 4, xhi);
    _mm256_storeu_pd(fy + i, ylo);
    _mm256_storeu_pd(fy + i + 4, yhi);
    _mm256_storeu_pd(xx + i, _mm256_mul_pd(xlo, xlo));
    _mm256_storeu_pd(xx + i + 4, _mm256_mul_pd(xhi, xhi));
    _mm256_storeu_pd(yy + i, _mm256_mul_pd(ylo, ylo));
    _mm256_storeu_pd(yy + i + 4, _mm256_mul_pd(yhi, yhi));
    _mm256_storeu_pd(xy + i, _mm256_mul_pd(xlo, ylo));
    _mm256_storeu_pd(xy + i + 4, _mm256_mul_pd(xhi, yhi));
  }
  for (; i < n; ++i) {
    const double a = static_cast<double>(x[i]);
    const double b = static_cast<double>(y[i]);
    fx[i] = a;
    fy[i] = b;
    xx[i] = a * a;
    yy[i] = b * b;
    xy[i] = a * b;
  }
}

void box_cols_f64_avx2(const double* src, double* dst, int width, int height,
                       int win) {
  const int out_h = height - win + 1;
  int x = 0;
  for (; x + 4 <= width; x += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (int k = 0; k < win; ++k)
      acc = _mm256_add_pd(acc,
                          _mm256_loadu_pd(src + static_cast<std::size_t>(k) * width + x));
    _mm256_storeu_pd(dst + x, acc);
    for (int y = 1; y < out_h; ++y) {
      acc = _mm256_sub_pd(
          _mm256_add_pd(acc, _mm256_loadu_pd(src + static_cast<std::size_t>(y + win - 1) * width + x)),
          _mm256_loadu_pd(src + static_cast<std::size_t>(y - 1) * width + x));
      _mm256_storeu_pd(dst + static_cast<std::size_t>(y) * width + x, acc);
    }
  }
  for (; x < width; ++x) {
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

void accumulate_u32_avx2(const std::uint8_t* src, std::uint32_t* acc,
                         std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256i v =
        _mm256_cvtepu8_epi32(_mm_loadl_epi64(reinterpret_cast<const __m128i*>(src + i)));
    const __m256i a =
        _mm256_loadu_si256(reinterpret_cast<const __m256i*>(acc + i));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(acc + i),
                        _mm256_add_epi32(a, v));
  }
  for (; i < n; ++i) acc[i] += src[i];
}

void sum_sumsq_u8_avx2(const std::uint8_t* src, std::size_t n,
                       std::uint64_t* sum, std::uint64_t* sumsq) {
  std::uint64_t s = 0, s2 = 0;
  std::size_t i = 0;
  // Per-lane 32-bit accumulators overflow after ~65k additions of 255^2;
  // fold into 64-bit totals per block.
  const std::size_t block_pixels = 65536ull * 8ull;
  while (i + 8 <= n) {
    const std::size_t stop = std::min(n - (n - i) % 8, i + block_pixels);
    __m256i acc = _mm256_setzero_si256();
    __m256i accsq = _mm256_setzero_si256();
    for (; i + 8 <= stop; i += 8) {
      const __m256i v =
          _mm256_cvtepu8_epi32(_mm_loadl_epi64(reinterpret_cast<const __m128i*>(src + i)));
      acc = _mm256_add_epi32(acc, v);
      accsq = _mm256_add_epi32(accsq, _mm256_mullo_epi32(v, v));
    }
    alignas(32) std::uint32_t lanes[8];
    _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
    for (const std::uint32_t lane : lanes) s += lane;
    _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), accsq);
    for (const std::uint32_t lane : lanes) s2 += lane;
  }
  for (; i < n; ++i) {
    const std::uint64_t v = src[i];
    s += v;
    s2 += v * v;
  }
  *sum = s;
  *sumsq = s2;
}

}  // namespace

const Ops* avx2_ops() {
  static const Ops table = {
      "avx2",
      conv_rows_f32_avx2,
      conv_cols_f32_avx2,
      scale_u8_f32_avx2,
      gradient4_f32_avx2,
      products_u8_f64_avx2,
      box_cols_f64_avx2,
      accumulate_u32_avx2,
      sum_sumsq_u8_avx2,
  };
  return &table;
}

}  // namespace streetscope::kernels

#else

#include "streetscope/kernels/kernels.hpp"

namespace streetscope::kernels {
const Ops* avx2_ops() { return nullptr; }
}  // namespace streetscope::kernels

#endif
