#include "streetscope/canny.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "streetscope/errors.hpp"
#include "streetscope/kernels/kernels.hpp"

namespace streetscope {

namespace {

std::vector<float> gaussian_taps(double sigma, int& radius) {
  radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<float> taps(2 * radius + 1);
  double sum = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    const double w = std::exp(-0.5 * (k * k) / (sigma * sigma));
    taps[k + radius] = static_cast<float>(w);
    sum += w;
  }
  for (auto& t : taps) t = static_cast<float>(t / sum);
  return taps;
}

void validate(const GrayImage& img, const CannyParams& p) {
  if (img.width < 16 || img.height < 16)
    throw DimensionError("canny input below 16x16");
  if (img.data.size() != static_cast<std::size_t>(img.width) * img.height)
    throw DimensionError("image data length mismatch");
  if (!(p.gaussian_sigma > 0.0))
    throw std::invalid_argument("gaussian_sigma must be positive");
  if (!(p.low_threshold > 0.0) || !(p.low_threshold < p.high_threshold))
    throw std::invalid_argument("need 0 < low_threshold < high_threshold");
  if (p.contrast_factors.empty())
    throw std::invalid_argument("contrast_factors must be non-empty");
  for (const double g : p.contrast_factors)
    if (!(g > 0.0)) throw std::invalid_argument("contrast factors must be > 0");
}

// NMS neighbour offsets per gradient sector.
constexpr int kDx[4] = {1, 1, 0, 1};
constexpr int kDy[4] = {0, 1, 1, -1};

void single_pass(const GrayImage& img, const CannyParams& p, double gain,
                 EdgeMap& out) {
  const auto& k = kernels::ops();
  const int w = img.width;
  const int h = img.height;
  const std::size_t n = img.size();

  std::vector<float> scaled(n), tmp(n), smooth(n);
  k.scale_u8_f32(img.data.data(), scaled.data(), n, static_cast<float>(gain));

  int radius = 0;
  const auto taps = gaussian_taps(p.gaussian_sigma, radius);
  k.conv_rows_f32(scaled.data(), tmp.data(), w, h, taps.data(), radius);
  k.conv_cols_f32(tmp.data(), smooth.data(), w, h, taps.data(), radius);

  std::vector<float> mag(n);
  std::vector<std::uint8_t> sector(n);
  k.gradient4_f32(smooth.data(), w, h, mag.data(), sector.data());

  // Non-maximum suppression, then classify strong/weak.
  // 0 = out, 1 = weak, 2 = strong
  std::vector<std::uint8_t> cls(n, 0);
  const float low = static_cast<float>(p.low_threshold);
  const float high = static_cast<float>(p.high_threshold);
  for (int y = 1; y + 1 < h; ++y) {
    for (int x = 1; x + 1 < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      const float m = mag[i];
      if (m < low) continue;
      const int s = sector[i];
      const float prev = mag[static_cast<std::size_t>(y - kDy[s]) * w + (x - kDx[s])];
      const float next = mag[static_cast<std::size_t>(y + kDy[s]) * w + (x + kDx[s])];
      if (m > prev && m >= next) cls[i] = m >= high ? 2 : 1;
    }
  }

  // Hysteresis: flood from strong through 8-connected weak pixels.
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < n; ++i)
    if (cls[i] == 2 && !out.edge[i]) {
      out.edge[i] = 1;
      stack.push_back(i);
    }
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    const int x = static_cast<int>(i % w);
    const int y = static_cast<int>(i / w);
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const int nx = x + dx;
        const int ny = y + dy;
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        const std::size_t j = static_cast<std::size_t>(ny) * w + nx;
        if (cls[j] != 0 && !out.edge[j]) {
          out.edge[j] = 1;
          stack.push_back(j);
        }
      }
  }
}

}  // namespace

std::size_t EdgeMap::count() const {
  return static_cast<std::size_t>(
      std::count(edge.begin(), edge.end(), std::uint8_t{1}));
}

EdgeMap canny(const GrayImage& img, const CannyParams& params) {
  validate(img, params);
  EdgeMap out(img.width, img.height);
  for (const double gain : params.contrast_factors)
    single_pass(img, params, gain, out);
  return out;
}

std::vector<float> gradient_magnitude(const GrayImage& img, double sigma) {
  const auto& k = kernels::ops();
  const int w = img.width;
  const int h = img.height;
  const std::size_t n = img.size();
  std::vector<float> scaled(n), tmp(n), smooth(n), mag(n);
  std::vector<std::uint8_t> sector(n);
  k.scale_u8_f32(img.data.data(), scaled.data(), n, 1.0f);
  int radius = 0;
  const auto taps = gaussian_taps(sigma, radius);
  k.conv_rows_f32(scaled.data(), tmp.data(), w, h, taps.data(), radius);
  k.conv_cols_f32(tmp.data(), smooth.data(), w, h, taps.data(), radius);
  k.gradient4_f32(smooth.data(), w, h, mag.data(), sector.data());
  return mag;
}

std::pair<double, double> derive_canny_thresholds(const GrayImage& img,
                                                  double sigma) {
  auto mag = gradient_magnitude(img, sigma);
  std::vector<float> nonzero;
  nonzero.reserve(mag.size());
  for (const float m : mag)
    if (m > 0.0f) nonzero.push_back(m);
  if (nonzero.empty()) return {1.0, 2.0};
  const std::size_t idx =
      static_cast<std::size_t>(0.9 * static_cast<double>(nonzero.size() - 1));
  std::nth_element(nonzero.begin(), nonzero.begin() + idx, nonzero.end());
  const double high = std::max(1e-6, static_cast<double>(nonzero[idx]));
  return {0.4 * high, high};
}

}  // namespace streetscope
