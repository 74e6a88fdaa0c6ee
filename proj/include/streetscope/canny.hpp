#pragma once

#include <utility>
#include <vector>

#include "streetscope/image.hpp"

namespace streetscope {

struct CannyParams {
  double gaussian_sigma = 1.4;
  double low_threshold = 20.0;
  double high_threshold = 60.0;
  std::vector<double> contrast_factors = {1.0};
};

struct EdgeMap {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> edge;  // 0/1 per pixel

  EdgeMap() = default;
  EdgeMap(int w, int h)
      : width(w), height(h), edge(static_cast<std::size_t>(w) * h, 0) {}
  bool at(int x, int y) const {
    return edge[static_cast<std::size_t>(y) * width + x] != 0;
  }
  std::size_t count() const;
};

// Canny stages: Gaussian smoothing, four-filter gradients, non-maximum
// suppression along the gradient sector, double threshold, hysteresis with
// 8-connectivity. The whole chain runs once per contrast factor (multiplied
// in float, no clipping) and the per-factor maps are OR-ed.
EdgeMap canny(const GrayImage& img, const CannyParams& params);

// Smoothed gradient magnitudes of the unscaled image (contrast factor 1);
// exposed so threshold derivation and tests share the exact gradient path.
std::vector<float> gradient_magnitude(const GrayImage& img, double sigma);

// (low, high) from the nonzero gradient-magnitude distribution:
// high = 90th percentile, low = 0.4 * high.
std::pair<double, double> derive_canny_thresholds(const GrayImage& img,
                                                  double sigma);

}  // namespace streetscope
