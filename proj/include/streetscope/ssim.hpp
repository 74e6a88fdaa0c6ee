#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "streetscope/image.hpp"

namespace streetscope {

struct SsimParams {
  int window = 8;    // square side, >= 3 (uniform weighting)
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 255.0;  // L

  double c1() const { return (k1 * dynamic_range) * (k1 * dynamic_range); }
  double c2() const { return (k2 * dynamic_range) * (k2 * dynamic_range); }
};

// Mean over all stride-1 windows of the luminance/contrast/structure ratio;
// window statistics use the unbiased n-1 divisor.
double ssim(const GrayImage& x, const GrayImage& y, const SsimParams& params);

struct TimedFrame {
  std::int64_t unix_seconds = 0;
  GrayImage image;
};

// Pixelwise mean of the non-erroneous frames within window_days of the first
// frame, rounded to nearest. Frames with pixel std < 2.0 are erroneous.
GrayImage build_reference(const std::vector<TimedFrame>& frames,
                          int window_days = 7);

// Daily SSIM-vs-reference series.
struct SimilaritySeries {
  std::string camera_id;
  std::vector<std::int64_t> days;  // days since epoch, strictly increasing
  std::vector<double> values;
};

struct DailyFrame {
  std::int64_t day = 0;  // days since epoch (UTC)
  GrayImage image;
};

SimilaritySeries similarity_series(const GrayImage& reference,
                                   const std::vector<DailyFrame>& daily_frames,
                                   const SsimParams& params,
                                   const std::string& camera_id = {});

// Population std of the raw intensities (erroneous-frame screening).
double pixel_std(const GrayImage& img);

void save_series_csv(const SimilaritySeries& s, const std::string& path);
SimilaritySeries load_series_csv(const std::string& path);

}  // namespace streetscope
