#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "streetscope/ssim.hpp"

namespace streetscope {

struct ChangePoint {
  std::size_t index = 0;   // elements before the break; 0 < index < n
  std::int64_t day = 0;    // series timestamp at `index`
};

struct PeltResult {
  std::vector<std::size_t> breakpoints;  // strictly increasing, excludes n
  double objective = 0;  // sum of segment costs + penalty * (#segments - 1)
};

// Gaussian-kernel segment heterogeneity of values[a, b):
//   C = len - (1/len) * sum_ij exp(-gamma (y_i - y_j)^2)
double rbf_segment_cost(const std::vector<double>& values, std::size_t a,
                        std::size_t b, double gamma);

// Median-of-pairwise-squared-distances bandwidth heuristic; 1.0 when the
// median is zero.
double rbf_gamma_median(const std::vector<double>& values);

// Exact penalized segmentation under the RBF kernel cost, PELT pruning with
// K = 0. gamma = nullopt selects the median heuristic. min_segment = 2.
PeltResult pelt_breakpoints(const std::vector<double>& values, double penalty,
                            std::optional<double> gamma);

std::vector<ChangePoint> pelt(const SimilaritySeries& series, double penalty,
                              std::optional<double> gamma = std::nullopt);

enum class StabilityState { stable, drifting, excluded };

struct StabilityConfig {
  int max_cp = 3;        // change points per review window before exclusion
  double max_std = 0.05;  // std of first differences before exclusion
};

struct StabilityStatus {
  std::string camera_id;
  StabilityState state = StabilityState::stable;
  std::vector<ChangePoint> change_points;
  double variability = 0;  // std of the series first differences
  // Clips timestamped on/after this day are rejected until a manual
  // re-reference; set from the first change point.
  std::optional<std::int64_t> unstable_from_day;
};

StabilityStatus classify_stability(const SimilaritySeries& series,
                                   const std::vector<ChangePoint>& change_points,
                                   const StabilityConfig& config);

const char* to_string(StabilityState s);
StabilityState stability_state_from_string(const std::string& s);

void save_stability_json(const StabilityStatus& st, const std::string& path);
StabilityStatus load_stability_json(const std::string& path);

}  // namespace streetscope
