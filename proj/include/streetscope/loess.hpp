#pragma once

#include <vector>

namespace streetscope {

// Local linear regression: for each x_i, the ceil(span * n) nearest points by
// |x - x_i| are fit with tricube weights and evaluated at x_i. Reproduces
// globally linear series exactly.
std::vector<double> loess_smooth(const std::vector<double>& x,
                                 const std::vector<double>& y, double span);

}  // namespace streetscope
