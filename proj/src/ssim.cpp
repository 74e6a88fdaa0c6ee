#include "streetscope/ssim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "streetscope/errors.hpp"
#include "streetscope/kernels/kernels.hpp"
#include "streetscope/timeutil.hpp"

namespace streetscope {

namespace {

void validate_params(const SsimParams& p) {
  if (p.window < 3) throw std::invalid_argument("ssim window must be >= 3");
  if (!(p.k1 > 0.0) || !(p.k2 > 0.0))
    throw std::invalid_argument("ssim k1, k2 must be positive");
  if (!(p.dynamic_range > 0.0))
    throw std::invalid_argument("ssim dynamic range must be positive");
}

// 2D box sums at stride 1: horizontal pass then vertical kernel pass.
std::vector<double> window_sums(const std::vector<double>& plane, int w, int h,
                                int win, int out_w, int out_h) {
  std::vector<double> rows(static_cast<std::size_t>(out_w) * h);
  kernels::box_rows_f64(plane.data(), rows.data(), w, h, win);
  std::vector<double> out(static_cast<std::size_t>(out_w) * out_h);
  // box_cols writes rows at the source stride; use a scratch then compact.
  std::vector<double> cols(static_cast<std::size_t>(out_w) * h);
  kernels::ops().box_cols_f64(rows.data(), cols.data(), out_w, h, win);
  for (int y = 0; y < out_h; ++y)
    std::copy_n(cols.begin() + static_cast<std::size_t>(y) * out_w, out_w,
                out.begin() + static_cast<std::size_t>(y) * out_w);
  return out;
}

}  // namespace

double ssim(const GrayImage& x, const GrayImage& y, const SsimParams& params) {
  validate_params(params);
  if (x.width != y.width || x.height != y.height)
    throw DimensionMismatch("ssim inputs differ in size");
  if (x.width < params.window || x.height < params.window)
    throw DimensionMismatch("image smaller than ssim window");

  const int w = x.width;
  const int h = x.height;
  const int win = params.window;
  const int out_w = w - win + 1;
  const int out_h = h - win + 1;
  const std::size_t pix = x.size();

  std::vector<double> fx(pix), fy(pix), xx(pix), yy(pix), xy(pix);
  kernels::ops().products_u8_f64(x.data.data(), y.data.data(), pix, fx.data(),
                                 fy.data(), xx.data(), yy.data(), xy.data());

  const auto sx = window_sums(fx, w, h, win, out_w, out_h);
  const auto sy = window_sums(fy, w, h, win, out_w, out_h);
  const auto sxx = window_sums(xx, w, h, win, out_w, out_h);
  const auto syy = window_sums(yy, w, h, win, out_w, out_h);
  const auto sxy = window_sums(xy, w, h, win, out_w, out_h);

  const double n = static_cast<double>(win) * win;
  const double c1 = params.c1();
  const double c2 = params.c2();
  double total = 0.0;
  const std::size_t windows = sx.size();
  for (std::size_t i = 0; i < windows; ++i) {
    const double mx = sx[i] / n;
    const double my = sy[i] / n;
    const double varx = (sxx[i] - sx[i] * sx[i] / n) / (n - 1.0);
    const double vary = (syy[i] - sy[i] * sy[i] / n) / (n - 1.0);
    const double cov = (sxy[i] - sx[i] * sy[i] / n) / (n - 1.0);
    const double num = (2.0 * mx * my + c1) * (2.0 * cov + c2);
    const double den = (mx * mx + my * my + c1) * (varx + vary + c2);
    total += num / den;
  }
  return total / static_cast<double>(windows);
}

double pixel_std(const GrayImage& img) {
  std::uint64_t sum = 0, sumsq = 0;
  kernels::ops().sum_sumsq_u8(img.data.data(), img.size(), &sum, &sumsq);
  const double n = static_cast<double>(img.size());
  const double mean = static_cast<double>(sum) / n;
  const double var = static_cast<double>(sumsq) / n - mean * mean;
  return var > 0.0 ? std::sqrt(var) : 0.0;
}

GrayImage build_reference(const std::vector<TimedFrame>& frames,
                          int window_days) {
  if (frames.empty()) throw NoUsableFrames("no frames supplied");
  std::int64_t first = frames.front().unix_seconds;
  for (const auto& f : frames) first = std::min(first, f.unix_seconds);
  const std::int64_t cutoff =
      first + static_cast<std::int64_t>(window_days) * 86400;

  const int w = frames.front().image.width;
  const int h = frames.front().image.height;
  std::vector<std::uint32_t> acc(static_cast<std::size_t>(w) * h, 0);
  std::uint32_t used = 0;
  for (const auto& f : frames) {
    if (f.unix_seconds >= cutoff) continue;
    if (f.image.width != w || f.image.height != h)
      throw DimensionMismatch("reference frames differ in size");
    if (pixel_std(f.image) < 2.0) continue;  // erroneous frame
    kernels::ops().accumulate_u32(f.image.data.data(), acc.data(), acc.size());
    ++used;
  }
  if (used == 0)
    throw NoUsableFrames("no non-erroneous frame in the reference window");

  GrayImage out(w, h);
  for (std::size_t i = 0; i < acc.size(); ++i) {
    const double mean = static_cast<double>(acc[i]) / used;
    out.data[i] = static_cast<std::uint8_t>(
        std::min<long>(255, std::llround(mean)));
  }
  return out;
}

SimilaritySeries similarity_series(const GrayImage& reference,
                                   const std::vector<DailyFrame>& daily_frames,
                                   const SsimParams& params,
                                   const std::string& camera_id) {
  SimilaritySeries s;
  s.camera_id = camera_id;
  for (const auto& f : daily_frames) {
    if (!s.days.empty() && f.day <= s.days.back())
      throw Error("daily frames must have strictly increasing days");
    s.days.push_back(f.day);
    s.values.push_back(ssim(reference, f.image, params));
  }
  return s;
}

void save_series_csv(const SimilaritySeries& s, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << "camera_id,date,ssim\n";
  out.precision(17);
  for (std::size_t i = 0; i < s.days.size(); ++i)
    out << s.camera_id << ',' << format_date(s.days[i]) << ',' << s.values[i]
        << '\n';
}

SimilaritySeries load_series_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("camera_id,date,ssim", 0) != 0)
    throw DecodeError("bad series CSV header in " + path);
  SimilaritySeries s;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string id, date, value;
    if (!std::getline(row, id, ',') || !std::getline(row, date, ',') ||
        !std::getline(row, value))
      throw DecodeError("bad series CSV row: " + line);
    if (s.camera_id.empty()) s.camera_id = id;
    s.days.push_back(parse_date(date));
    s.values.push_back(std::stod(value));
  }
  return s;
}

}  // namespace streetscope
