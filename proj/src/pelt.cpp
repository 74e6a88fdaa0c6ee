#include "streetscope/pelt.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "streetscope/errors.hpp"
#include "streetscope/timeutil.hpp"

namespace streetscope {

namespace {

using json = nlohmann::ordered_json;

constexpr std::size_t kMinSegment = 2;

// Prefix sums of the Gram matrix so any segment's kernel mass is O(1).
class GramPrefix {
 public:
  GramPrefix(const std::vector<double>& y, double gamma) : n_(y.size()) {
    prefix_.assign((n_ + 1) * (n_ + 1), 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        const double d = y[i] - y[j];
        const double k = std::exp(-gamma * d * d);
        prefix_[(i + 1) * (n_ + 1) + (j + 1)] =
            k + prefix_[i * (n_ + 1) + (j + 1)] +
            prefix_[(i + 1) * (n_ + 1) + j] - prefix_[i * (n_ + 1) + j];
      }
    }
  }

  // Cost of the half-open segment [a, b).
  double cost(std::size_t a, std::size_t b) const {
    const double len = static_cast<double>(b - a);
    const double mass = prefix_[b * (n_ + 1) + b] - prefix_[a * (n_ + 1) + b] -
                        prefix_[b * (n_ + 1) + a] + prefix_[a * (n_ + 1) + a];
    return len - mass / len;
  }

 private:
  std::size_t n_;
  std::vector<double> prefix_;
};

}  // namespace

double rbf_segment_cost(const std::vector<double>& values, std::size_t a,
                        std::size_t b, double gamma) {
  const double len = static_cast<double>(b - a);
  double mass = 0;
  for (std::size_t i = a; i < b; ++i)
    for (std::size_t j = a; j < b; ++j) {
      const double d = values[i] - values[j];
      mass += std::exp(-gamma * d * d);
    }
  return len - mass / len;
}

double rbf_gamma_median(const std::vector<double>& values) {
  std::vector<double> sq;
  sq.reserve(values.size() * (values.size() - 1) / 2);
  for (std::size_t i = 0; i < values.size(); ++i)
    for (std::size_t j = i + 1; j < values.size(); ++j) {
      const double d = values[i] - values[j];
      sq.push_back(d * d);
    }
  if (sq.empty()) return 1.0;
  const std::size_t mid = sq.size() / 2;
  std::nth_element(sq.begin(), sq.begin() + mid, sq.end());
  double median = sq[mid];
  if (sq.size() % 2 == 0) {
    const double lower = *std::max_element(sq.begin(), sq.begin() + mid);
    median = 0.5 * (median + lower);
  }
  return median > 0.0 ? 1.0 / median : 1.0;
}

PeltResult pelt_breakpoints(const std::vector<double>& values, double penalty,
                            std::optional<double> gamma) {
  const std::size_t n = values.size();
  if (n < 2 * kMinSegment)
    throw SeriesTooShort("series length " + std::to_string(n) +
                         " below 2 * min_segment");
  if (!(penalty > 0.0)) throw Error("pelt penalty must be positive");

  const double g = gamma ? *gamma : rbf_gamma_median(values);
  const GramPrefix gram(values, g);

  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> best(n + 1, inf);
  std::vector<std::size_t> prev(n + 1, 0);
  best[0] = -penalty;

  // Candidate predecessors; pruning removals take effect kMinSegment steps
  // later, because a candidate pruned at t can still be the only admissible
  // predecessor for t' < t + min_segment.
  std::vector<std::size_t> candidates{0};
  std::vector<std::vector<std::size_t>> scheduled(n + kMinSegment + 1);

  for (std::size_t t = kMinSegment; t <= n; ++t) {
    if (t >= 2 * kMinSegment) {
      // s = t - kMinSegment becomes reachable as a segment start.
      candidates.push_back(t - kMinSegment);
    }
    if (!scheduled[t].empty()) {
      for (const std::size_t s : scheduled[t])
        candidates.erase(std::remove(candidates.begin(), candidates.end(), s),
                         candidates.end());
    }

    double b = inf;
    std::size_t arg = 0;
    for (const std::size_t s : candidates) {
      if (t - s < kMinSegment) continue;
      const double v = best[s] + gram.cost(s, t) + penalty;
      if (v < b) {
        b = v;
        arg = s;
      }
    }
    best[t] = b;
    prev[t] = arg;

    auto& later = scheduled[std::min(t + kMinSegment, n + kMinSegment)];
    for (const std::size_t s : candidates) {
      if (t - s < kMinSegment) continue;
      if (best[s] + gram.cost(s, t) > best[t]) later.push_back(s);
    }
  }

  PeltResult result;
  result.objective = best[n];
  std::size_t t = n;
  while (t > 0) {
    const std::size_t s = prev[t];
    if (s > 0) result.breakpoints.push_back(s);
    t = s;
  }
  std::reverse(result.breakpoints.begin(), result.breakpoints.end());
  return result;
}

std::vector<ChangePoint> pelt(const SimilaritySeries& series, double penalty,
                              std::optional<double> gamma) {
  const PeltResult res = pelt_breakpoints(series.values, penalty, gamma);
  std::vector<ChangePoint> cps;
  cps.reserve(res.breakpoints.size());
  for (const std::size_t b : res.breakpoints)
    cps.push_back(ChangePoint{b, series.days[b]});
  return cps;
}

StabilityStatus classify_stability(const SimilaritySeries& series,
                                   const std::vector<ChangePoint>& change_points,
                                   const StabilityConfig& config) {
  StabilityStatus st;
  st.camera_id = series.camera_id;
  st.change_points = change_points;

  if (series.values.size() >= 3) {
    std::vector<double> diff;
    diff.reserve(series.values.size() - 1);
    for (std::size_t i = 1; i < series.values.size(); ++i)
      diff.push_back(series.values[i] - series.values[i - 1]);
    double mean = 0;
    for (const double d : diff) mean += d;
    mean /= static_cast<double>(diff.size());
    double ss = 0;
    for (const double d : diff) ss += (d - mean) * (d - mean);
    st.variability = std::sqrt(ss / static_cast<double>(diff.size() - 1));
  }

  if (static_cast<int>(change_points.size()) >= config.max_cp ||
      st.variability > config.max_std)
    st.state = StabilityState::excluded;
  else if (change_points.size() == 1)
    st.state = StabilityState::drifting;
  else
    st.state = StabilityState::stable;

  if (!change_points.empty())
    st.unstable_from_day = change_points.front().day;
  return st;
}

const char* to_string(StabilityState s) {
  switch (s) {
    case StabilityState::stable: return "stable";
    case StabilityState::drifting: return "drifting";
    case StabilityState::excluded: return "excluded";
  }
  return "stable";
}

StabilityState stability_state_from_string(const std::string& s) {
  if (s == "drifting") return StabilityState::drifting;
  if (s == "excluded") return StabilityState::excluded;
  if (s == "stable") return StabilityState::stable;
  throw DecodeError("unknown stability state: " + s);
}

void save_stability_json(const StabilityStatus& st, const std::string& path) {
  json j;
  j["camera_id"] = st.camera_id;
  j["state"] = to_string(st.state);
  j["variability"] = st.variability;
  json cps = json::array();
  for (const auto& cp : st.change_points) {
    json c;
    c["index"] = cp.index;
    c["date"] = format_date(cp.day);
    cps.push_back(c);
  }
  j["change_points"] = cps;
  if (st.unstable_from_day)
    j["unstable_from"] = format_date(*st.unstable_from_day);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << '\n';
}

StabilityStatus load_stability_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DecodeError("bad stability JSON in " + path + ": " + e.what());
  }
  try {
    StabilityStatus st;
    st.camera_id = j.at("camera_id").get<std::string>();
    st.state = stability_state_from_string(j.at("state").get<std::string>());
    st.variability = j.at("variability").get<double>();
    for (const auto& c : j.at("change_points"))
      st.change_points.push_back(ChangePoint{
          c.at("index").get<std::size_t>(), parse_date(c.at("date").get<std::string>())});
    if (j.contains("unstable_from"))
      st.unstable_from_day = parse_date(j.at("unstable_from").get<std::string>());
    return st;
  } catch (const json::exception& e) {
    throw DecodeError("stability JSON missing fields: " + std::string(e.what()));
  }
}

}  // namespace streetscope
