// Walking-speed threshold calibration from recorded in-place speed samples.
//
// Quartiles use linear interpolation between order statistics at rank
// p * (n - 1), the same rule as numpy's default and R type 7. The fences
// are Tukey's, at 1.5 IQR.

#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace safewalk {

class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Fences {
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double iqr = 0.0;
  double lower_fence = 0.0;
  double upper_fence = 0.0;
  double cumulative_fraction_at_upper = 0.0;  // share of samples <= upper_fence
};

/// Linear-interpolated quantile of an already sorted range.
inline double sorted_quantile(std::span<const double> sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline Fences boxplot_fences(std::span<const double> samples) {
  if (samples.size() < 4) {
    throw CalibrationError("boxplot needs at least 4 samples, got " + std::to_string(samples.size()));
  }
  for (double v : samples) {
    if (!std::isfinite(v) || v < 0.0) throw CalibrationError("speed samples must be finite and >= 0");
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());

  Fences f;
  f.q1 = sorted_quantile(sorted, 0.25);
  f.median = sorted_quantile(sorted, 0.50);
  f.q3 = sorted_quantile(sorted, 0.75);
  f.iqr = f.q3 - f.q1;
  f.lower_fence = f.q1 - 1.5 * f.iqr;
  f.upper_fence = f.q3 + 1.5 * f.iqr;
  const auto below = std::upper_bound(sorted.begin(), sorted.end(), f.upper_fence) - sorted.begin();
  f.cumulative_fraction_at_upper = static_cast<double>(below) / static_cast<double>(sorted.size());
  return f;
}

/// Rounds a fence up to the next multiple of `step`. Values already on the
/// grid (up to floating-point noise) are kept.
inline double round_up_to_step(double value, double step) {
  if (!(step > 0.0)) throw CalibrationError("rounding step must be positive");
  const double k = std::round(value / step);
  if (std::abs(k * step - value) <= 1e-12 * std::max(1.0, std::abs(value))) return k * step;
  return std::ceil(value / step) * step;
}

inline double calibrate_threshold(std::span<const double> samples, double step = 0.05) {
  return round_up_to_step(boxplot_fences(samples).upper_fence, step);
}

/// One value per line; a non-numeric first line is treated as a header.
/// Only the first comma-separated field of each line is read.
inline std::vector<double> parse_speed_csv(std::istream& in) {
  std::vector<double> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto comma = line.find(','); comma != std::string::npos) line.resize(comma);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    const std::string field = line.substr(first, last - first + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(field, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != field.size()) {
      if (line_no == 1) continue;
      throw CalibrationError("line " + std::to_string(line_no) + ": not a number: " + field);
    }
    out.push_back(v);
  }
  return out;
}

inline nlohmann::json to_json(const Fences& f) {
  return {{"q1", f.q1},
          {"median", f.median},
          {"q3", f.q3},
          {"iqr", f.iqr},
          {"lower_fence", f.lower_fence},
          {"upper_fence", f.upper_fence},
          {"cumulative_fraction_at_upper", f.cumulative_fraction_at_upper}};
}

}  // namespace safewalk
