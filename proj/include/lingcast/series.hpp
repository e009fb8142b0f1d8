#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lingcast/errors.hpp"

namespace lingcast {

/// Ordered observations at uniform, implicit time steps. Positions are
/// reported 1-based (x_1 .. x_K); storage is 0-based.
class TimeSeries {
 public:
  explicit TimeSeries(std::vector<double> values) : values_(std::move(values)) { validate(); }

  TimeSeries(std::initializer_list<double> values) : values_(values) { validate(); }

  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  double operator[](std::size_t i) const noexcept { return values_[i]; }

  /// 1-based access, matching the reporting convention.
  double at_position(std::size_t k) const { return values_.at(k - 1); }

  std::span<const double> values() const noexcept { return values_; }
  const std::vector<double>& vector() const noexcept { return values_; }

  std::span<const double> window(std::size_t offset, std::size_t length) const {
    return std::span<const double>(values_).subspan(offset, length);
  }

  /// Leading `count` observations; used to hide holdout data from a model.
  TimeSeries prefix(std::size_t count) const {
    return TimeSeries(std::vector<double>(values_.begin(), values_.begin() + count));
  }

  double min() const { return *std::min_element(values_.begin(), values_.end()); }
  double max() const { return *std::max_element(values_.begin(), values_.end()); }

  bool is_constant() const noexcept {
    return std::adjacent_find(values_.begin(), values_.end(), std::not_equal_to<>()) ==
           values_.end();
  }

  friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

 private:
  void validate() const {
    if (values_.empty()) throw Error(ErrorKind::EmptyInput, "time series must hold at least one value");
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i]))
        throw Error(ErrorKind::InvalidArgument,
                    "non-finite value at position " + std::to_string(i + 1));
    }
  }

  std::vector<double> values_;
};

/// The quantization "vocabulary": S+1 evenly spaced levels spanning [min, max].
class QuantizationGrid {
 public:
  QuantizationGrid(double min, double max, std::size_t levels) : min_(min), max_(max), levels_(levels) {
    if (levels < 1) throw Error(ErrorKind::InvalidLevels, "number of levels must be at least 1");
    if (!(max > min))
      throw Error(ErrorKind::DegenerateRange, "value range is empty (max == min), cannot build a grid");
    step_ = (max - min) / static_cast<double>(levels);
  }

  double min() const noexcept { return min_; }
  double max() const noexcept { return max_; }
  std::size_t levels() const noexcept { return levels_; }
  double step() const noexcept { return step_; }
  std::size_t point_count() const noexcept { return levels_ + 1; }

  /// Grid point i in 0..S; the last point is pinned to max so the range
  /// endpoints are reproduced exactly.
  double point(std::size_t i) const noexcept {
    return i >= levels_ ? max_ : min_ + static_cast<double>(i) * step_;
  }

  /// Index of the nearest grid point; exact midpoints round up.
  std::size_t nearest_index(double value) const noexcept {
    const double scaled = std::floor((value - min_) / step_ + 0.5);
    if (scaled <= 0.0) return 0;
    if (scaled >= static_cast<double>(levels_)) return levels_;
    return static_cast<std::size_t>(scaled);
  }

  double snap(double value) const noexcept { return point(nearest_index(value)); }

 private:
  double min_;
  double max_;
  std::size_t levels_;
  double step_;
};

struct Quantized {
  TimeSeries series;
  QuantizationGrid grid;
};

/// Rounds every value to the nearest of S+1 levels built from the series'
/// own range. Throws DegenerateRange for a constant series.
inline Quantized quantize(const TimeSeries& series, std::size_t levels) {
  if (levels < 1) throw Error(ErrorKind::InvalidLevels, "number of levels must be at least 1");
  QuantizationGrid grid(series.min(), series.max(), levels);
  std::vector<double> out;
  out.reserve(series.size());
  for (double v : series.values()) out.push_back(grid.snap(v));
  return {TimeSeries(std::move(out)), grid};
}

/// y = slope * x + intercept, where x = 1 is the first element of the
/// window the trend was fitted on. `origin` records that window's 1-based
/// start in the enclosing series (informational only).
struct LinearTrend {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t origin = 1;

  double at(double x) const noexcept { return slope * x + intercept; }
};

/// Least-squares line over local positions 1..n.
inline LinearTrend fit_linear_trend(std::span<const double> window, std::size_t origin = 1) {
  const std::size_t n = window.size();
  if (n < 2)
    throw Error(ErrorKind::InsufficientPoints,
                "a linear trend needs at least 2 points, got " + std::to_string(n));
  const double count = static_cast<double>(n);
  const double x_mean = (count + 1.0) / 2.0;
  double y_mean = 0.0;
  for (double y : window) y_mean += y;
  y_mean /= count;

  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = static_cast<double>(i + 1) - x_mean;
    sxy += dx * (window[i] - y_mean);
    sxx += dx * dx;
  }
  const double slope = sxy / sxx;
  return {slope, y_mean - slope * x_mean, origin};
}

/// Subtracts the trend evaluated at the window's own positions 1..n.
inline std::vector<double> detrend(std::span<const double> window, const LinearTrend& trend) {
  std::vector<double> out(window.size());
  for (std::size_t j = 0; j < window.size(); ++j)
    out[j] = window[j] - trend.at(static_cast<double>(j + 1));
  return out;
}

inline std::vector<double> extrapolate_trend(const LinearTrend& trend, std::span<const std::size_t> positions) {
  if (positions.empty()) throw Error(ErrorKind::InvalidArgument, "no positions to evaluate");
  std::vector<double> out;
  out.reserve(positions.size());
  for (std::size_t p : positions) out.push_back(trend.at(static_cast<double>(p)));
  return out;
}

/// Values of the trend at consecutive local positions first..first+count-1.
inline std::vector<double> extrapolate_trend(const LinearTrend& trend, std::size_t first, std::size_t count) {
  std::vector<double> out(count);
  for (std::size_t j = 0; j < count; ++j) out[j] = trend.at(static_cast<double>(first + j));
  return out;
}

namespace detail {

/// Deviations below this fraction of the sequence magnitude count as
/// roundoff, so the sequence is treated as constant.
inline constexpr double kFlatTolerance = 1e-12;

inline double mean(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

inline double max_abs(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

inline bool is_flat(std::span<const double> x, double x_mean, double scale) {
  double dev = 0.0;
  for (double v : x) dev = std::max(dev, std::abs(v - x_mean));
  return dev <= kFlatTolerance * std::max(scale, max_abs(x));
}

}  // namespace detail

/// Sample Pearson correlation, or nullopt when either side has (numerically)
/// zero variance. `scale_a`/`scale_b` give a reference magnitude for the
/// flatness test when the inputs are residuals of larger values.
inline std::optional<double> try_pearson(std::span<const double> a, std::span<const double> b,
                                         double scale_a = 0.0, double scale_b = 0.0) {
  if (a.size() != b.size())
    throw Error(ErrorKind::InvalidArgument, "correlation needs sequences of equal length");
  if (a.size() < 2) throw Error(ErrorKind::InsufficientPoints, "correlation needs at least 2 points");

  const double a_mean = detail::mean(a);
  const double b_mean = detail::mean(b);
  if (detail::is_flat(a, a_mean, scale_a) || detail::is_flat(b, b_mean, scale_b)) return std::nullopt;

  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - a_mean;
    const double db = b[i] - b_mean;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) return std::nullopt;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

inline double pearson(std::span<const double> a, std::span<const double> b) {
  if (auto r = try_pearson(a, b)) return *r;
  throw Error(ErrorKind::UndefinedCorrelation, "a sequence has zero variance");
}

inline double value_range(std::span<const double> x) {
  if (x.empty()) return 0.0;
  auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  return *hi - *lo;
}

}  // namespace lingcast
