#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lingcast/errors.hpp"
#include "lingcast/matcher.hpp"
#include "lingcast/series.hpp"

namespace lingcast {

enum class TrendMode { None, Linear };

enum class Method { Linguistic, LinguoCorrelation, Holt };

constexpr std::string_view to_string(TrendMode t) noexcept { return t == TrendMode::None ? "none" : "linear"; }

constexpr std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::Linguistic: return "linguistic";
    case Method::LinguoCorrelation: return "linguo-correlation";
    case Method::Holt: return "holt";
  }
  return "unknown";
}

/// N = ceil(M * P). Products within 1e-9 (relative) of an integer are taken
/// as that integer so that e.g. M = 1.1, P = 10 gives 11, not 12.
inline std::size_t derive_window_length(std::size_t horizon, double multiplier) {
  if (horizon < 1) throw Error(ErrorKind::InvalidArgument, "horizon must be at least 1");
  if (!(multiplier > 0.0) || !std::isfinite(multiplier))
    throw Error(ErrorKind::InvalidArgument, "multiplier must be a positive finite number");
  const double product = multiplier * static_cast<double>(horizon);
  const double nearest = std::round(product);
  const double n = std::abs(product - nearest) <= 1e-9 * product ? nearest : std::ceil(product);
  if (n < 2.0)
    throw Error(ErrorKind::WindowTooSmall,
                "window length ceil(M*P) = " + std::to_string(static_cast<long long>(n)) + " is below 2");
  return static_cast<std::size_t>(n);
}

struct MultiplierAdvice {
  bool ok = true;
  double low = 1.0;
  double high = 2.0;
  bool low_inclusive = true;
  std::string message;  ///< empty when ok

  std::string range_text() const {
    std::ostringstream os;
    os << (low_inclusive ? '[' : '(') << low << ", " << high << ']';
    return os.str();
  }
};

/// Recommended multiplier ranges: [1, 2] for P >= 5 and (2, 5] for P < 5.
/// Advisory only; never throws for positive inputs.
inline MultiplierAdvice validate_multiplier(std::size_t horizon, double multiplier) {
  MultiplierAdvice advice;
  if (horizon >= 5) {
    advice.low = 1.0;
    advice.high = 2.0;
    advice.low_inclusive = true;
    advice.ok = multiplier >= 1.0 && multiplier <= 2.0;
  } else {
    advice.low = 2.0;
    advice.high = 5.0;
    advice.low_inclusive = false;
    advice.ok = multiplier > 2.0 && multiplier <= 5.0;
  }
  if (!advice.ok) {
    advice.message = "recommended M in " + advice.range_text() + " for P " + (horizon >= 5 ? ">= 5" : "< 5");
  }
  return advice;
}

struct ForecastConfig {
  std::size_t horizon = 1;  ///< P
  double multiplier = 1.0;  ///< M
  std::size_t levels = 32;  ///< S
  Criterion criterion = Criterion::Difference;
  TrendMode trend = TrendMode::None;
  std::optional<std::size_t> window;  ///< explicit N, overrides the multiplier

  std::size_t window_length() const {
    if (window) {
      if (*window < 2) throw Error(ErrorKind::WindowTooSmall, "window length must be at least 2");
      return *window;
    }
    return derive_window_length(horizon, multiplier);
  }

  /// Multiplier actually in effect, N / P when the window is given directly.
  double effective_multiplier() const {
    return window ? static_cast<double>(*window) / static_cast<double>(horizon) : multiplier;
  }

  void validate() const {
    if (horizon < 1) throw Error(ErrorKind::InvalidArgument, "horizon must be at least 1");
    if (!window && (!(multiplier > 0.0) || !std::isfinite(multiplier)))
      throw Error(ErrorKind::InvalidArgument, "multiplier must be a positive finite number");
    if (levels < 1) throw Error(ErrorKind::InvalidLevels, "number of levels must be at least 1");
    (void)window_length();
  }
};

struct HoltConfig {
  double xi = 0.5;   ///< weight of the previous smoothed value + trend
  double phi = 0.5;  ///< weight of the previous trend

  void validate() const {
    if (!(xi >= 0.0 && xi <= 1.0)) throw Error(ErrorKind::InvalidArgument, "xi must lie in [0, 1]");
    if (!(phi >= 0.0 && phi <= 1.0)) throw Error(ErrorKind::InvalidArgument, "phi must lie in [0, 1]");
  }
};

struct Forecast {
  std::vector<double> values;
  std::optional<std::size_t> matched_start;  ///< 1-based; absent for Holt and constant input
  std::optional<double> score;
  Method method = Method::Linguistic;
  std::variant<ForecastConfig, HoltConfig> config;
  std::optional<double> step;  ///< quantization step when a grid was built
  std::vector<std::string> warnings;
};

namespace detail {

inline std::optional<Forecast> constant_shortcut(const TimeSeries& series, std::size_t horizon, Method method,
                                                 const ForecastConfig& config) {
  if (!series.is_constant()) return std::nullopt;
  Forecast f;
  f.values.assign(horizon, series[0]);
  f.method = method;
  f.config = config;
  f.warnings.push_back("constant series: quantization skipped, forecasting the constant value");
  return f;
}

inline Forecast forecast_by_analogy(const TimeSeries& series, const ForecastConfig& config, bool transfer_trend) {
  config.validate();
  const Method method = transfer_trend ? Method::LinguoCorrelation : Method::Linguistic;
  const std::size_t n = config.window_length();
  const std::size_t p = config.horizon;
  if (auto f = constant_shortcut(series, p, method, config)) return *f;
  check_search_shape(series.size(), n, p);

  const Quantized q = quantize(series, config.levels);
  const std::span<const double> values = q.series.values();
  const WindowMatch match = find_best_match(values, n, p, config.criterion, transfer_trend);

  const std::size_t offset = match.start - 1;
  std::vector<double> out(values.begin() + offset + n, values.begin() + offset + n + p);
  if (transfer_trend) {
    const LinearTrend query_trend = fit_linear_trend(values.subspan(values.size() - n), values.size() - n + 1);
    const LinearTrend candidate_trend = fit_linear_trend(values.subspan(offset, n), match.start);
    for (std::size_t j = 0; j < p; ++j) {
      const double x = static_cast<double>(n + j + 1);
      out[j] = out[j] - candidate_trend.at(x) + query_trend.at(x);
    }
  }

  Forecast f;
  f.values = std::move(out);
  f.matched_start = match.start;
  f.score = match.score;
  f.method = method;
  f.config = config;
  f.step = q.grid.step();
  return f;
}

}  // namespace detail

/// Quantize, find the most similar past window, copy its follower.
inline Forecast forecast_linguistic(const TimeSeries& series, const ForecastConfig& config) {
  if (config.trend != TrendMode::None)
    throw Error(ErrorKind::InvalidArgument, "linguistic forecasting expects trend mode 'none'");
  return detail::forecast_by_analogy(series, config, false);
}

/// Like forecast_linguistic but windows are compared after removing their
/// local linear trends, and the follower is moved from the matched window's
/// trend onto the query window's trend.
inline Forecast forecast_linguo_correlation(const TimeSeries& series, const ForecastConfig& config) {
  if (config.trend != TrendMode::Linear)
    throw Error(ErrorKind::InvalidArgument, "linguo-correlation forecasting expects trend mode 'linear'");
  return detail::forecast_by_analogy(series, config, true);
}

inline Forecast forecast(const TimeSeries& series, const ForecastConfig& config) {
  return config.trend == TrendMode::Linear ? forecast_linguo_correlation(series, config)
                                           : forecast_linguistic(series, config);
}

struct HoltState {
  double level = 0.0;
  double trend = 0.0;
};

// Smoothed value and trend after the last observation. The observation gets
// weight (1 - xi) and the previous estimate xi; likewise (1 - phi) / phi for
// the trend.
inline HoltState holt_smooth(const TimeSeries& series, const HoltConfig& holt) {
  holt.validate();
  if (series.size() < 2) throw SeriesTooShortError(series.size(), 2);
  HoltState s{series[0], series[1] - series[0]};
  for (std::size_t k = 1; k < series.size(); ++k) {
    const double prev_level = s.level;
    s.level = (1.0 - holt.xi) * series[k] + holt.xi * (prev_level + s.trend);
    s.trend = (1.0 - holt.phi) * (s.level - prev_level) + holt.phi * s.trend;
  }
  return s;
}

inline Forecast forecast_holt(const TimeSeries& series, const HoltConfig& holt, std::size_t horizon) {
  if (horizon < 1) throw Error(ErrorKind::InvalidArgument, "horizon must be at least 1");
  const HoltState s = holt_smooth(series, holt);
  Forecast f;
  f.values.resize(horizon);
  for (std::size_t j = 0; j < horizon; ++j) f.values[j] = s.level + static_cast<double>(j + 1) * s.trend;
  f.method = Method::Holt;
  f.config = holt;
  return f;
}

}  // namespace lingcast
