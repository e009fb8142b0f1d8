#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "lingcast/errors.hpp"
#include "lingcast/forecaster.hpp"
#include "lingcast/series.hpp"

namespace lingcast {

/// SplitMix64 stepper. State advances by 0x9E3779B97F4A7C15; output mixing
/// uses multipliers 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB with shifts
/// 30, 27, 31. Fully specified so any port reproduces the same stream.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform on [0, 1) from the top 53 bits.
  double next_unit() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

enum class GeneratorKind { Sinusoid, SinusoidLinearTrend, SinusoidNonlinearTrend };

constexpr std::string_view to_string(GeneratorKind k) noexcept {
  switch (k) {
    case GeneratorKind::Sinusoid: return "sinusoid";
    case GeneratorKind::SinusoidLinearTrend: return "sinusoid-linear";
    case GeneratorKind::SinusoidNonlinearTrend: return "sinusoid-nonlinear";
  }
  return "unknown";
}

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::Sinusoid;
  std::size_t length = 100;
  double period = 25.0;
  double amplitude = 2.0;
  double slope = 0.0;      ///< used by the trended kinds
  double quadratic = 0.0;  ///< used by SinusoidNonlinearTrend only
  double phase = 0.0;
  double noise = 0.0;      ///< half-width of the uniform perturbation
  std::uint64_t seed = 0;

  void validate() const {
    if (length < 1) throw Error(ErrorKind::InvalidArgument, "length must be at least 1");
    if (!(period > 0.0)) throw Error(ErrorKind::InvalidArgument, "period must be positive");
    if (!(amplitude > 0.0)) throw Error(ErrorKind::InvalidArgument, "amplitude must be positive");
    if (!(noise >= 0.0)) throw Error(ErrorKind::InvalidArgument, "noise half-width must be non-negative");
  }
};

/// Noise-free value at 1-based position k.
inline double generator_signal(const GeneratorSpec& spec, std::size_t k) {
  const double x = static_cast<double>(k);
  double v = spec.amplitude * std::sin(2.0 * std::numbers::pi * x / spec.period + spec.phase);
  if (spec.kind != GeneratorKind::Sinusoid) v += spec.slope * x;
  if (spec.kind == GeneratorKind::SinusoidNonlinearTrend) v += spec.quadratic * x * x;
  return v;
}

/// x_k = A sin(2 pi k / period + phase) + slope k + quad k^2 + u_k, k = 1..K,
/// with u_k = w (2U - 1) and U drawn from SplitMix64(seed), one draw per k.
inline TimeSeries generate(const GeneratorSpec& spec) {
  spec.validate();
  SplitMix64 rng(spec.seed);
  std::vector<double> values(spec.length);
  for (std::size_t k = 1; k <= spec.length; ++k) {
    const double u = spec.noise * (2.0 * rng.next_unit() - 1.0);
    values[k - 1] = generator_signal(spec, k) + u;
  }
  return TimeSeries(std::move(values));
}

struct ErrorMetrics {
  double mae = 0.0;
  double rmse = 0.0;
  std::optional<double> mape;  ///< percent; absent when every actual is 0
  std::size_t mape_skipped = 0;
  std::optional<double> correlation;  ///< absent when either side is constant
};

inline ErrorMetrics compute_metrics(std::span<const double> forecast, std::span<const double> actual) {
  if (forecast.size() != actual.size() || forecast.empty())
    throw Error(ErrorKind::InvalidArgument, "forecast and actual must be non-empty and of equal length");
  ErrorMetrics m;
  double abs_sum = 0.0;
  double sq_sum = 0.0;
  double pct_sum = 0.0;
  std::size_t pct_count = 0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const double e = forecast[i] - actual[i];
    abs_sum += std::abs(e);
    sq_sum += e * e;
    if (actual[i] == 0.0) {
      ++m.mape_skipped;
    } else {
      pct_sum += std::abs(e) / std::abs(actual[i]);
      ++pct_count;
    }
  }
  const double n = static_cast<double>(actual.size());
  m.mae = abs_sum / n;
  m.rmse = std::sqrt(sq_sum / n);
  if (pct_count > 0) m.mape = 100.0 * pct_sum / static_cast<double>(pct_count);
  if (actual.size() >= 2) m.correlation = try_pearson(forecast, actual);
  return m;
}

struct BacktestReport {
  ErrorMetrics metrics;
  std::size_t horizon = 0;
  Method method = Method::Linguistic;
  std::variant<ForecastConfig, HoltConfig> config;
  Forecast forecast;
  std::vector<double> actual;
};

namespace detail {

inline void check_holdout(const TimeSeries& series, std::size_t horizon) {
  if (horizon < 1) throw Error(ErrorKind::InvalidArgument, "horizon must be at least 1");
  if (series.size() <= horizon) throw SeriesTooShortError(series.size(), horizon + 1);
}

inline BacktestReport finish(Forecast f, const TimeSeries& series, std::size_t horizon) {
  BacktestReport r;
  r.actual.assign(series.values().end() - static_cast<std::ptrdiff_t>(horizon), series.values().end());
  r.metrics = compute_metrics(f.values, r.actual);
  r.horizon = horizon;
  r.method = f.method;
  r.config = f.config;
  r.forecast = std::move(f);
  return r;
}

}  // namespace detail

/// Forecasts the last P values from the first K - P and scores the result.
/// Only the training prefix is passed to the model.
inline BacktestReport holdout_backtest(const TimeSeries& series, const ForecastConfig& config) {
  detail::check_holdout(series, config.horizon);
  const std::size_t train = series.size() - config.horizon;
  try {
    return detail::finish(forecast(series.prefix(train), config), series, config.horizon);
  } catch (const SeriesTooShortError& e) {
    // Report the requirement in terms of the full series, holdout included.
    throw SeriesTooShortError(series.size(), e.minimum_length() + config.horizon);
  }
}

inline BacktestReport holdout_backtest(const TimeSeries& series, const HoltConfig& holt, std::size_t horizon) {
  detail::check_holdout(series, horizon);
  const std::size_t train = series.size() - horizon;
  if (train < 2) throw SeriesTooShortError(series.size(), horizon + 2);
  return detail::finish(forecast_holt(series.prefix(train), holt, horizon), series, horizon);
}

}  // namespace lingcast
