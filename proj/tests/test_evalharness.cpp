#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "lingcast/evalharness.hpp"
#include "oracles.hpp"

using namespace lingcast;

TEST_CASE("SplitMix64 reference stream", "[evalharness][rng]") {
  // First outputs for seed 0, as published with the reference implementation.
  SplitMix64 rng(0);
  CHECK(rng.next() == 0xE220A8397B1DCDAFULL);
  CHECK(rng.next() == 0x6E789E6AA1B965F4ULL);
  CHECK(rng.next() == 0x06C45D188009454FULL);
}

TEST_CASE("generate: analytic sinusoid", "[evalharness]") {
  GeneratorSpec spec;
  spec.length = 100;
  spec.period = 25;
  spec.amplitude = 2;
  const TimeSeries s = generate(spec);
  REQUIRE(s.size() == 100);
  CHECK(std::abs(s.at_position(25)) <= 1e-12);
  CHECK(value_range(s.values()) <= 4.0);
  CHECK(value_range(s.values()) >= 3.9);
  // A period divisible by 4 hits the crests exactly.
  spec.period = 20;
  CHECK(value_range(generate(spec).values()) == Catch::Approx(4.0).margin(1e-12));
}

TEST_CASE("generate: linear trend term", "[evalharness]") {
  GeneratorSpec spec;
  spec.kind = GeneratorKind::SinusoidLinearTrend;
  spec.slope = 0.02;
  const TimeSeries s = generate(spec);
  const double seasonal = 2.0 * std::sin(2.0 * std::numbers::pi * 100.0 / 25.0);
  CHECK(s.at_position(100) - seasonal == Catch::Approx(2.0).margin(1e-12));

  spec.kind = GeneratorKind::Sinusoid;  // slope is ignored
  CHECK(std::abs(generate(spec).at_position(100)) <= 1e-12);
}

TEST_CASE("generate: nonlinear trend term", "[evalharness]") {
  GeneratorSpec spec;
  spec.kind = GeneratorKind::SinusoidNonlinearTrend;
  spec.slope = 0.1;
  spec.quadratic = -0.001;
  const TimeSeries s = generate(spec);
  CHECK(s.at_position(50) == Catch::Approx(2.0 * std::sin(4.0 * std::numbers::pi) + 5.0 - 2.5).margin(1e-12));
}

TEST_CASE("generate: bounded zero-mean noise, deterministic", "[evalharness]") {
  GeneratorSpec spec;
  spec.length = 100000;
  spec.noise = 0.15;
  spec.seed = 7;
  const TimeSeries noisy = generate(spec);
  spec.noise = 0.0;
  const TimeSeries clean = generate(spec);
  double sum = 0.0;
  for (std::size_t i = 0; i < noisy.size(); ++i) {
    const double u = noisy[i] - clean[i];
    CHECK(std::abs(u) <= 0.15 + 1e-12);
    sum += u;
  }
  CHECK(std::abs(sum / static_cast<double>(noisy.size())) <= 0.005);

  spec.noise = 0.15;
  CHECK(generate(spec) == noisy);
  spec.seed = 8;
  CHECK_FALSE(generate(spec) == noisy);
}

TEST_CASE("generate: invalid specs", "[evalharness]") {
  GeneratorSpec spec;
  spec.period = 0;
  CHECK_THROWS_AS(generate(spec), Error);
  spec = {};
  spec.amplitude = -1;
  CHECK_THROWS_AS(generate(spec), Error);
  spec = {};
  spec.noise = -0.1;
  CHECK_THROWS_AS(generate(spec), Error);
}

TEST_CASE("compute_metrics: examples", "[evalharness][metrics]") {
  const std::vector<double> actual{1, 2, 4, 3};
  auto m = compute_metrics(actual, actual);
  CHECK(m.mae == 0.0);
  CHECK(m.rmse == 0.0);
  CHECK(*m.mape == 0.0);
  CHECK(*m.correlation == 1.0);

  const std::vector<double> plus_one{2, 3, 5, 4};
  m = compute_metrics(plus_one, actual);
  CHECK(m.mae == 1.0);
  CHECK(m.rmse == 1.0);
  CHECK(*m.correlation == Catch::Approx(1.0).margin(1e-15));
  CHECK(*m.mape == Catch::Approx(100.0 * (1.0 + 0.5 + 0.25 + 1.0 / 3.0) / 4.0).epsilon(1e-14));
}

TEST_CASE("compute_metrics: zero actuals and constant sides", "[evalharness][metrics]") {
  const std::vector<double> actual{0, 2, 0, 4}, fc{1, 1, 1, 1};
  const auto m = compute_metrics(fc, actual);
  CHECK(m.mape_skipped == 2);
  CHECK(*m.mape == Catch::Approx(100.0 * (0.5 + 0.75) / 2.0));
  CHECK_FALSE(m.correlation);
  const std::vector<double> zeros{0, 0};
  CHECK_FALSE(compute_metrics(zeros, zeros).mape);
}

TEST_CASE("compute_metrics: MAE never exceeds RMSE", "[evalharness][metrics][property]") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = oracle::random_series(rng, 1 + trial % 40);
    const auto b = oracle::random_series(rng, a.size());
    const auto m = compute_metrics(a, b);
    CHECK(m.mae <= m.rmse * (1 + 1e-12));
  }
}

TEST_CASE("holdout_backtest: linguistic on a periodic series", "[evalharness][backtest]") {
  GeneratorSpec spec;
  spec.length = 100;
  const TimeSeries s = generate(spec);
  ForecastConfig cfg;
  cfg.horizon = 20;
  cfg.levels = 32;
  const auto r = holdout_backtest(s, cfg);
  CHECK(r.actual.size() == 20);
  CHECK(r.horizon == 20);
  REQUIRE(r.forecast.step);
  CHECK(r.metrics.rmse <= *r.forecast.step / 2 + 1e-9);
  CHECK(r.metrics.rmse <= 0.125);
  CHECK(r.metrics.mae <= r.metrics.rmse);
}

TEST_CASE("holdout_backtest: model only sees the training prefix", "[evalharness][backtest]") {
  GeneratorSpec spec;
  spec.length = 100;
  spec.noise = 0.1;
  spec.seed = 3;
  const TimeSeries s = generate(spec);
  std::vector<double> tampered = s.vector();
  for (std::size_t i = 90; i < 100; ++i) tampered[i] = 1e6;
  ForecastConfig cfg;
  cfg.horizon = 10;
  cfg.multiplier = 1.5;
  const auto a = holdout_backtest(s, cfg);
  const auto b = holdout_backtest(TimeSeries(tampered), cfg);
  CHECK(a.forecast.values == b.forecast.values);
  const auto ha = holdout_backtest(s, HoltConfig{0.3, 0.4}, 10);
  const auto hb = holdout_backtest(TimeSeries(tampered), HoltConfig{0.3, 0.4}, 10);
  CHECK(ha.forecast.values == hb.forecast.values);
  CHECK(ha.method == Method::Holt);
}

TEST_CASE("holdout_backtest: minimum length includes the holdout", "[evalharness][backtest]") {
  GeneratorSpec spec;
  spec.length = 60;
  ForecastConfig cfg;
  cfg.horizon = 20;
  try {
    holdout_backtest(generate(spec), cfg);
    FAIL("expected SeriesTooShort");
  } catch (const SeriesTooShortError& e) {
    CHECK(e.minimum_length() == 61);
  }
  spec.length = 61;
  CHECK_NOTHROW(holdout_backtest(generate(spec), cfg));
  CHECK_THROWS_AS(holdout_backtest(TimeSeries{1, 2, 3}, HoltConfig{}, 2), SeriesTooShortError);
}

TEST_CASE("holdout_backtest: exact repeat bound for zero-noise sinusoids", "[evalharness][backtest][property]") {
  // K a multiple of the period and K >= N + 2P + period.
  for (std::size_t period : {10u, 16u, 25u}) {
    for (std::size_t p : {3u, 8u, 12u}) {
      GeneratorSpec spec;
      spec.period = static_cast<double>(period);
      spec.length = period * ((2 * p + p + period) / period + 1);
      ForecastConfig cfg;
      cfg.horizon = p;
      cfg.multiplier = 1.0;
      cfg.levels = 20;
      const auto r = holdout_backtest(generate(spec), cfg);
      CHECK(r.metrics.rmse <= *r.forecast.step / 2 + 1e-9);
    }
  }
}
