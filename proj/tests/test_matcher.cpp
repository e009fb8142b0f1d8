#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "lingcast/matcher.hpp"
#include "oracles.hpp"

using namespace lingcast;

TEST_CASE("enumerate_candidates: admissible range", "[matcher]") {
  const auto starts = enumerate_candidates(100, 20, 20);
  REQUIRE(starts.size() == 61);
  CHECK(starts.front() == 1);
  CHECK(starts.back() == 61);
  // K = N + P + 1 is the shortest admissible series.
  CHECK(enumerate_candidates(41, 20, 20) == std::vector<std::size_t>{1, 2});
  try {
    enumerate_candidates(40, 20, 20);
    FAIL("expected SeriesTooShort");
  } catch (const SeriesTooShortError& e) {
    CHECK(e.kind() == ErrorKind::SeriesTooShort);
    CHECK(e.minimum_length() == 41);
  }
}

TEST_CASE("score_window: examples", "[matcher]") {
  const std::vector<double> q{1, 2, 3}, c{1, 2, 4};
  CHECK(*score_window(q, q, Criterion::Difference, false) == 0.0);
  CHECK(*score_window(q, q, Criterion::Difference, true) == 0.0);
  CHECK(*score_window(q, c, Criterion::Difference, false) == 1.0);

  const std::vector<double> a{0, 1, 0, -1}, shifted{5, 6, 5, 4};
  CHECK(*score_window(a, shifted, Criterion::Correlation, false) == Catch::Approx(1.0).margin(1e-12));
  CHECK(std::abs(*score_window(a, shifted, Criterion::Correlation, false) -
                 static_cast<double>(*oracle::correlation(a, shifted))) <= 1e-12);
  CHECK(*score_window(a, a, Criterion::Correlation, false) == 1.0);
}

TEST_CASE("score_window: detrending removes a common line", "[matcher]") {
  const std::vector<double> q{0, 1, 0, -1, 0}, c{10, 12, 12, 12, 14};  // c = q + 2x + 8
  CHECK(*score_window(q, c, Criterion::Difference, true) == Catch::Approx(0.0).margin(1e-12));
  CHECK(*score_window(q, c, Criterion::Correlation, true) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("score_window: zero-variance windows have no correlation", "[matcher]") {
  const std::vector<double> q{1, 2, 3, 4}, flat{2, 2, 2, 2}, line{0.3, 0.6, 0.9, 1.2};
  CHECK_FALSE(score_window(q, flat, Criterion::Correlation, false).has_value());
  // A line is flat once detrended, even with roundoff in the residuals.
  CHECK_FALSE(score_window(q, line, Criterion::Correlation, true).has_value());
  CHECK(score_window(q, line, Criterion::Difference, true).has_value());
  CHECK_THROWS_AS(score_window(q, std::vector<double>{1, 2}, Criterion::Difference, false), Error);
}

TEST_CASE("find_best_match: sinusoid repeats one period back", "[matcher]") {
  std::vector<double> s(100);
  for (std::size_t k = 1; k <= 100; ++k) s[k - 1] = 2.0 * std::sin(2.0 * std::numbers::pi * k / 25.0);
  const TimeSeries q = quantize(TimeSeries(s), 32).series;
  const auto m = find_best_match(q, 20, 20, Criterion::Difference, false);
  // Starts 6, 31 and 56 all score 0; the most recent wins.
  CHECK(m.start == 56);
  CHECK(m.score == 0.0);
  const auto ref = oracle::best_match(q.vector(), 20, 20, false, false);
  CHECK(ref->start == 56);
}

TEST_CASE("find_best_match: constructed unique match", "[matcher]") {
  std::vector<double> s(40);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = static_cast<double>(i * i % 17) + 0.1 * static_cast<double>(i);
  for (std::size_t j = 0; j < 5; ++j) s[9 + j] = s[35 + j];  // positions 10..14 repeat positions 36..40
  const auto m = find_best_match(s, 5, 1, Criterion::Difference, false);
  CHECK(m.start == 10);
  CHECK(m.score == 0.0);
}

TEST_CASE("find_best_match: ties go to the most recent start", "[matcher]") {
  std::vector<double> s(50);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = static_cast<double>((i * 7) % 11);
  const std::vector<double> tail{100, 101, 99, 102, 98};
  for (std::size_t j = 0; j < 5; ++j) {
    s[45 + j] = tail[j];
    s[9 + j] = tail[j];   // start 10
    s[29 + j] = tail[j];  // start 30
  }
  const auto m = find_best_match(s, 5, 3, Criterion::Difference, false);
  CHECK(m.start == 30);
  CHECK(m.score == 0.0);
}

TEST_CASE("find_best_match: all candidates flat under correlation", "[matcher]") {
  const std::vector<double> s(30, 4.0);
  try {
    find_best_match(s, 5, 2, Criterion::Correlation, false);
    FAIL("expected NoValidCandidate");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoValidCandidate);
  }
}

TEST_CASE("find_best_match: two-point windows are flat once detrended", "[matcher]") {
  std::mt19937_64 rng(1);
  const auto s = oracle::random_series(rng, 30);
  try {
    find_best_match(s, 2, 3, Criterion::Correlation, true);
    FAIL("expected NoValidCandidate");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoValidCandidate);
  }
  CHECK(find_best_match(s, 2, 3, Criterion::Difference, true).score <= 1e-12);
}

TEST_CASE("find_best_match agrees with exhaustive re-scoring", "[matcher][property]") {
  std::mt19937_64 rng(31337);
  std::uniform_int_distribution<std::size_t> len(12, 200);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t k = len(rng);
    const auto s = oracle::random_series(rng, k);
    // N >= 4: shorter windows make every correlation exactly +-1, so the
    // argmax would be decided by roundoff alone.
    std::uniform_int_distribution<std::size_t> pick_n(4, std::max<std::size_t>(4, k / 3));
    const std::size_t n = pick_n(rng);
    std::uniform_int_distribution<std::size_t> pick_p(1, k - n - 1);
    const std::size_t p = std::min<std::size_t>(pick_p(rng), 25);
    for (bool corr : {false, true}) {
      for (bool detrend_mode : {false, true}) {
        const Criterion c = corr ? Criterion::Correlation : Criterion::Difference;
        const auto m = find_best_match(s, n, p, c, detrend_mode);
        const auto ref = oracle::best_match(s, n, p, corr, detrend_mode);
        REQUIRE(ref);
        CHECK(m.start == ref->start);
        CHECK(std::abs(m.score - static_cast<double>(ref->score)) <= 1e-9 * (1 + std::abs(m.score)));
        CHECK(m.start >= 1);
        CHECK(m.start <= k - n - p + 1);
      }
    }
  }
}

TEST_CASE("find_best_match_parallel is bit-identical to the serial scan", "[matcher][property]") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    auto s = oracle::random_series(rng, 180);
    // Plant exact ties so the reduction's tie-break is exercised.
    for (std::size_t j = 0; j < 8; ++j) s[20 + j] = s[90 + j] = s[172 + j];
    for (std::size_t threads : {1u, 2u, 3u, 7u, 64u}) {
      for (Criterion c : {Criterion::Difference, Criterion::Correlation}) {
        const auto a = find_best_match(s, 8, 5, c, trial % 2 == 0);
        const auto b = find_best_match_parallel(s, 8, 5, c, trial % 2 == 0, threads);
        CHECK(a.start == b.start);
        CHECK(a.score == b.score);
      }
    }
  }
}

TEST_CASE("correlation argmax is invariant under positive affine maps", "[matcher][property]") {
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> scale(0.1, 10.0), shift(-50.0, 50.0);
  for (int trial = 0; trial < 40; ++trial) {
    const auto s = oracle::random_series(rng, 150);
    const double c = scale(rng), d = shift(rng);
    std::vector<double> t(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) t[i] = c * s[i] + d;
    const auto a = find_best_match(s, 12, 10, Criterion::Correlation, false);
    const auto b = find_best_match(t, 12, 10, Criterion::Correlation, false);
    CHECK(a.start == b.start);
  }
}

TEST_CASE("shrinking the candidate range keeps the match inside it", "[matcher][property]") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    const auto s = oracle::random_series(rng, 120);
    for (std::size_t n = 4; n <= 40; n += 6) {
      for (std::size_t p = 1; p <= 40; p += 13) {
        const auto m = find_best_match(s, n, p, Criterion::Difference, true);
        CHECK(m.start + n + p - 1 <= s.size());
      }
    }
  }
}
