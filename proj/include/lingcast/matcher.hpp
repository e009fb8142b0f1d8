#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <future>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "lingcast/errors.hpp"
#include "lingcast/series.hpp"

namespace lingcast {

enum class Criterion {
  Difference,   ///< sum of absolute element-wise differences, lower is better
  Correlation,  ///< Pearson correlation, higher is better
};

constexpr std::string_view to_string(Criterion c) noexcept {
  return c == Criterion::Difference ? "difference" : "correlation";
}

struct WindowMatch {
  std::size_t start = 0;  ///< 1-based position of the candidate's first element
  double score = 0.0;
  Criterion criterion = Criterion::Difference;
};

/// Smallest series length that admits one candidate window plus its follower.
constexpr std::size_t minimum_series_length(std::size_t window, std::size_t horizon) noexcept {
  return window + horizon + 1;
}

inline void check_search_shape(std::size_t series_length, std::size_t window, std::size_t horizon) {
  if (window < 2) throw Error(ErrorKind::WindowTooSmall, "window length must be at least 2");
  if (horizon < 1) throw Error(ErrorKind::InvalidArgument, "horizon must be at least 1");
  if (series_length < minimum_series_length(window, horizon))
    throw SeriesTooShortError(series_length, minimum_series_length(window, horizon));
}

/// Admissible 1-based start positions 1..K-N-P+1, increasing.
inline std::vector<std::size_t> enumerate_candidates(std::size_t series_length, std::size_t window,
                                                     std::size_t horizon) {
  check_search_shape(series_length, window, horizon);
  std::vector<std::size_t> starts(series_length - window - horizon + 1);
  for (std::size_t i = 0; i < starts.size(); ++i) starts[i] = i + 1;
  return starts;
}

/// True when `candidate` beats `incumbent`; equal scores go to the later start.
inline bool is_better(Criterion criterion, double candidate_score, std::size_t candidate_start,
                      double incumbent_score, std::size_t incumbent_start) noexcept {
  if (candidate_score == incumbent_score) return candidate_start > incumbent_start;
  return criterion == Criterion::Difference ? candidate_score < incumbent_score
                                            : candidate_score > incumbent_score;
}

/// Holds the query window, detrended once if requested, and scores candidate
/// windows of the same length against it.
class WindowScorer {
 public:
  WindowScorer(std::span<const double> query, Criterion criterion, bool detrend_mode)
      : criterion_(criterion), detrend_(detrend_mode), query_scale_(reference_scale(query)) {
    if (query.size() < 2) throw Error(ErrorKind::WindowTooSmall, "window length must be at least 2");
    query_ = prepare(query);
  }

  Criterion criterion() const noexcept { return criterion_; }
  bool detrends() const noexcept { return detrend_; }
  std::size_t window() const noexcept { return query_.size(); }

  /// nullopt means the correlation is undefined for this candidate.
  std::optional<double> score(std::span<const double> candidate) const {
    if (candidate.size() != query_.size())
      throw Error(ErrorKind::InvalidArgument, "candidate and query windows differ in length");
    std::vector<double> prepared = prepare(candidate);
    if (criterion_ == Criterion::Difference) {
      double sum = 0.0;
      for (std::size_t j = 0; j < prepared.size(); ++j) sum += std::abs(query_[j] - prepared[j]);
      return sum;
    }
    return try_pearson(query_, prepared, query_scale_, reference_scale(candidate));
  }

 private:
  // Detrended residuals are compared against the magnitude of the raw
  // window when deciding whether they are flat.
  double reference_scale(std::span<const double> raw) const {
    return detrend_ ? detail::max_abs(raw) + value_range(raw) : 0.0;
  }

  std::vector<double> prepare(std::span<const double> raw) const {
    if (!detrend_) return {raw.begin(), raw.end()};
    return detrend(raw, fit_linear_trend(raw));
  }

  Criterion criterion_;
  bool detrend_;
  double query_scale_;
  std::vector<double> query_;
};

inline std::optional<double> score_window(std::span<const double> query, std::span<const double> candidate,
                                          Criterion criterion, bool detrend_mode) {
  if (query.size() != candidate.size())
    throw Error(ErrorKind::InvalidArgument, "candidate and query windows differ in length");
  return WindowScorer(query, criterion, detrend_mode).score(candidate);
}

namespace detail {

// Best match among 1-based starts [first, last], scanned in increasing order.
inline std::optional<WindowMatch> best_in_range(const WindowScorer& scorer, std::span<const double> series,
                                                std::size_t first, std::size_t last) {
  const std::size_t n = scorer.window();
  std::optional<WindowMatch> best;
  for (std::size_t start = first; start <= last; ++start) {
    auto s = scorer.score(series.subspan(start - 1, n));
    if (!s) continue;
    if (!best || is_better(scorer.criterion(), *s, start, best->score, best->start))
      best = WindowMatch{start, *s, scorer.criterion()};
  }
  return best;
}

inline std::optional<WindowMatch> merge(Criterion criterion, std::optional<WindowMatch> a,
                                        std::optional<WindowMatch> b) {
  if (!a) return b;
  if (!b) return a;
  return is_better(criterion, b->score, b->start, a->score, a->start) ? b : a;
}

}  // namespace detail

/// Exhaustive search for the historical window most similar to the last N
/// values. Throws SeriesTooShort or NoValidCandidate.
inline WindowMatch find_best_match(std::span<const double> series, std::size_t window, std::size_t horizon,
                                   Criterion criterion, bool detrend_mode) {
  check_search_shape(series.size(), window, horizon);
  const WindowScorer scorer(series.subspan(series.size() - window), criterion, detrend_mode);
  const std::size_t last = series.size() - window - horizon + 1;
  if (auto best = detail::best_in_range(scorer, series, 1, last)) return *best;
  throw Error(ErrorKind::NoValidCandidate, "every candidate window has undefined correlation");
}

inline WindowMatch find_best_match(const TimeSeries& series, std::size_t window, std::size_t horizon,
                                   Criterion criterion, bool detrend_mode) {
  return find_best_match(series.values(), window, horizon, criterion, detrend_mode);
}

/// Same result as find_best_match, bit for bit, with the candidate range split
/// across `threads` workers.
inline WindowMatch find_best_match_parallel(std::span<const double> series, std::size_t window,
                                            std::size_t horizon, Criterion criterion, bool detrend_mode,
                                            std::size_t threads) {
  check_search_shape(series.size(), window, horizon);
  const WindowScorer scorer(series.subspan(series.size() - window), criterion, detrend_mode);
  const std::size_t last = series.size() - window - horizon + 1;
  threads = std::clamp<std::size_t>(threads, 1, last);
  const std::size_t chunk = (last + threads - 1) / threads;

  std::vector<std::future<std::optional<WindowMatch>>> parts;
  for (std::size_t first = 1; first <= last; first += chunk) {
    const std::size_t end = std::min(last, first + chunk - 1);
    parts.push_back(std::async(std::launch::async, [&scorer, series, first, end] {
      return detail::best_in_range(scorer, series, first, end);
    }));
  }
  std::optional<WindowMatch> best;
  for (auto& p : parts) best = detail::merge(criterion, best, p.get());
  if (best) return *best;
  throw Error(ErrorKind::NoValidCandidate, "every candidate window has undefined correlation");
}

}  // namespace lingcast
