#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "obda/stream/measurement.hpp"

namespace obda::stream {

/// Window k ends at anchor + k * slide and holds the measurements whose time
/// lies in the closed interval [end - range - setback, end - setback].
struct WindowAssigner {
  Millis range = 0;
  Millis slide = 1;
  Millis anchor = 0;
  Millis setback = 0;

  Millis end(std::int64_t k) const { return anchor + k * slide; }
  Millis first_time(std::int64_t k) const { return end(k) - range - setback; }
  Millis last_time(std::int64_t k) const { return end(k) - setback; }
  /// Inclusive range of window numbers containing time t (first > second when none).
  std::pair<std::int64_t, std::int64_t> windows_containing(Millis t) const;
  /// Largest k with end(k) <= tick.
  std::int64_t latest_at(Millis tick) const;
};

struct Window {
  std::int64_t k = 0;
  Millis start = 0;  // first_time(k)
  Millis end = 0;    // last_time(k)
  std::vector<Measurement> rows;
};

/// Windows first_k..last_k over time-ordered measurements. A measurement is
/// copied into every window containing it.
std::vector<Window> assign_windows(const std::vector<Measurement>& rows, const WindowAssigner& w, std::int64_t first_k,
                                   std::int64_t last_k);

/// Rows of `rows` (time-ordered) inside window k, as an index range.
std::pair<std::size_t, std::size_t> window_rows(const std::vector<Measurement>& rows, const WindowAssigner& w,
                                                std::int64_t k);

/// floor division for possibly negative numerators.
std::int64_t floor_div(std::int64_t a, std::int64_t b);

}  // namespace obda::stream
