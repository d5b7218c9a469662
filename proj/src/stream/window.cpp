#include "obda/stream/window.hpp"

#include <algorithm>

#include "obda/common/error.hpp"

namespace obda::stream {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::pair<std::int64_t, std::int64_t> WindowAssigner::windows_containing(Millis t) const {
  // end(k) in [t + setback, t + setback + range]
  std::int64_t lo = -floor_div(-(t + setback - anchor), slide);
  std::int64_t hi = floor_div(t + setback + range - anchor, slide);
  return {lo, hi};
}

std::int64_t WindowAssigner::latest_at(Millis tick) const { return floor_div(tick - anchor, slide); }

std::pair<std::size_t, std::size_t> window_rows(const std::vector<Measurement>& rows, const WindowAssigner& w,
                                                std::int64_t k) {
  Millis lo = w.first_time(k), hi = w.last_time(k);
  auto b = std::lower_bound(rows.begin(), rows.end(), lo, [](const Measurement& m, Millis t) { return m.time < t; });
  auto e = std::upper_bound(b, rows.end(), hi, [](Millis t, const Measurement& m) { return t < m.time; });
  return {static_cast<std::size_t>(b - rows.begin()), static_cast<std::size_t>(e - rows.begin())};
}

std::vector<Window> assign_windows(const std::vector<Measurement>& rows, const WindowAssigner& w, std::int64_t first_k,
                                   std::int64_t last_k) {
  if (w.slide <= 0 || w.range < 0) throw Error("window slide must be positive and range non-negative");
  std::vector<Window> out;
  for (std::int64_t k = first_k; k <= last_k; ++k) {
    Window win{k, w.first_time(k), w.last_time(k), {}};
    auto [b, e] = window_rows(rows, w, k);
    win.rows.assign(rows.begin() + static_cast<std::ptrdiff_t>(b), rows.begin() + static_cast<std::ptrdiff_t>(e));
    out.push_back(std::move(win));
  }
  return out;
}

}  // namespace obda::stream
