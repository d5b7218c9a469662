#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "obda/stream/measurement.hpp"
#include "obda/stream/metrics.hpp"
#include "obda/stream/mws.hpp"
#include "obda/stream/window.hpp"

namespace obda::stream {

struct WindowRecord {
  std::int64_t wid = 0;
  Millis start = 0;
  Millis end = 0;
  std::string sensor;
  MwsSignature signature;
};

struct MeasurementRow {
  std::int64_t wid = 0;
  Millis time = 0;
  double value = 0;
};

/// Archived windows (the Windows relation with MWS columns) plus the raw
/// Measurements relation, appended in wid order and cut into fixed-size
/// batches. Immutable once built; readers never mutate it.
///
/// On disk: store.json (parameters and counts), windows.csv (one line per
/// window with its signature, doubles printed with 17 significant digits),
/// measurements.bin (little-endian int64 wid, int64 time, float64 value rows).
class WindowStore {
 public:
  struct Params {
    std::string stream;
    Millis range = 0;
    Millis slide = 0;
    Millis anchor = 0;
    Millis setback = 0;
    bool operator==(const Params&) const = default;
  };

  static constexpr std::size_t kDefaultBatchRows = 4096;

  WindowStore();
  explicit WindowStore(Params p, std::size_t batch_rows = kDefaultBatchRows);

  const Params& params() const { return params_; }
  std::size_t batch_rows() const { return batch_rows_; }

  /// Appends one window; wids must increase. Computes the signature from the
  /// values. Empty windows are refused (returns false).
  bool add(std::int64_t wid, Millis start, Millis end, const std::string& sensor, const std::vector<Millis>& times,
           const std::vector<double>& values);

  const std::vector<WindowRecord>& windows() const { return windows_; }
  const WindowRecord* find(std::int64_t wid) const;

  const std::vector<MeasurementRow>& rows() const { return rows_; }
  std::size_t batch_count() const { return (rows_.size() + batch_rows_ - 1) / batch_rows_; }
  /// Row range [first, last) of batch b.
  std::pair<std::size_t, std::size_t> batch(std::size_t b) const;
  /// Batches that may hold rows of `wid` (zone map on the wid column).
  std::pair<std::size_t, std::size_t> batches_for(std::int64_t wid) const;

  /// Windows whose ids satisfy `keep`, with their raw rows, in a new store.
  template <class Pred>
  WindowStore subset(Pred keep, bool with_rows) const;

  void save(const std::filesystem::path& dir) const;
  static WindowStore load(const std::filesystem::path& dir);

 private:
  Params params_;
  std::size_t batch_rows_;
  std::vector<WindowRecord> windows_;
  std::unordered_map<std::int64_t, std::size_t> by_wid_;
  std::vector<MeasurementRow> rows_;
  std::vector<std::pair<std::size_t, std::size_t>> row_ranges_;  // per window
};

/// Archives a time-ordered stream: windows k = 0, 1, ... with anchor = first
/// time + range, until a window starts after the last measurement. One
/// record per (window, sensor); wids are assigned in that order.
WindowStore ingest(const std::vector<Measurement>& rows, Millis range, Millis slide, const std::string& stream,
                   Metrics* metrics = nullptr, std::size_t batch_rows = WindowStore::kDefaultBatchRows);

/// Probe structure over the Measurements relation of one store. A batch is
/// scanned linearly until it has been probed more than `threshold` times;
/// the probe that crosses the threshold builds a hash map wid -> rows for
/// that batch and every later probe uses it. Not thread-safe: one per worker.
class AdaptiveIndex {
 public:
  static constexpr std::uint64_t kNever = std::numeric_limits<std::uint64_t>::max();

  explicit AdaptiveIndex(const WindowStore& store, std::uint64_t threshold = 3);

  /// Values of `wid` in time order, appended to `out`.
  void probe(std::int64_t wid, std::vector<double>& out, Metrics& metrics);

  std::uint64_t builds() const { return builds_; }
  bool indexed(std::size_t batch) const { return batches_.at(batch).index.has_value(); }
  std::uint64_t probes(std::size_t batch) const { return batches_.at(batch).probes; }

 private:
  struct BatchState {
    std::uint64_t probes = 0;
    std::optional<std::unordered_map<std::int64_t, std::pair<std::size_t, std::size_t>>> index;
  };
  const WindowStore& store_;
  std::uint64_t threshold_;
  std::uint64_t builds_ = 0;
  std::vector<BatchState> batches_;
};

template <class Pred>
WindowStore WindowStore::subset(Pred keep, bool with_rows) const {
  WindowStore out(params_, batch_rows_);
  for (std::size_t i = 0; i < windows_.size(); ++i) {
    const auto& w = windows_[i];
    if (!keep(w.wid)) continue;
    out.by_wid_[w.wid] = out.windows_.size();
    out.windows_.push_back(w);
    std::size_t first = out.rows_.size();
    if (with_rows) {
      auto [b, e] = row_ranges_[i];
      out.rows_.insert(out.rows_.end(), rows_.begin() + static_cast<std::ptrdiff_t>(b),
                       rows_.begin() + static_cast<std::ptrdiff_t>(e));
    }
    out.row_ranges_.emplace_back(first, out.rows_.size());
  }
  return out;
}

}  // namespace obda::stream
