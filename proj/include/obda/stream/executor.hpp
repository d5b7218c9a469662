#pragma once

#include <compare>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "obda/mapping/relational.hpp"
#include "obda/starql/compile.hpp"
#include "obda/stream/measurement.hpp"
#include "obda/stream/metrics.hpp"

namespace obda::stream {

struct StreamInput {
  std::string name;               // a FROM STREAM name of the query
  std::vector<Measurement> rows;  // time-ordered
  std::optional<Millis> setback;  // overrides the query's set-back
};

struct RunOptions {
  bool mws = true;
  std::size_t workers = 1;
  std::optional<Millis> last_tick;  // default: the latest (shifted) measurement time
};

struct ResultRow {
  Millis tick = 0;
  std::vector<std::string> values;
  auto operator<=>(const ResultRow&) const = default;
};

struct RunResult {
  std::vector<std::string> header;  // tick_ms,subject,concept or tick_ms + SELECT variables
  std::vector<ResultRow> rows;      // sorted by tick, then values
  std::vector<Millis> ticks;
  Metrics metrics;
};

/// Evaluates the static part once, then at every pulse tick
///   - takes, per stream, the latest window ending at or before the tick on
///     the slide grid anchored at the pulse start (historic streams shifted
///     forward by their set-back),
///   - merges all window contents into one sequence of states, one per
///     distinct (shifted) timestamp (StandardSequencing),
///   - evaluates the HAVING plan and joins it with the static answers.
/// The pulse starts at START or, for NOW, at the first live timestamp.
/// Ticks are distributed over `workers` threads by hash; the result does not
/// depend on the worker count.
///
/// With MWS on, statistics of a series that is exactly one sensor's window
/// of a historic stream are served from a per-window signature cache.
RunResult execute(const starql::ExecutablePlan& plan, const TableStore& tables, const std::vector<StreamInput>& inputs,
                  const RunOptions& opt = {});

void write_csv(std::ostream& out, const RunResult& r);

}  // namespace obda::stream
