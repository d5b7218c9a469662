#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "obda/dist/partition.hpp"
#include "obda/stream/hybrid.hpp"
#include "obda/stream/store.hpp"

namespace obda::bench {

struct BenchConfig {
  std::size_t windows = 10000;  // archived windows, one per (segment, sensor)
  std::size_t tuples = 60;      // per window, one per second
  std::size_t sensors = 4;
  std::size_t cycles = 15;
  std::uint64_t seed = 42;
  double planted = 0.1;  // share of archived windows that follow the live pattern
  std::vector<stream::SimilarityQuery::Kind> queries{stream::SimilarityQuery::Kind::Pearson,
                                                     stream::SimilarityQuery::Kind::Avg,
                                                     stream::SimilarityQuery::Kind::Min};
  std::vector<bool> mws{true, false};
  std::vector<std::size_t> workers{1};
  std::uint64_t index_threshold = 3;
};

/// Sensor sinusoids around 400 with seeded noise; in a `planted` share of the
/// segments a sensor follows the live pattern instead. Time-ordered.
std::vector<stream::Measurement> archive_stream(const BenchConfig& c);

/// archive_stream cut into tumbling windows of `tuples` seconds.
stream::WindowStore synthetic_archive(const BenchConfig& c);

/// The live window of cycle `cycle`: the live pattern with fresh noise.
stream::LiveWindow live_window(const BenchConfig& c, std::size_t cycle);

stream::SimilarityQuery bench_query(stream::SimilarityQuery::Kind kind);

struct BenchRow {
  std::string query;
  bool mws = true;
  std::size_t workers = 1;
  std::size_t cycles = 0;
  std::size_t windows = 0;
  double median_total_ms = 0;
  double mean_total_ms = 0;
  double mean_join_ms = 0;     // summed over workers
  double mean_compute_ms = 0;  // summed over workers
  std::uint64_t measurement_scans = 0;
  std::uint64_t index_builds = 0;
  std::size_t results = 0;                 // matches in the last cycle
  std::vector<dist::TickMatch> matches;    // of every cycle, tick = cycle
};

/// Every (query, mws, workers) cell runs `cycles` live cycles against the
/// archive, cells interleaved within a cycle. Each cell has its own
/// partitioned copy of the archive and its own adaptive indexes.
std::vector<BenchRow> run_bench(const BenchConfig& c, const stream::WindowStore& archive);

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);

/// tick,wid,score rows, scores with 17 significant digits.
std::string matches_csv(const std::vector<dist::TickMatch>& m);

}  // namespace obda::bench
