#include "obda/bench/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "obda/common/error.hpp"

namespace obda::bench {

namespace {

using stream::Millis;

constexpr Millis kSecond = 1000;

double live_pattern(std::size_t i) {
  return 400 + 50 * std::sin(2 * std::numbers::pi * static_cast<double>(i) / 23.0) +
         20 * std::cos(2 * std::numbers::pi * static_cast<double>(i) / 9.0);
}

double sensor_wave(std::size_t sensor, Millis t) {
  double period = 37.0 + 11.0 * static_cast<double>(sensor);
  double level = 340 + 45 * static_cast<double>(sensor % 4);
  return level + 50 * std::sin(2 * std::numbers::pi * static_cast<double>(t / kSecond) / period + static_cast<double>(sensor));
}

}  // namespace

std::vector<stream::Measurement> archive_stream(const BenchConfig& c) {
  if (c.sensors == 0 || c.tuples < 2) throw Error("bench needs at least one sensor and two tuples per window");
  std::mt19937_64 rng(c.seed);
  std::normal_distribution<double> noise(0, 8);
  std::uniform_real_distribution<double> coin(0, 1);
  std::size_t segments = (c.windows + c.sensors - 1) / c.sensors;
  std::vector<stream::Measurement> rows;
  rows.reserve(segments * c.sensors * c.tuples);
  std::vector<std::string> names;
  for (std::size_t s = 0; s < c.sensors; ++s) names.push_back("sensor" + std::to_string(s));
  std::vector<bool> follows(c.sensors);
  std::size_t emitted = 0;
  for (std::size_t seg = 0; seg < segments; ++seg) {
    std::size_t active = std::min(c.sensors, c.windows - emitted);
    for (std::size_t s = 0; s < active; ++s) follows[s] = coin(rng) < c.planted;
    emitted += active;
    for (std::size_t i = 0; i < c.tuples; ++i) {
      Millis t = static_cast<Millis>(seg * c.tuples + i) * kSecond;
      for (std::size_t s = 0; s < active; ++s)
        rows.push_back({t, names[s], (follows[s] ? live_pattern(i) : sensor_wave(s, t)) + noise(rng)});
    }
  }
  return rows;
}

stream::WindowStore synthetic_archive(const BenchConfig& c) {
  Millis span = static_cast<Millis>(c.tuples) * kSecond;
  return stream::ingest(archive_stream(c), span - kSecond, span, "archive");
}

stream::LiveWindow live_window(const BenchConfig& c, std::size_t cycle) {
  std::mt19937_64 rng(c.seed ^ (0x5bd1e995ULL * (cycle + 1)));
  std::normal_distribution<double> noise(0, 8);
  std::vector<double> values(c.tuples);
  for (std::size_t i = 0; i < c.tuples; ++i) values[i] = live_pattern(i) + noise(rng);
  return stream::LiveWindow::of(std::move(values));
}

stream::SimilarityQuery bench_query(stream::SimilarityQuery::Kind kind) {
  stream::SimilarityQuery q;
  q.kind = kind;
  q.threshold = 0.75;
  q.tolerance = 10;
  return q;
}

std::vector<BenchRow> run_bench(const BenchConfig& c, const stream::WindowStore& archive) {
  if (c.cycles == 0) throw Error("bench needs at least one cycle");
  std::vector<stream::LiveWindow> lives;
  for (std::size_t k = 0; k < c.cycles; ++k) lives.push_back(live_window(c, k));

  struct Cell {
    stream::SimilarityQuery::Kind kind;
    bool mws;
    std::unique_ptr<dist::ParallelArchive> archive;
    std::vector<double> totals;
    stream::Metrics sum;
    BenchRow row;
  };
  std::vector<Cell> cells;
  for (auto kind : c.queries)
    for (bool mws : c.mws)
      for (std::size_t workers : c.workers) {
        bool rows_needed = !mws || stream::plan_hybrid(bench_query(kind)) == stream::AccessMode::Hybrid;
        Cell cell{kind, mws, std::make_unique<dist::ParallelArchive>(archive, workers, c.index_threshold, rows_needed),
                  {}, {}, {}};
        cell.row.query = stream::to_string(kind);
        cell.row.mws = mws;
        cell.row.workers = workers;
        cell.row.cycles = c.cycles;
        cell.row.windows = archive.windows().size();
        cells.push_back(std::move(cell));
      }

  // cycles outermost, so drift on the host hits every cell alike
  for (std::size_t k = 0; k < c.cycles; ++k)
    for (auto& cell : cells) {
      stream::Metrics m;
      auto start = std::chrono::steady_clock::now();
      auto matches = cell.archive->execute(bench_query(cell.kind), lives[k], static_cast<std::int64_t>(k), {cell.mws}, m);
      cell.totals.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count());
      cell.sum.merge(m);
      cell.row.results = matches.size();
      cell.row.matches.insert(cell.row.matches.end(), matches.begin(), matches.end());
    }

  std::vector<BenchRow> out;
  auto n = static_cast<double>(c.cycles);
  for (auto& cell : cells) {
    BenchRow& row = cell.row;
    auto sorted = cell.totals;
    std::sort(sorted.begin(), sorted.end());
    std::size_t mid = sorted.size() / 2;
    row.median_total_ms = sorted.size() % 2 ? sorted[mid] : (sorted[mid - 1] + sorted[mid]) / 2;
    for (double t : cell.totals) row.mean_total_ms += t / n;
    row.mean_join_ms = cell.sum.join_ms / n;
    row.mean_compute_ms = cell.sum.compute_ms / n;
    row.measurement_scans = cell.sum.measurement_scans;
    row.index_builds = cell.sum.index_builds;
    out.push_back(std::move(row));
  }
  return out;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "query,mws,workers,cycles,windows,median_total_ms,mean_total_ms,mean_join_ms,mean_compute_ms,"
         "measurement_scans,index_builds,results\n";
  char buf[64];
  auto ms = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return std::string(buf);
  };
  for (const auto& r : rows)
    out << r.query << "," << (r.mws ? "on" : "off") << "," << r.workers << "," << r.cycles << "," << r.windows << ","
        << ms(r.median_total_ms) << "," << ms(r.mean_total_ms) << "," << ms(r.mean_join_ms) << ","
        << ms(r.mean_compute_ms) << "," << r.measurement_scans << "," << r.index_builds << "," << r.results << "\n";
}

std::string matches_csv(const std::vector<dist::TickMatch>& m) {
  std::ostringstream out;
  out << "tick,wid,score\n";
  char buf[40];
  for (const auto& x : m) {
    std::snprintf(buf, sizeof buf, "%.17g", x.score);
    out << x.tick << "," << x.wid << "," << buf << "\n";
  }
  return out.str();
}

}  // namespace obda::bench
