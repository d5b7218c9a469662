#include "obda/stream/store.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "obda/common/csv.hpp"
#include "obda/common/error.hpp"

namespace obda::stream {

WindowStore::WindowStore() : WindowStore(Params{}) {}

WindowStore::WindowStore(Params p, std::size_t batch_rows) : params_(std::move(p)), batch_rows_(batch_rows) {
  if (batch_rows_ == 0) throw Error("batch size must be positive");
}

bool WindowStore::add(std::int64_t wid, Millis start, Millis end, const std::string& sensor,
                      const std::vector<Millis>& times, const std::vector<double>& values) {
  if (values.empty()) return false;
  if (times.size() != values.size()) throw Error("window " + std::to_string(wid) + ": times and values differ in length");
  if (!windows_.empty() && wid <= windows_.back().wid) throw Error("window ids must increase");
  by_wid_[wid] = windows_.size();
  windows_.push_back({wid, start, end, sensor, compute_mws(values)});
  std::size_t first = rows_.size();
  for (std::size_t i = 0; i < values.size(); ++i) rows_.push_back({wid, times[i], values[i]});
  row_ranges_.emplace_back(first, rows_.size());
  return true;
}

const WindowRecord* WindowStore::find(std::int64_t wid) const {
  auto it = by_wid_.find(wid);
  return it == by_wid_.end() ? nullptr : &windows_[it->second];
}

std::pair<std::size_t, std::size_t> WindowStore::batch(std::size_t b) const {
  std::size_t first = b * batch_rows_;
  return {first, std::min(rows_.size(), first + batch_rows_)};
}

std::pair<std::size_t, std::size_t> WindowStore::batches_for(std::int64_t wid) const {
  // first row of every batch, binary searched: batches whose wid span may contain wid
  std::size_t n = batch_count();
  std::size_t lo = 0, hi = n;
  while (lo < hi) {  // first batch whose first wid > wid
    std::size_t mid = (lo + hi) / 2;
    if (rows_[mid * batch_rows_].wid > wid)
      hi = mid;
    else
      lo = mid + 1;
  }
  if (lo == 0) return {0, 0};
  std::size_t last = lo;  // exclusive
  std::size_t first = lo - 1;
  while (first > 0 && rows_[first * batch_rows_].wid == wid) --first;
  return {first, last};
}

namespace {

const char* kWindowHeader = "wid,start,end,sensor,n,sum,mean,variance,min,max,norm";

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
void put(std::ostream& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.write(buf, sizeof(T));
}

template <class T>
bool get(std::istream& in, T& v) {
  char buf[sizeof(T)];
  if (!in.read(buf, sizeof(T))) return false;
  std::memcpy(&v, buf, sizeof(T));
  return true;
}

}  // namespace

void WindowStore::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  nlohmann::ordered_json meta = {{"format", 1},
                                 {"stream", params_.stream},
                                 {"range_ms", params_.range},
                                 {"slide_ms", params_.slide},
                                 {"anchor_ms", params_.anchor},
                                 {"setback_ms", params_.setback},
                                 {"batch_rows", batch_rows_},
                                 {"windows", windows_.size()},
                                 {"rows", rows_.size()}};
  std::ofstream(dir / "store.json") << meta.dump(2) << "\n";
  std::ofstream win(dir / "windows.csv");
  win << kWindowHeader << "\n";
  for (const auto& w : windows_) {
    const auto& s = w.signature;
    win << w.wid << "," << w.start << "," << w.end << "," << csv::escape(w.sensor) << "," << s.n << "," << num(s.sum)
        << "," << num(s.mean) << "," << num(s.variance) << "," << num(s.min) << "," << num(s.max) << "," << num(s.norm)
        << "\n";
  }
  std::ofstream bin(dir / "measurements.bin", std::ios::binary);
  for (const auto& r : rows_) {
    put(bin, r.wid);
    put(bin, r.time);
    put(bin, r.value);
  }
  if (!win || !bin) throw Error("cannot write store " + dir.string());
}

WindowStore WindowStore::load(const std::filesystem::path& dir) {
  std::ifstream meta_in(dir / "store.json");
  if (!meta_in) throw Error("no window store at " + dir.string());
  nlohmann::json meta;
  try {
    meta_in >> meta;
  } catch (const nlohmann::json::exception& e) {
    throw Error("bad store.json in " + dir.string() + ": " + e.what());
  }
  Params p{meta.at("stream").get<std::string>(), meta.at("range_ms").get<Millis>(), meta.at("slide_ms").get<Millis>(),
           meta.at("anchor_ms").get<Millis>(), meta.at("setback_ms").get<Millis>()};
  WindowStore store(p, meta.at("batch_rows").get<std::size_t>());

  auto records = csv::read_file(dir / "windows.csv");
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& f = records[i].fields;
    if (f.size() != 11) throw ParseError((dir / "windows.csv").string(), records[i].line, 1, "expected 11 fields");
    WindowRecord w;
    w.wid = std::stoll(f[0]);
    w.start = std::stoll(f[1]);
    w.end = std::stoll(f[2]);
    w.sensor = f[3];
    w.signature.n = std::stoull(f[4]);
    w.signature.sum = std::stod(f[5]);
    w.signature.mean = std::stod(f[6]);
    w.signature.variance = std::stod(f[7]);
    w.signature.min = std::stod(f[8]);
    w.signature.max = std::stod(f[9]);
    w.signature.norm = std::stod(f[10]);
    store.by_wid_[w.wid] = store.windows_.size();
    store.windows_.push_back(std::move(w));
  }
  std::ifstream bin(dir / "measurements.bin", std::ios::binary);
  MeasurementRow r;
  while (get(bin, r.wid) && get(bin, r.time) && get(bin, r.value)) store.rows_.push_back(r);
  std::size_t pos = 0;
  for (const auto& w : store.windows_) {
    std::size_t first = pos;
    while (pos < store.rows_.size() && store.rows_[pos].wid == w.wid) ++pos;
    if (pos - first != w.signature.n && pos != first)
      throw Error("window " + std::to_string(w.wid) + " has " + std::to_string(pos - first) + " rows, signature says " +
                  std::to_string(w.signature.n));
    store.row_ranges_.emplace_back(first, pos);
  }
  if (pos != store.rows_.size()) throw Error("measurements.bin has rows of unknown windows");
  if (meta.at("windows").get<std::size_t>() != store.windows_.size() ||
      meta.at("rows").get<std::size_t>() != store.rows_.size())
    throw Error("store " + dir.string() + " is incomplete");
  return store;
}

WindowStore ingest(const std::vector<Measurement>& rows, Millis range, Millis slide, const std::string& stream,
                   Metrics* metrics, std::size_t batch_rows) {
  if (slide <= 0 || range < 0) throw Error("window slide must be positive and range non-negative");
  if (!std::is_sorted(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.time < b.time; }))
    throw Error("measurements must be time-ordered");
  WindowAssigner w{range, slide, rows.empty() ? 0 : rows.front().time + range, 0};
  WindowStore store({stream, range, slide, w.anchor, 0}, batch_rows);
  if (rows.empty()) return store;
  std::int64_t wid = 0;
  for (std::int64_t k = 0; w.first_time(k) <= rows.back().time; ++k) {
    auto [b, e] = window_rows(rows, w, k);
    if (b == e) {
      if (metrics) ++metrics->empty_windows;
      continue;
    }
    std::map<std::string, std::pair<std::vector<Millis>, std::vector<double>>> per_sensor;
    for (std::size_t i = b; i < e; ++i) {
      auto& slot = per_sensor[rows[i].sensor];
      slot.first.push_back(rows[i].time);
      slot.second.push_back(rows[i].value);
    }
    for (const auto& [sensor, series] : per_sensor) {
      store.add(wid++, w.first_time(k), w.last_time(k), sensor, series.first, series.second);
      if (metrics) ++metrics->windows_archived;
    }
  }
  return store;
}

AdaptiveIndex::AdaptiveIndex(const WindowStore& store, std::uint64_t threshold)
    : store_(store), threshold_(threshold), batches_(store.batch_count()) {}

void AdaptiveIndex::probe(std::int64_t wid, std::vector<double>& out, Metrics& metrics) {
  ++metrics.measurement_scans;
  const auto& rows = store_.rows();
  auto [first, last] = store_.batches_for(wid);
  std::size_t before = out.size();
  for (std::size_t b = first; b < last; ++b) {
    auto& state = batches_[b];
    ++state.probes;
    auto [lo, hi] = store_.batch(b);
    if (!state.index && state.probes > threshold_) {
      state.index.emplace();
      for (std::size_t i = lo; i < hi;) {
        std::size_t j = i;
        while (j < hi && rows[j].wid == rows[i].wid) ++j;
        (*state.index)[rows[i].wid] = {i, j};
        i = j;
      }
      ++builds_;
      ++metrics.index_builds;
    }
    if (state.index) {
      ++metrics.indexed_probes;
      auto it = state.index->find(wid);
      if (it == state.index->end()) continue;
      for (std::size_t i = it->second.first; i < it->second.second; ++i) out.push_back(rows[i].value);
    } else {
      ++metrics.linear_probes;
      for (std::size_t i = lo; i < hi; ++i)
        if (rows[i].wid == wid) out.push_back(rows[i].value);
    }
  }
  metrics.measurement_rows += out.size() - before;
}

}  // namespace obda::stream
