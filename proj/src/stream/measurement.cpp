#include "obda/stream/measurement.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>

#include "obda/common/csv.hpp"
#include "obda/common/error.hpp"
#include "obda/common/text.hpp"

namespace obda::stream {

namespace {

bool parse_time(const std::string& s, Millis& out) {
  auto t = text::trim(s);
  auto r = std::from_chars(t.data(), t.data() + t.size(), out);
  return r.ec == std::errc() && r.ptr == t.data() + t.size();
}

bool parse_value(const std::string& s, double& out) {
  std::string t(text::trim(s));
  if (t.empty()) return false;
  char* end = nullptr;
  out = std::strtod(t.c_str(), &end);
  return end == t.c_str() + t.size() && std::isfinite(out);
}

}  // namespace

MeasurementLoad read_measurements(std::istream& in, Millis lateness) {
  MeasurementLoad load;
  std::map<std::string, Millis> latest;
  bool first = true;
  for (const auto& rec : csv::parse(in, "<measurements>")) {
    bool header = first && !rec.fields.empty() && text::trim(rec.fields[0]) == "time_ms";
    first = false;
    if (header) continue;
    Measurement m;
    if (rec.fields.size() != 3 || !parse_time(rec.fields[0], m.time) || !parse_value(rec.fields[2], m.value)) {
      ++load.malformed;
      continue;
    }
    m.sensor = std::string(text::trim(rec.fields[1]));
    if (m.sensor.empty()) {
      ++load.malformed;
      continue;
    }
    auto it = latest.find(m.sensor);
    if (it != latest.end() && m.time < it->second - lateness) {
      ++load.late;
      continue;
    }
    if (it == latest.end())
      latest.emplace(m.sensor, m.time);
    else
      it->second = std::max(it->second, m.time);
    load.rows.push_back(std::move(m));
  }
  std::stable_sort(load.rows.begin(), load.rows.end(), [](const auto& a, const auto& b) { return a.time < b.time; });
  return load;
}

MeasurementLoad read_measurements_file(const std::filesystem::path& path, Millis lateness) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open stream file " + path.string());
  return read_measurements(in, lateness);
}

void write_measurements(std::ostream& out, const std::vector<Measurement>& rows) {
  out << "time_ms,sensor_id,value\n";
  for (const auto& m : rows) out << m.time << "," << csv::escape(m.sensor) << "," << text::format_double(m.value) << "\n";
}

}  // namespace obda::stream
