#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace obda::stream {

using Millis = std::int64_t;

struct Measurement {
  Millis time = 0;
  std::string sensor;
  double value = 0;
  bool operator==(const Measurement&) const = default;
};

struct MeasurementLoad {
  std::vector<Measurement> rows;  // accepted rows, stably sorted by time
  std::uint64_t late = 0;         // older than the sensor's latest time minus the lateness bound
  std::uint64_t malformed = 0;
};

/// CSV rows `time_ms,sensor_id,value`; a header line is optional. A row whose
/// time is more than `lateness` ms before the latest time already seen for
/// its sensor is rejected, as are rows with a non-integer time or a
/// non-finite value.
MeasurementLoad read_measurements(std::istream& in, Millis lateness = 0);
MeasurementLoad read_measurements_file(const std::filesystem::path& path, Millis lateness = 0);
void write_measurements(std::ostream& out, const std::vector<Measurement>& rows);

}  // namespace obda::stream
