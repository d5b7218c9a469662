#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include <json.hpp>

namespace obda::stream {

/// Execution counters. Workers keep their own and the coordinator merges them.
struct Metrics {
  std::uint64_t measurement_scans = 0;      // probes into the archived Measurements relation
  std::uint64_t measurement_rows = 0;       // raw rows those probes returned
  std::uint64_t linear_probes = 0;
  std::uint64_t indexed_probes = 0;
  std::uint64_t index_builds = 0;
  std::uint64_t signature_reads = 0;        // archived signatures consulted
  std::uint64_t signature_hits = 0;         // series statistics served from a cached signature
  std::uint64_t prefiltered_windows = 0;    // skipped by the signature index
  std::uint64_t excluded_pairs = 0;         // undefined correlation / cosine
  std::uint64_t numeric_errors = 0;
  std::uint64_t rejected_measurements = 0;  // late or malformed input rows
  std::uint64_t empty_windows = 0;
  std::uint64_t windows_archived = 0;
  std::uint64_t ticks = 0;
  double join_ms = 0;
  double compute_ms = 0;

  void merge(const Metrics& other);
  nlohmann::json to_json() const;
};

/// One JSON object per line: {"scope": ..., counters..., extra...}.
void write_jsonl(std::ostream& out, const std::string& scope, const Metrics& m, const nlohmann::json& extra = {});

}  // namespace obda::stream
