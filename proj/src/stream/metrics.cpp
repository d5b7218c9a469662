#include "obda/stream/metrics.hpp"

#include <ostream>

namespace obda::stream {

void Metrics::merge(const Metrics& o) {
  measurement_scans += o.measurement_scans;
  measurement_rows += o.measurement_rows;
  linear_probes += o.linear_probes;
  indexed_probes += o.indexed_probes;
  index_builds += o.index_builds;
  signature_reads += o.signature_reads;
  signature_hits += o.signature_hits;
  prefiltered_windows += o.prefiltered_windows;
  excluded_pairs += o.excluded_pairs;
  numeric_errors += o.numeric_errors;
  rejected_measurements += o.rejected_measurements;
  empty_windows += o.empty_windows;
  windows_archived += o.windows_archived;
  ticks += o.ticks;
  join_ms += o.join_ms;
  compute_ms += o.compute_ms;
}

nlohmann::json Metrics::to_json() const {
  return {{"measurement_scans", measurement_scans},
          {"measurement_rows", measurement_rows},
          {"linear_probes", linear_probes},
          {"indexed_probes", indexed_probes},
          {"index_builds", index_builds},
          {"signature_reads", signature_reads},
          {"signature_hits", signature_hits},
          {"prefiltered_windows", prefiltered_windows},
          {"excluded_pairs", excluded_pairs},
          {"numeric_errors", numeric_errors},
          {"rejected_measurements", rejected_measurements},
          {"empty_windows", empty_windows},
          {"windows_archived", windows_archived},
          {"ticks", ticks},
          {"join_ms", join_ms},
          {"compute_ms", compute_ms}};
}

void write_jsonl(std::ostream& out, const std::string& scope, const Metrics& m, const nlohmann::json& extra) {
  nlohmann::json line = {{"scope", scope}};
  line.update(m.to_json());
  if (extra.is_object()) line.update(extra);
  out << line.dump() << "\n";
}

}  // namespace obda::stream
