#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "obda/stream/metrics.hpp"
#include "obda/stream/mws.hpp"
#include "obda/stream/store.hpp"

namespace obda::stream {

/// Similarity between one live window and every archived window.
///   pearson / cosine: score > threshold
///   avg / min:        |avg(live) - avg(archived)| < tolerance (resp. min)
/// An optional range on the archived window mean narrows the candidates
/// before anything else is evaluated.
struct SimilarityQuery {
  enum class Kind { Pearson, Cosine, Avg, Min };
  Kind kind = Kind::Pearson;
  double threshold = 0.75;
  double tolerance = 10;
  std::optional<std::pair<double, double>> mean_range;
};

std::string to_string(SimilarityQuery::Kind k);
SimilarityQuery::Kind parse_similarity_kind(const std::string& name);

enum class AccessMode { SignatureOnly, Hybrid };
std::string to_string(AccessMode m);

/// Signature-only when every statistic the predicate needs is a signature
/// field (avg/min comparisons and the mean prefilter); hybrid when a cross
/// term over both series is needed (Pearson, cosine).
AccessMode plan_hybrid(const SimilarityQuery& q);

struct LiveWindow {
  std::vector<double> values;
  MwsSignature signature;
  static LiveWindow of(std::vector<double> values);
};

struct Match {
  std::int64_t wid = 0;
  double score = 0;
  bool operator==(const Match&) const = default;
};

/// Archived windows sorted by their mean, for the prefilter.
class SignatureIndex {
 public:
  explicit SignatureIndex(const WindowStore& store);
  /// Positions (into store.windows()) with lo <= mean <= hi, in wid order.
  std::vector<std::size_t> mean_between(double lo, double hi) const;

 private:
  std::vector<std::pair<double, std::size_t>> by_mean_;
};

struct ScanOptions {
  bool mws = true;  // off: no signature is read, every window is joined with Measurements
};

/// Evaluates q for every window of `store` against `live`. With MWS on and a
/// signature-only plan the Measurements relation is never probed. Results
/// are in wid order. Undefined scores are excluded and counted.
std::vector<Match> scan_archive(const SimilarityQuery& q, const LiveWindow& live, const WindowStore& store,
                                AdaptiveIndex& index, const SignatureIndex* sig_index, const ScanOptions& opt,
                                Metrics& metrics);

}  // namespace obda::stream
