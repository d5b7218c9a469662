#include "obda/stream/hybrid.hpp"

#include <algorithm>
#include <chrono>

#include "obda/common/error.hpp"
#include "obda/common/text.hpp"

namespace obda::stream {

std::string to_string(SimilarityQuery::Kind k) {
  switch (k) {
    case SimilarityQuery::Kind::Pearson: return "pearson";
    case SimilarityQuery::Kind::Cosine: return "cosine";
    case SimilarityQuery::Kind::Avg: return "avg";
    case SimilarityQuery::Kind::Min: return "min";
  }
  return "?";
}

SimilarityQuery::Kind parse_similarity_kind(const std::string& name) {
  for (auto k : {SimilarityQuery::Kind::Pearson, SimilarityQuery::Kind::Cosine, SimilarityQuery::Kind::Avg,
                 SimilarityQuery::Kind::Min})
    if (text::iequals(name, to_string(k))) return k;
  throw Error("unknown similarity query '" + name + "' (pearson, cosine, avg, min)");
}

std::string to_string(AccessMode m) { return m == AccessMode::SignatureOnly ? "signature-only" : "hybrid"; }

AccessMode plan_hybrid(const SimilarityQuery& q) {
  switch (q.kind) {
    case SimilarityQuery::Kind::Avg:
    case SimilarityQuery::Kind::Min: return AccessMode::SignatureOnly;
    default: return AccessMode::Hybrid;
  }
}

LiveWindow LiveWindow::of(std::vector<double> values) {
  LiveWindow w;
  w.signature = compute_mws(values);
  w.values = std::move(values);
  return w;
}

SignatureIndex::SignatureIndex(const WindowStore& store) {
  const auto& ws = store.windows();
  by_mean_.reserve(ws.size());
  for (std::size_t i = 0; i < ws.size(); ++i) by_mean_.emplace_back(ws[i].signature.mean, i);
  std::sort(by_mean_.begin(), by_mean_.end());
}

std::vector<std::size_t> SignatureIndex::mean_between(double lo, double hi) const {
  auto b = std::lower_bound(by_mean_.begin(), by_mean_.end(), std::make_pair(lo, std::size_t{0}));
  std::vector<std::size_t> out;
  for (auto it = b; it != by_mean_.end() && it->first <= hi; ++it) out.push_back(it->second);
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t) { return std::chrono::duration<double, std::milli>(Clock::now() - t).count(); }

bool in_range(const std::optional<std::pair<double, double>>& r, double mean) {
  return !r || (mean >= r->first && mean <= r->second);
}

}  // namespace

std::vector<Match> scan_archive(const SimilarityQuery& q, const LiveWindow& live, const WindowStore& store,
                                AdaptiveIndex& index, const SignatureIndex* sig_index, const ScanOptions& opt,
                                Metrics& metrics) {
  using K = SimilarityQuery::Kind;
  const auto& windows = store.windows();
  std::vector<std::size_t> candidates;
  bool prefiltered = false;
  if (q.mean_range && opt.mws && sig_index) {
    candidates = sig_index->mean_between(q.mean_range->first, q.mean_range->second);
    metrics.prefiltered_windows += windows.size() - candidates.size();
    prefiltered = true;
  } else {
    candidates.resize(windows.size());
    for (std::size_t i = 0; i < windows.size(); ++i) candidates[i] = i;
  }
  AccessMode mode = opt.mws ? plan_hybrid(q) : AccessMode::Hybrid;

  std::vector<Match> out;
  std::vector<double> raw;
  raw.reserve(live.values.size());
  for (std::size_t pos : candidates) {
    const WindowRecord& w = windows[pos];
    std::optional<double> score;
    try {
      if (mode == AccessMode::SignatureOnly) {
        auto t = Clock::now();
        ++metrics.signature_reads;
        if (!prefiltered && !in_range(q.mean_range, w.signature.mean)) {
          metrics.compute_ms += ms_since(t);
          continue;
        }
        score = q.kind == K::Avg ? avg_distance(live.signature, w.signature) : min_distance(live.signature, w.signature);
        metrics.compute_ms += ms_since(t);
      } else {
        auto t = Clock::now();
        raw.clear();
        index.probe(w.wid, raw, metrics);
        metrics.join_ms += ms_since(t);
        t = Clock::now();
        if (opt.mws) {
          ++metrics.signature_reads;
          if (!prefiltered && !in_range(q.mean_range, w.signature.mean)) {
            metrics.compute_ms += ms_since(t);
            continue;
          }
          switch (q.kind) {
            case K::Pearson: score = pearson_mws(live.values, live.signature, raw, w.signature); break;
            case K::Cosine: score = cosine_mws(live.values, live.signature, raw, w.signature); break;
            case K::Avg: score = avg_distance(live.signature, w.signature); break;
            case K::Min: score = min_distance(live.signature, w.signature); break;
          }
        } else {
          MwsSignature s;
          bool need_signature = q.mean_range || q.kind == K::Avg || q.kind == K::Min;
          if (need_signature) s = compute_mws(raw);
          if (q.mean_range && !in_range(q.mean_range, s.mean)) {
            metrics.compute_ms += ms_since(t);
            continue;
          }
          switch (q.kind) {
            case K::Pearson: score = pearson_direct(live.values, raw); break;
            case K::Cosine: score = cosine_direct(live.values, raw); break;
            case K::Avg: score = avg_distance(live.signature, s); break;
            case K::Min: score = min_distance(live.signature, s); break;
          }
        }
        metrics.compute_ms += ms_since(t);
      }
    } catch (const Error&) {
      ++metrics.numeric_errors;
      continue;
    }
    if (!score) {
      ++metrics.excluded_pairs;
      continue;
    }
    bool hit = (q.kind == K::Pearson || q.kind == K::Cosine) ? *score > q.threshold : *score < q.tolerance;
    if (hit) out.push_back({w.wid, *score});
  }
  return out;
}

}  // namespace obda::stream
