#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>

namespace obda::stream {

/// Materialised window signature: single-pass statistics of one window.
struct MwsSignature {
  std::uint64_t n = 0;
  double sum = 0;
  double mean = 0;
  double variance = 0;  // population
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();
  double norm = 0;      // Euclidean norm

  double stddev() const;
  bool operator==(const MwsSignature&) const = default;
};

/// Welford for mean and variance. An empty span gives n = 0.
MwsSignature compute_mws(std::span<const double> xs);
/// Signature of the concatenation (Chan et al. for the variance).
MwsSignature merge(const MwsSignature& a, const MwsSignature& b);
/// n >= 1, variance >= 0, norm^2 >= n mean^2 - 1e-9 norm^2.
bool consistent(const MwsSignature& s);

/// Population Pearson coefficient by the two-pass textbook formula. nullopt
/// when either side has zero variance. Throws obda::Error on a length
/// mismatch or fewer than two points.
std::optional<double> pearson_direct(std::span<const double> x, std::span<const double> y);
/// (sum(x y) / n - mean_x mean_y) / (sd_x sd_y) with the means and deviations
/// taken from the signatures; only the cross term reads the values.
std::optional<double> pearson_mws(std::span<const double> x, const MwsSignature& sx, std::span<const double> y,
                                  const MwsSignature& sy);

/// sum(x y) / (|x| |y|); nullopt for a zero norm.
std::optional<double> cosine_direct(std::span<const double> x, std::span<const double> y);
std::optional<double> cosine_mws(std::span<const double> x, const MwsSignature& sx, std::span<const double> y,
                                 const MwsSignature& sy);

/// |avg(a) - avg(b)| and |min(a) - min(b)|, from signatures only.
double avg_distance(const MwsSignature& a, const MwsSignature& b);
double min_distance(const MwsSignature& a, const MwsSignature& b);

}  // namespace obda::stream
