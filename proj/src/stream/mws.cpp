#include "obda/stream/mws.hpp"

#include <algorithm>
#include <cmath>

#include "obda/common/error.hpp"

namespace obda::stream {

double MwsSignature::stddev() const { return std::sqrt(variance); }

MwsSignature compute_mws(std::span<const double> xs) {
  MwsSignature s;
  double m2 = 0, sq = 0;
  for (double x : xs) {
    ++s.n;
    s.sum += x;
    double d = x - s.mean;
    s.mean += d / static_cast<double>(s.n);
    m2 += d * (x - s.mean);
    sq += x * x;
    s.min = std::min(s.min, x);
    s.max = std::max(s.max, x);
  }
  if (s.n > 0) s.variance = std::max(0.0, m2 / static_cast<double>(s.n));
  s.norm = std::sqrt(sq);
  return s;
}

MwsSignature merge(const MwsSignature& a, const MwsSignature& b) {
  if (a.n == 0) return b;
  if (b.n == 0) return a;
  MwsSignature s;
  double na = static_cast<double>(a.n), nb = static_cast<double>(b.n);
  s.n = a.n + b.n;
  double n = static_cast<double>(s.n);
  s.sum = a.sum + b.sum;
  double delta = b.mean - a.mean;
  s.mean = a.mean + delta * nb / n;
  double m2 = a.variance * na + b.variance * nb + delta * delta * na * nb / n;
  s.variance = std::max(0.0, m2 / n);
  s.min = std::min(a.min, b.min);
  s.max = std::max(a.max, b.max);
  s.norm = std::sqrt(a.norm * a.norm + b.norm * b.norm);
  return s;
}

bool consistent(const MwsSignature& s) {
  if (s.n < 1 || s.variance < 0 || s.min > s.max) return false;
  double sq = s.norm * s.norm;
  return sq >= static_cast<double>(s.n) * s.mean * s.mean - 1e-9 * sq;
}

namespace {

void check_lengths(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw Error("series lengths differ (" + std::to_string(x.size()) + " vs " + std::to_string(y.size()) + ")");
}

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double clamp_unit(double r) { return std::clamp(r, -1.0, 1.0); }

}  // namespace

std::optional<double> pearson_direct(std::span<const double> x, std::span<const double> y) {
  check_lengths(x, y);
  if (x.size() < 2) return std::nullopt;
  double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx <= 0 || syy <= 0) return std::nullopt;
  return clamp_unit(sxy / std::sqrt(sxx * syy));
}

std::optional<double> pearson_mws(std::span<const double> x, const MwsSignature& sx, std::span<const double> y,
                                  const MwsSignature& sy) {
  check_lengths(x, y);
  if (sx.n != x.size() || sy.n != y.size()) throw Error("signature does not describe the series");
  if (x.size() < 2 || sx.variance <= 0 || sy.variance <= 0) return std::nullopt;
  double n = static_cast<double>(x.size());
  return clamp_unit((dot(x, y) / n - sx.mean * sy.mean) / (sx.stddev() * sy.stddev()));
}

std::optional<double> cosine_direct(std::span<const double> x, std::span<const double> y) {
  check_lengths(x, y);
  double nx = std::sqrt(dot(x, x)), ny = std::sqrt(dot(y, y));
  if (nx <= 0 || ny <= 0) return std::nullopt;
  return clamp_unit(dot(x, y) / (nx * ny));
}

std::optional<double> cosine_mws(std::span<const double> x, const MwsSignature& sx, std::span<const double> y,
                                 const MwsSignature& sy) {
  check_lengths(x, y);
  if (sx.norm <= 0 || sy.norm <= 0) return std::nullopt;
  return clamp_unit(dot(x, y) / (sx.norm * sy.norm));
}

double avg_distance(const MwsSignature& a, const MwsSignature& b) { return std::abs(a.mean - b.mean); }
double min_distance(const MwsSignature& a, const MwsSignature& b) { return std::abs(a.min - b.min); }

}  // namespace obda::stream
