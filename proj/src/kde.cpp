#include "rankaudit/kde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "rankaudit/error.hpp"

namespace rankaudit {

namespace {

// Linear interpolation between order statistics.
double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace

double silverman_bandwidth(std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n < 2) throw InsufficientDataError("bandwidth needs at least 2 samples");
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));

  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double iqr = quantile(sorted, 0.75) - quantile(sorted, 0.25);
  const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
  const double h = 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
  return std::max(h, kKdeBandwidthFloor);
}

KdeCurve kde(std::span<const double> samples, std::optional<double> bandwidth) {
  if (samples.size() < 2) {
    throw InsufficientDataError(fmt::format("KDE needs at least 2 samples, got {}", samples.size()));
  }
  KdeCurve curve;
  curve.n = samples.size();
  curve.bandwidth = bandwidth ? *bandwidth : silverman_bandwidth(samples);
  if (!(curve.bandwidth > 0.0 && std::isfinite(curve.bandwidth))) {
    throw ArgumentError(fmt::format("bandwidth must be positive, got {}", curve.bandwidth));
  }
  for (double x : samples) curve.mean += x;
  curve.mean /= static_cast<double>(curve.n);

  const double h = curve.bandwidth;
  const double norm = 1.0 / (static_cast<double>(curve.n) * h * std::sqrt(2.0 * std::numbers::pi));
  curve.grid.resize(kKdeGridPoints);
  curve.density.resize(kKdeGridPoints);
  for (std::size_t i = 0; i < kKdeGridPoints; ++i) {
    const double g = static_cast<double>(i) / static_cast<double>(kKdeGridPoints - 1);
    double sum = 0.0;
    for (double x : samples) {
      const double u = (g - x) / h;
      sum += std::exp(-0.5 * u * u);
    }
    curve.grid[i] = g;
    curve.density[i] = sum * norm;
  }
  double clipped = 0.0;
  for (double x : samples) clipped += normal_cdf(-x / h) + (1.0 - normal_cdf((1.0 - x) / h));
  curve.clipped_mass = clipped / static_cast<double>(curve.n);
  return curve;
}

double trapezoid_mass(const KdeCurve& curve) {
  double mass = 0.0;
  for (std::size_t i = 1; i < curve.grid.size(); ++i) {
    mass += 0.5 * (curve.density[i] + curve.density[i - 1]) * (curve.grid[i] - curve.grid[i - 1]);
  }
  return mass;
}

}  // namespace rankaudit
