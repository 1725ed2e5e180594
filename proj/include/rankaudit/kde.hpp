#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace rankaudit {

inline constexpr std::size_t kKdeGridPoints = 256;
inline constexpr double kKdeBandwidthFloor = 1e-3;

struct KdeCurve {
  std::vector<double> grid;     // uniform over [0, 1]
  std::vector<double> density;  // >= 0, not renormalised after clipping
  double bandwidth = 0.0;
  std::size_t n = 0;
  double mean = 0.0;
  // Kernel mass falling outside [0, 1], averaged over samples.
  double clipped_mass = 0.0;
};

// Silverman's rule 0.9 min(sd, IQR/1.34) n^(-1/5), falling back to sd when
// the IQR is zero, floored at kKdeBandwidthFloor.
double silverman_bandwidth(std::span<const double> samples);

// Gaussian KDE on kKdeGridPoints points over [0, 1]. Throws
// InsufficientDataError for fewer than 2 samples and ArgumentError for a
// non-positive bandwidth.
KdeCurve kde(std::span<const double> samples, std::optional<double> bandwidth = std::nullopt);

// Trapezoidal integral of the density over the grid.
double trapezoid_mass(const KdeCurve& curve);

}  // namespace rankaudit
