#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "rankaudit/data_model.hpp"

namespace rankaudit {

struct Voxel {
  std::size_t x = 0, y = 0, z = 0;
  auto operator<=>(const Voxel&) const = default;
};

// Foreground voxels with at least one 6-neighbour that is background or
// outside the volume. Listed in x-fastest scan order.
struct BoundarySet {
  std::vector<Voxel> voxels;
  Dims dims{0, 0, 0};
  Spacing spacing{1.0, 1.0, 1.0};

  bool empty() const noexcept { return voxels.empty(); }
  std::size_t size() const noexcept { return voxels.size(); }
};

// Distance in mm from every voxel centre to the nearest reference boundary
// voxel centre. Squared distances are kept alongside; every entry is +inf
// when the reference is empty.
struct DistanceField {
  Dims dims{0, 0, 0};
  Spacing spacing{1.0, 1.0, 1.0};
  std::vector<double> squared;  // mm^2
  std::vector<double> values;   // mm

  double at(std::size_t x, std::size_t y, std::size_t z) const noexcept {
    return values[x + dims[0] * (y + dims[1] * z)];
  }
};

class Tolerance {
 public:
  // Throws ArgumentError unless mm is finite and >= 0.
  explicit Tolerance(double mm);
  double mm() const noexcept { return mm_; }

 private:
  double mm_;
};

inline constexpr double kDefaultToleranceMm = 1.5;

// DSC = 2|gt ∩ pred| / (|gt| + |pred|), 1 when both are empty.
// Throws ShapeError when dims or spacing differ.
double dsc(const VoxelMask& gt, const VoxelMask& pred);

BoundarySet boundary(const VoxelMask& mask);

// Exact anisotropic Euclidean distance transform, one lower-envelope pass
// per axis over squared distances.
DistanceField distance_field(const BoundarySet& ref);

struct SurfaceAgreement {
  std::size_t gt_boundary = 0;
  std::size_t pred_boundary = 0;
  std::size_t gt_within = 0;    // gt boundary voxels within tau of the pred boundary
  std::size_t pred_within = 0;  // pred boundary voxels within tau of the gt boundary
  double nsd = 0.0;
  // Exactly one of the two boundaries is empty; nsd is 0 by convention.
  bool degenerate = false;
};

// Pooled two-sided surface agreement. Throws ShapeError on geometry mismatch.
SurfaceAgreement surface_agreement(const VoxelMask& gt, const VoxelMask& pred, Tolerance tol);
double nsd(const VoxelMask& gt, const VoxelMask& pred, Tolerance tol);

}  // namespace rankaudit
