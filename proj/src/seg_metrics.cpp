#include "rankaudit/seg_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "rankaudit/error.hpp"

namespace rankaudit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_same_geometry(const VoxelMask& a, const VoxelMask& b) {
  if (a.dims() != b.dims()) {
    throw ShapeError(fmt::format("mask dims differ: {}x{}x{} vs {}x{}x{}", a.dims()[0], a.dims()[1], a.dims()[2],
                                 b.dims()[0], b.dims()[1], b.dims()[2]));
  }
  if (a.spacing() != b.spacing()) throw ShapeError("mask spacings differ");
}

// One-dimensional squared-distance transform under weight w (spacing^2):
// out[q] = min_p f[p] + w (q - p)^2, via the lower envelope of parabolas.
// Parabolas rooted at +inf samples are skipped.
class Envelope1D {
 public:
  void transform(const std::vector<double>& f, double w, std::vector<double>& out) {
    const std::size_t n = f.size();
    roots_.resize(n);
    bounds_.resize(n + 1);
    out.assign(n, kInf);

    std::ptrdiff_t k = -1;
    for (std::size_t q = 0; q < n; ++q) {
      if (f[q] == kInf) continue;
      if (k < 0) {
        k = 0;
        roots_[0] = q;
        bounds_[0] = -kInf;
        bounds_[1] = kInf;
        continue;
      }
      double s = intersect(f, w, roots_[static_cast<std::size_t>(k)], q);
      while (k > 0 && s <= bounds_[static_cast<std::size_t>(k)]) {
        --k;
        s = intersect(f, w, roots_[static_cast<std::size_t>(k)], q);
      }
      // With a single parabola left the new one still dominates past s.
      ++k;
      roots_[static_cast<std::size_t>(k)] = q;
      bounds_[static_cast<std::size_t>(k)] = s;
      bounds_[static_cast<std::size_t>(k) + 1] = kInf;
    }
    if (k < 0) return;

    std::size_t j = 0;
    const std::size_t last = static_cast<std::size_t>(k);
    for (std::size_t q = 0; q < n; ++q) {
      const double qd = static_cast<double>(q);
      while (j < last && bounds_[j + 1] < qd) ++j;
      // Neighbouring parabolas guard against rounding in the breakpoints.
      double best = eval(f, w, roots_[j], q);
      if (j > 0) best = std::min(best, eval(f, w, roots_[j - 1], q));
      if (j < last) best = std::min(best, eval(f, w, roots_[j + 1], q));
      out[q] = best;
    }
  }

 private:
  static double eval(const std::vector<double>& f, double w, std::size_t p, std::size_t q) {
    const double d = static_cast<double>(q > p ? q - p : p - q);
    return f[p] + w * (d * d);
  }

  static double intersect(const std::vector<double>& f, double w, std::size_t p, std::size_t q) {
    const double pd = static_cast<double>(p);
    const double qd = static_cast<double>(q);
    return ((f[q] + w * qd * qd) - (f[p] + w * pd * pd)) / (2.0 * w * (qd - pd));
  }

  std::vector<std::size_t> roots_;
  std::vector<double> bounds_;
};

}  // namespace

Tolerance::Tolerance(double mm) : mm_(mm) {
  if (!(std::isfinite(mm) && mm >= 0.0)) {
    throw ArgumentError(fmt::format("tolerance must be finite and nonnegative, got {}", mm));
  }
}

double dsc(const VoxelMask& gt, const VoxelMask& pred) {
  require_same_geometry(gt, pred);
  std::size_t a = 0, b = 0, both = 0;
  const auto& gv = gt.voxels();
  const auto& pv = pred.voxels();
  for (std::size_t i = 0; i < gv.size(); ++i) {
    a += gv[i];
    b += pv[i];
    both += gv[i] & pv[i];
  }
  if (a + b == 0) return 1.0;
  return 2.0 * static_cast<double>(both) / static_cast<double>(a + b);
}

BoundarySet boundary(const VoxelMask& mask) {
  BoundarySet out;
  out.dims = mask.dims();
  out.spacing = mask.spacing();
  const auto [nx, ny, nz] = mask.dims();
  for (std::size_t z = 0; z < nz; ++z) {
    for (std::size_t y = 0; y < ny; ++y) {
      for (std::size_t x = 0; x < nx; ++x) {
        if (!mask.at(x, y, z)) continue;
        const bool edge = x == 0 || y == 0 || z == 0 || x + 1 == nx || y + 1 == ny || z + 1 == nz;
        if (edge || !mask.at(x - 1, y, z) || !mask.at(x + 1, y, z) || !mask.at(x, y - 1, z) ||
            !mask.at(x, y + 1, z) || !mask.at(x, y, z - 1) || !mask.at(x, y, z + 1)) {
          out.voxels.push_back({x, y, z});
        }
      }
    }
  }
  return out;
}

DistanceField distance_field(const BoundarySet& ref) {
  DistanceField field;
  field.dims = ref.dims;
  field.spacing = ref.spacing;
  const auto [nx, ny, nz] = ref.dims;
  const std::size_t total = nx * ny * nz;
  field.squared.assign(total, kInf);
  field.values.assign(total, kInf);
  if (ref.empty()) return field;

  auto& sq = field.squared;
  for (const Voxel& v : ref.voxels) sq[v.x + nx * (v.y + ny * v.z)] = 0.0;

  const std::array<std::size_t, 3> stride{1, nx, nx * ny};
  Envelope1D envelope;
  std::vector<double> line, out;
  for (std::size_t axis = 0; axis < 3; ++axis) {
    const std::size_t n = ref.dims[axis];
    if (n == 1) continue;  // transform along a singleton axis is the identity
    const double w = ref.spacing[axis] * ref.spacing[axis];
    const std::size_t a1 = (axis + 1) % 3;
    const std::size_t a2 = (axis + 2) % 3;
    line.resize(n);
    for (std::size_t i2 = 0; i2 < ref.dims[a2]; ++i2) {
      for (std::size_t i1 = 0; i1 < ref.dims[a1]; ++i1) {
        const std::size_t base = i1 * stride[a1] + i2 * stride[a2];
        for (std::size_t i = 0; i < n; ++i) line[i] = sq[base + i * stride[axis]];
        envelope.transform(line, w, out);
        for (std::size_t i = 0; i < n; ++i) sq[base + i * stride[axis]] = out[i];
      }
    }
  }
  for (std::size_t i = 0; i < total; ++i) field.values[i] = std::sqrt(sq[i]);
  return field;
}

SurfaceAgreement surface_agreement(const VoxelMask& gt, const VoxelMask& pred, Tolerance tol) {
  require_same_geometry(gt, pred);
  const BoundarySet bg = boundary(gt);
  const BoundarySet bp = boundary(pred);
  SurfaceAgreement r;
  r.gt_boundary = bg.size();
  r.pred_boundary = bp.size();
  if (bg.empty() && bp.empty()) {
    r.nsd = 1.0;
    return r;
  }
  if (bg.empty() || bp.empty()) {
    r.degenerate = true;
    r.nsd = 0.0;
    return r;
  }
  const DistanceField to_pred = distance_field(bp);
  const DistanceField to_gt = distance_field(bg);
  for (const Voxel& v : bg.voxels) r.gt_within += to_pred.at(v.x, v.y, v.z) <= tol.mm() ? 1 : 0;
  for (const Voxel& v : bp.voxels) r.pred_within += to_gt.at(v.x, v.y, v.z) <= tol.mm() ? 1 : 0;
  r.nsd = static_cast<double>(r.gt_within + r.pred_within) / static_cast<double>(r.gt_boundary + r.pred_boundary);
  return r;
}

double nsd(const VoxelMask& gt, const VoxelMask& pred, Tolerance tol) {
  return surface_agreement(gt, pred, tol).nsd;
}

}  // namespace rankaudit
