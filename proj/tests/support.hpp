// Independent reference implementations and generators shared by the unit
// tests and the acceptance runner. Nothing here calls into the library's
// algorithms; only its data types are used.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rankaudit/data_model.hpp"

namespace rankaudit::testing {

// Number of the 2^n sign assignments over ranks 1..n whose positive-rank sum
// is at least w. Plain subset enumeration.
inline std::uint64_t count_sign_assignments_at_least(std::size_t n, double w) {
  std::uint64_t hits = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    std::uint64_t sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1U) sum += i + 1;
    }
    if (static_cast<double>(sum) >= w) ++hits;
  }
  return hits;
}

// W+ of untied differences by sorting magnitudes.
inline double brute_w_plus(const std::vector<double>& diffs) {
  double w = 0.0;
  for (std::size_t i = 0; i < diffs.size(); ++i) {
    if (diffs[i] <= 0.0) continue;
    std::size_t rank = 1;
    for (std::size_t j = 0; j < diffs.size(); ++j) {
      if (std::fabs(diffs[j]) < std::fabs(diffs[i])) ++rank;
    }
    w += static_cast<double>(rank);
  }
  return w;
}

// Random differences with pairwise distinct magnitudes and no zeros.
inline std::vector<double> distinct_diffs(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::uint64_t> picks;
  std::uniform_int_distribution<std::uint64_t> mag(1, 1'000'000);
  while (picks.size() < n) {
    const std::uint64_t m = mag(rng);
    bool seen = false;
    for (auto p : picks) seen = seen || p == m;
    if (!seen) picks.push_back(m);
  }
  std::vector<double> out;
  for (auto m : picks) {
    const double v = static_cast<double>(m) * 1e-6;
    out.push_back(rng() & 1U ? v : -v);
  }
  return out;
}

inline VoxelMask random_mask(std::mt19937_64& rng, Dims dims, Spacing spacing, double density) {
  std::bernoulli_distribution on(density);
  std::vector<std::uint8_t> v(dims[0] * dims[1] * dims[2]);
  for (auto& b : v) b = on(rng) ? 1 : 0;
  return VoxelMask(dims, spacing, std::move(v));
}

inline Dims random_dims(std::mt19937_64& rng, std::size_t max_side) {
  std::uniform_int_distribution<std::size_t> side(1, max_side);
  return {side(rng), side(rng), side(rng)};
}

inline Spacing random_spacing(std::mt19937_64& rng) {
  // Quarter-millimetre steps keep every squared spacing exactly representable.
  std::uniform_int_distribution<int> quarter(1, 12);
  return {quarter(rng) * 0.25, quarter(rng) * 0.25, quarter(rng) * 0.25};
}

struct BruteVoxel {
  std::size_t x, y, z;
};

inline std::vector<BruteVoxel> brute_boundary(const VoxelMask& m) {
  const auto d = m.dims();
  auto fg = [&](long x, long y, long z) {
    if (x < 0 || y < 0 || z < 0) return false;
    if (x >= static_cast<long>(d[0]) || y >= static_cast<long>(d[1]) || z >= static_cast<long>(d[2])) return false;
    return m.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y), static_cast<std::size_t>(z));
  };
  std::vector<BruteVoxel> out;
  for (std::size_t z = 0; z < d[2]; ++z)
    for (std::size_t y = 0; y < d[1]; ++y)
      for (std::size_t x = 0; x < d[0]; ++x) {
        if (!m.at(x, y, z)) continue;
        const long X = static_cast<long>(x), Y = static_cast<long>(y), Z = static_cast<long>(z);
        const bool inner = fg(X - 1, Y, Z) && fg(X + 1, Y, Z) && fg(X, Y - 1, Z) && fg(X, Y + 1, Z) &&
                           fg(X, Y, Z - 1) && fg(X, Y, Z + 1);
        if (!inner) out.push_back({x, y, z});
      }
  return out;
}

inline double brute_squared(const BruteVoxel& a, const BruteVoxel& b, const Spacing& s) {
  auto sq = [](std::size_t p, std::size_t q) {
    const double d = static_cast<double>(p > q ? p - q : q - p);
    return d * d;
  };
  return ((s[0] * s[0]) * sq(a.x, b.x) + (s[1] * s[1]) * sq(a.y, b.y)) + (s[2] * s[2]) * sq(a.z, b.z);
}

// O(V * |ref|) scan: squared mm distance from every voxel to the nearest ref
// voxel, x-fastest.
inline std::vector<double> brute_squared_field(Dims dims, const Spacing& s, const std::vector<BruteVoxel>& ref) {
  std::vector<double> out;
  for (std::size_t z = 0; z < dims[2]; ++z)
    for (std::size_t y = 0; y < dims[1]; ++y)
      for (std::size_t x = 0; x < dims[0]; ++x) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& r : ref) best = std::min(best, brute_squared({x, y, z}, r, s));
        out.push_back(best);
      }
  return out;
}

// Pooled boundary agreement by direct distance checks.
inline double brute_nsd(const VoxelMask& gt, const VoxelMask& pred, double tau) {
  const auto bg = brute_boundary(gt);
  const auto bp = brute_boundary(pred);
  if (bg.empty() && bp.empty()) return 1.0;
  if (bg.empty() || bp.empty()) return 0.0;
  std::size_t within = 0;
  auto count = [&](const std::vector<BruteVoxel>& from, const std::vector<BruteVoxel>& to) {
    for (const auto& a : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& b : to) best = std::min(best, brute_squared(a, b, gt.spacing()));
      if (std::sqrt(best) <= tau) ++within;
    }
  };
  count(bg, bp);
  count(bp, bg);
  return static_cast<double>(within) / static_cast<double>(bg.size() + bp.size());
}

inline double brute_dsc(const VoxelMask& a, const VoxelMask& b) {
  std::size_t na = 0, nb = 0, both = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    na += a.voxels()[i];
    nb += b.voxels()[i];
    both += a.voxels()[i] && b.voxels()[i] ? 1 : 0;
  }
  return na + nb == 0 ? 1.0 : 2.0 * static_cast<double>(both) / static_cast<double>(na + nb);
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() / ("rankaudit_" + tag + "_" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

  std::filesystem::path write(const std::string& name, const std::string& content) const {
    const auto p = path_ / name;
    std::ofstream(p, std::ios::binary) << content;
    return p;
  }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace rankaudit::testing
