// Writes the bundled synthetic dataset: scores, demographics, a metric
// policy and a handful of mask pairs for the metrics subcommand.
//
//   make_synthetic_data <out-dir> [seed]

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "rankaudit/data_model.hpp"
#include "rankaudit/error.hpp"
#include "rankaudit/io.hpp"

namespace fs = std::filesystem;
using namespace rankaudit;

namespace {

struct MethodSpec {
  const char* id;
  const char* family;
  double volume;    // overlap skill
  double boundary;  // boundary skill on tubular targets
  double missing;   // chance a prediction is absent
};

// Volume skill and boundary skill disagree for the upper half of the table,
// so rankings by average DSC and average NSD differ.
const MethodSpec kMethods[] = {
    {"unet_base", "unet", 0.840, 0.700, 0.00},  {"unet_res", "unet", 0.855, 0.690, 0.00},
    {"unet_deep", "unet", 0.830, 0.720, 0.01},  {"swin_small", "transformer", 0.870, 0.640, 0.00},
    {"swin_large", "transformer", 0.880, 0.620, 0.00}, {"vit_seg", "transformer", 0.800, 0.600, 0.02},
    {"hybrid_a", "hybrid", 0.825, 0.760, 0.00}, {"hybrid_b", "hybrid", 0.815, 0.780, 0.03},
};

struct TargetSpec {
  const char* id;
  bool tubular;
  double offset;
};

const TargetSpec kTargets[] = {
    {"liver", false, 0.08}, {"kidney_left", false, 0.04}, {"aorta", true, 0.0}, {"spinal_cord", true, -0.04}};

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

double round4(double v) { return std::round(v * 1e4) / 1e4; }

void write_scores_and_demographics(const fs::path& dir, std::mt19937_64& rng) {
  constexpr std::size_t kCases = 240;
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  DemographicTable meta({"sex", "race", "age_group"});
  std::vector<std::string> races, case_ids;
  std::vector<double> difficulty;
  const char* sexes[] = {"F", "M"};
  const char* race_values[] = {"A", "B", "W"};
  const char* ages[] = {"18-39", "40-64", "65+"};
  for (std::size_t c = 0; c < kCases; ++c) {
    const std::string id = fmt::format("case{:04d}", c + 1);
    std::string sex = sexes[rng() % 2];
    std::string race = race_values[rng() % 3];
    std::string age = ages[rng() % 3];
    if (unit(rng) < 0.03) sex.clear();
    if (unit(rng) < 0.04) race.clear();
    if (unit(rng) < 0.03) age.clear();
    races.push_back(race);
    case_ids.push_back(id);
    // Older patients are slightly harder cases.
    difficulty.push_back(0.03 * noise(rng) + (age == "65+" ? -0.02 : 0.0));
    meta.add_record(id, {sex, race, age});
  }

  ScoreTable::Builder b;
  for (const auto& m : kMethods) {
    b.set_family(m.id, m.family);
    // vit_seg underperforms on one subgroup so the fairness audit has
    // something to find.
    const bool biased = std::string(m.id) == "vit_seg";
    for (std::size_t c = 0; c < kCases; ++c) {
      const double shift = biased && races[c] == "B" ? -0.08 : 0.0;
      for (const auto& t : kTargets) {
        const bool absent = unit(rng) < m.missing;
        const double base_dsc = m.volume + t.offset + difficulty[c] + shift + (t.tubular ? -0.06 : 0.0);
        const double base_nsd = (t.tubular ? m.boundary : m.volume - 0.02) + t.offset + difficulty[c] + shift;
        const double dsc = clamp01(base_dsc + 0.05 * noise(rng));
        const double nsd = clamp01(base_nsd + 0.06 * noise(rng));
        b.set(m.id, case_ids[c], t.id, MetricKind::DSC, absent ? std::nullopt : std::optional(round4(dsc)));
        b.set(m.id, case_ids[c], t.id, MetricKind::NSD, absent ? std::nullopt : std::optional(round4(nsd)));
      }
    }
  }
  write_score_table(b.build(), dir / "scores.csv");
  write_demographics(meta, dir / "demographics.csv");
}

void write_policy(const fs::path& dir) {
  std::ofstream f(dir / "policy.toml");
  f << "# Blob-like organs on overlap, tubular structures on boundary agreement.\n"
       "default = \"DSC\"\n"
       "liver = {metric = \"DSC\"}\n"
       "kidney_left = {metric = \"DSC\"}\n"
       "aorta = {metric = \"NSD\", tau_mm = 1.5}\n"
       "spinal_cord = {metric = \"NSD\", tau_mm = 2.0}\n";
}

// Ellipsoid centred at c with semi-axes r (voxels).
VoxelMask ellipsoid(Dims dims, Spacing spacing, std::array<double, 3> c, std::array<double, 3> r) {
  VoxelMask m(dims, spacing);
  for (std::size_t z = 0; z < dims[2]; ++z)
    for (std::size_t y = 0; y < dims[1]; ++y)
      for (std::size_t x = 0; x < dims[0]; ++x) {
        const double dx = (static_cast<double>(x) - c[0]) / r[0];
        const double dy = (static_cast<double>(y) - c[1]) / r[1];
        const double dz = (static_cast<double>(z) - c[2]) / r[2];
        if (dx * dx + dy * dy + dz * dz <= 1.0) m.set(x, y, z, true);
      }
  return m;
}

// Tube along z through (cx, cy) with radius r.
VoxelMask tube(Dims dims, Spacing spacing, double cx, double cy, double r) {
  return ellipsoid(dims, spacing, {cx, cy, static_cast<double>(dims[2]) / 2.0}, {r, r, 1e9});
}

void write_masks(const fs::path& dir, std::mt19937_64& rng) {
  const fs::path mdir = dir / "masks";
  fs::create_directories(mdir);
  const Dims dims{24, 24, 16};
  const Spacing spacing{0.8, 0.8, 2.0};
  std::uniform_real_distribution<double> jitter(-1.5, 1.5);
  std::ofstream manifest(dir / "manifest.csv");
  manifest << "method,case,target,gt,pred\n";
  for (int c = 1; c <= 3; ++c) {
    const VoxelMask liver_gt = ellipsoid(dims, spacing, {12, 12, 8}, {7, 6, 5});
    const VoxelMask aorta_gt = tube(dims, spacing, 6, 18, 2.0);
    const std::string gt_l = fmt::format("case{}_liver_gt", c);
    const std::string gt_a = fmt::format("case{}_aorta_gt", c);
    write_mask(liver_gt, mdir / (gt_l + ".toml"), gt_l + ".raw");
    write_mask(aorta_gt, mdir / (gt_a + ".toml"), gt_a + ".raw");
    for (const char* method : {"unet_base", "hybrid_a"}) {
      const VoxelMask liver_pred =
          ellipsoid(dims, spacing, {12 + jitter(rng), 12 + jitter(rng), 8 + jitter(rng) / 2}, {7, 6, 5});
      const VoxelMask aorta_pred = tube(dims, spacing, 6 + jitter(rng), 18 + jitter(rng), 2.0);
      const std::string pl = fmt::format("case{}_liver_{}", c, method);
      const std::string pa = fmt::format("case{}_aorta_{}", c, method);
      write_mask(liver_pred, mdir / (pl + ".toml"), pl + ".raw");
      write_mask(aorta_pred, mdir / (pa + ".toml"), pa + ".raw");
      manifest << fmt::format("{0},case{1},liver,masks/{2}.toml,masks/{3}.toml\n", method, c, gt_l, pl);
      manifest << fmt::format("{0},case{1},aorta,masks/{2}.toml,masks/{3}.toml\n", method, c, gt_a, pa);
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2 || argc > 3) {
    std::cerr << "usage: make_synthetic_data <out-dir> [seed]\n";
    return 2;
  }
  const fs::path dir = argv[1];
  const std::uint64_t seed = argc == 3 ? std::stoull(argv[2]) : 20240611;
  try {
    fs::create_directories(dir);
    std::mt19937_64 rng(seed);
    write_scores_and_demographics(dir, rng);
    write_policy(dir);
    write_masks(dir, rng);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
