#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace rankaudit {

enum class MetricKind { DSC, NSD };

std::string_view to_string(MetricKind kind);
// Accepts exactly "DSC" or "NSD"; throws ValidationError otherwise.
MetricKind parse_metric_kind(std::string_view text);

inline constexpr std::array<MetricKind, 2> kAllMetrics{MetricKind::DSC, MetricKind::NSD};

// Per-(method, case, target, metric) scores in [0, 1].
//
// Identifiers are kept in lexicographic order. Every cell is either absent (never
// mentioned), declared but missing (an empty score cell on disk), or holds a
// value. Both non-value states read back as std::nullopt from score().
class ScoreTable {
 public:
  enum class CellState : std::uint8_t { Absent, Missing, Present };

  class Builder {
   public:
    // Throws ValidationError for a score outside [0, 1] (or non-finite) and
    // for a key that was already set.
    Builder& set(std::string_view method, std::string_view case_id, std::string_view target,
                 MetricKind metric, std::optional<double> score);
    // Throws ValidationError if the method already has a different family.
    Builder& set_family(std::string_view method, std::string_view family);

    ScoreTable build() const;

   private:
    using Key = std::tuple<std::size_t, std::size_t, std::size_t, MetricKind>;
    static std::size_t intern(std::vector<std::string>& ids, std::map<std::string, std::size_t, std::less<>>& index,
                              std::string_view id);

    std::vector<std::string> methods_, cases_, targets_;
    std::map<std::string, std::size_t, std::less<>> method_index_, case_index_, target_index_;
    std::map<Key, std::optional<double>> cells_;
    std::map<std::string, std::string> families_;
  };

  ScoreTable() = default;

  const std::vector<std::string>& methods() const noexcept { return methods_; }
  const std::vector<std::string>& cases() const noexcept { return cases_; }
  const std::vector<std::string>& targets() const noexcept { return targets_; }
  const std::map<std::string, std::string>& families() const noexcept { return families_; }

  std::optional<std::size_t> method_index(std::string_view id) const;
  std::optional<std::size_t> case_index(std::string_view id) const;
  std::optional<std::size_t> target_index(std::string_view id) const;

  // Family label, or std::nullopt when the method has none.
  std::optional<std::string> family(std::string_view method) const;

  std::optional<double> score(std::size_t m, std::size_t c, std::size_t t, MetricKind metric) const {
    const std::size_t i = flat(m, c, t, metric);
    if (state_[i] != CellState::Present) return std::nullopt;
    return values_[i];
  }
  std::optional<double> score(std::string_view method, std::string_view case_id, std::string_view target,
                              MetricKind metric) const;
  CellState state(std::size_t m, std::size_t c, std::size_t t, MetricKind metric) const {
    return state_[flat(m, c, t, metric)];
  }

  // Cells holding a value.
  std::size_t entry_count() const noexcept { return present_; }
  // Cells declared with an empty score.
  std::size_t missing_count() const noexcept { return missing_; }

  bool operator==(const ScoreTable& other) const = default;

 private:
  std::size_t flat(std::size_t m, std::size_t c, std::size_t t, MetricKind metric) const noexcept {
    return ((m * cases_.size() + c) * targets_.size() + t) * 2 + static_cast<std::size_t>(metric);
  }

  std::vector<std::string> methods_, cases_, targets_;
  std::map<std::string, std::size_t, std::less<>> method_index_, case_index_, target_index_;
  std::map<std::string, std::string> families_;
  std::vector<double> values_;
  std::vector<CellState> state_;
  std::size_t present_ = 0;
  std::size_t missing_ = 0;
};

// Categorical metadata per case. "unknown" is an ordinary category value that
// subgroup enumeration skips unless asked not to.
class DemographicTable {
 public:
  static constexpr std::string_view kUnknown = "unknown";

  explicit DemographicTable(std::vector<std::string> attributes = {});

  // Empty values are stored as kUnknown. Throws ValidationError on a duplicate
  // case id or a value count that does not match the attribute count.
  void add_record(std::string_view case_id, std::vector<std::string> values);

  const std::vector<std::string>& attributes() const noexcept { return attributes_; }
  const std::vector<std::string>& cases() const noexcept { return cases_; }
  std::size_t size() const noexcept { return cases_.size(); }

  bool contains(std::string_view case_id) const;
  // Throws LookupError for an unknown case or attribute.
  const std::string& value(std::string_view case_id, std::string_view attribute) const;
  const std::vector<std::string>& record(std::string_view case_id) const;

  bool operator==(const DemographicTable& other) const = default;

 private:
  std::vector<std::string> attributes_;
  std::vector<std::string> cases_;
  std::map<std::string, std::vector<std::string>, std::less<>> records_;
};

using Dims = std::array<std::size_t, 3>;
using Spacing = std::array<double, 3>;

// Dense binary voxel grid, x fastest, then y, then z.
class VoxelMask {
 public:
  VoxelMask() = default;
  // All-background mask. Throws ValidationError for zero dims or
  // non-positive / non-finite spacing.
  VoxelMask(Dims dims, Spacing spacing);
  // Throws ValidationError as above, FormatError if voxels.size() does not
  // match the dims or any byte is not 0/1.
  VoxelMask(Dims dims, Spacing spacing, std::vector<std::uint8_t> voxels);

  const Dims& dims() const noexcept { return dims_; }
  const Spacing& spacing() const noexcept { return spacing_; }
  const std::vector<std::uint8_t>& voxels() const noexcept { return voxels_; }
  std::size_t size() const noexcept { return voxels_.size(); }

  std::size_t index(std::size_t x, std::size_t y, std::size_t z) const noexcept {
    return x + dims_[0] * (y + dims_[1] * z);
  }
  bool at(std::size_t x, std::size_t y, std::size_t z) const noexcept { return voxels_[index(x, y, z)] != 0; }
  void set(std::size_t x, std::size_t y, std::size_t z, bool on) noexcept { voxels_[index(x, y, z)] = on ? 1 : 0; }

  std::size_t count() const noexcept;

  bool operator==(const VoxelMask& other) const = default;

 private:
  Dims dims_{0, 0, 0};
  Spacing spacing_{1.0, 1.0, 1.0};
  std::vector<std::uint8_t> voxels_;
};

}  // namespace rankaudit
