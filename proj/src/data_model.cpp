#include "rankaudit/data_model.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "rankaudit/error.hpp"

namespace rankaudit {

std::string_view to_string(MetricKind kind) {
  return kind == MetricKind::DSC ? "DSC" : "NSD";
}

MetricKind parse_metric_kind(std::string_view text) {
  if (text == "DSC") return MetricKind::DSC;
  if (text == "NSD") return MetricKind::NSD;
  throw ValidationError(fmt::format("unknown metric '{}' (expected DSC or NSD)", text));
}

std::size_t ScoreTable::Builder::intern(std::vector<std::string>& ids,
                                        std::map<std::string, std::size_t, std::less<>>& index,
                                        std::string_view id) {
  if (auto it = index.find(id); it != index.end()) return it->second;
  const std::size_t next = ids.size();
  ids.emplace_back(id);
  index.emplace(std::string(id), next);
  return next;
}

ScoreTable::Builder& ScoreTable::Builder::set(std::string_view method, std::string_view case_id,
                                              std::string_view target, MetricKind metric,
                                              std::optional<double> score) {
  if (method.empty() || case_id.empty() || target.empty()) {
    throw ValidationError("empty method, case or target identifier");
  }
  if (score && !(std::isfinite(*score) && *score >= 0.0 && *score <= 1.0)) {
    throw ValidationError(fmt::format("score {} for ({}, {}, {}, {}) is outside [0, 1]", *score, method,
                                      case_id, target, to_string(metric)));
  }
  const Key key{intern(methods_, method_index_, method), intern(cases_, case_index_, case_id),
                intern(targets_, target_index_, target), metric};
  if (!cells_.emplace(key, score).second) {
    throw ValidationError(
        fmt::format("duplicate key ({}, {}, {}, {})", method, case_id, target, to_string(metric)));
  }
  return *this;
}

ScoreTable::Builder& ScoreTable::Builder::set_family(std::string_view method, std::string_view family) {
  auto [it, inserted] = families_.emplace(std::string(method), std::string(family));
  if (!inserted && it->second != family) {
    throw ValidationError(
        fmt::format("method '{}' has conflicting families '{}' and '{}'", method, it->second, family));
  }
  return *this;
}

ScoreTable ScoreTable::Builder::build() const {
  ScoreTable table;
  // Identifiers are stored sorted so that aggregates never depend on the
  // order rows arrived in.
  auto canonical = [](const std::map<std::string, std::size_t, std::less<>>& index, std::vector<std::string>& ids,
                      std::map<std::string, std::size_t, std::less<>>& out_index) {
    std::vector<std::size_t> remap(index.size());
    for (const auto& [id, old] : index) {
      remap[old] = ids.size();
      out_index.emplace(id, ids.size());
      ids.push_back(id);
    }
    return remap;
  };
  const auto m_map = canonical(method_index_, table.methods_, table.method_index_);
  const auto c_map = canonical(case_index_, table.cases_, table.case_index_);
  const auto t_map = canonical(target_index_, table.targets_, table.target_index_);
  for (const auto& [method, family] : families_) {
    if (method_index_.count(method) != 0) table.families_.emplace(method, family);
  }

  const std::size_t cells = methods_.size() * cases_.size() * targets_.size() * 2;
  table.values_.assign(cells, 0.0);
  table.state_.assign(cells, CellState::Absent);
  for (const auto& [key, score] : cells_) {
    const auto& [m, c, t, metric] = key;
    const std::size_t i = table.flat(m_map[m], c_map[c], t_map[t], metric);
    if (score) {
      table.values_[i] = *score;
      table.state_[i] = CellState::Present;
      ++table.present_;
    } else {
      table.state_[i] = CellState::Missing;
      ++table.missing_;
    }
  }
  return table;
}

namespace {

template <typename Index>
std::optional<std::size_t> find_index(const Index& index, std::string_view id) {
  if (auto it = index.find(id); it != index.end()) return it->second;
  return std::nullopt;
}

}  // namespace

std::optional<std::size_t> ScoreTable::method_index(std::string_view id) const {
  return find_index(method_index_, id);
}
std::optional<std::size_t> ScoreTable::case_index(std::string_view id) const {
  return find_index(case_index_, id);
}
std::optional<std::size_t> ScoreTable::target_index(std::string_view id) const {
  return find_index(target_index_, id);
}

std::optional<std::string> ScoreTable::family(std::string_view method) const {
  if (auto it = families_.find(std::string(method)); it != families_.end()) return it->second;
  return std::nullopt;
}

std::optional<double> ScoreTable::score(std::string_view method, std::string_view case_id,
                                        std::string_view target, MetricKind metric) const {
  const auto m = method_index(method);
  const auto c = case_index(case_id);
  const auto t = target_index(target);
  if (!m || !c || !t) return std::nullopt;
  return score(*m, *c, *t, metric);
}

DemographicTable::DemographicTable(std::vector<std::string> attributes) : attributes_(std::move(attributes)) {
  std::vector<std::string> sorted = attributes_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ValidationError("duplicate demographic attribute name");
  }
}

void DemographicTable::add_record(std::string_view case_id, std::vector<std::string> values) {
  if (case_id.empty()) throw ValidationError("empty case id");
  if (values.size() != attributes_.size()) {
    throw ValidationError(fmt::format("case '{}' has {} values for {} attributes", case_id, values.size(),
                                      attributes_.size()));
  }
  if (records_.find(case_id) != records_.end()) {
    throw ValidationError(fmt::format("duplicate case id '{}'", case_id));
  }
  for (auto& v : values) {
    if (v.empty()) v = std::string(kUnknown);
  }
  cases_.emplace_back(case_id);
  records_.emplace(std::string(case_id), std::move(values));
}

bool DemographicTable::contains(std::string_view case_id) const {
  return records_.find(case_id) != records_.end();
}

const std::vector<std::string>& DemographicTable::record(std::string_view case_id) const {
  auto it = records_.find(case_id);
  if (it == records_.end()) throw LookupError(fmt::format("unknown case '{}'", case_id));
  return it->second;
}

const std::string& DemographicTable::value(std::string_view case_id, std::string_view attribute) const {
  const auto& rec = record(case_id);
  auto it = std::find(attributes_.begin(), attributes_.end(), attribute);
  if (it == attributes_.end()) throw LookupError(fmt::format("unknown attribute '{}'", attribute));
  return rec[static_cast<std::size_t>(it - attributes_.begin())];
}

namespace {

void validate_geometry(const Dims& dims, const Spacing& spacing) {
  for (std::size_t a = 0; a < 3; ++a) {
    if (dims[a] == 0) throw ValidationError("mask dims must be positive");
    if (!(std::isfinite(spacing[a]) && spacing[a] > 0.0)) {
      throw ValidationError(fmt::format("mask spacing must be positive and finite, got {}", spacing[a]));
    }
  }
}

}  // namespace

VoxelMask::VoxelMask(Dims dims, Spacing spacing) : dims_(dims), spacing_(spacing) {
  validate_geometry(dims_, spacing_);
  voxels_.assign(dims_[0] * dims_[1] * dims_[2], 0);
}

VoxelMask::VoxelMask(Dims dims, Spacing spacing, std::vector<std::uint8_t> voxels)
    : dims_(dims), spacing_(spacing), voxels_(std::move(voxels)) {
  validate_geometry(dims_, spacing_);
  const std::size_t expected = dims_[0] * dims_[1] * dims_[2];
  if (voxels_.size() != expected) {
    throw FormatError(fmt::format("mask has {} voxels, dims require {}", voxels_.size(), expected));
  }
  for (std::size_t i = 0; i < voxels_.size(); ++i) {
    if (voxels_[i] > 1) throw FormatError(fmt::format("byte {} has value {} (expected 0 or 1)", i, voxels_[i]));
  }
}

std::size_t VoxelMask::count() const noexcept {
  return static_cast<std::size_t>(std::count(voxels_.begin(), voxels_.end(), std::uint8_t{1}));
}

}  // namespace rankaudit
