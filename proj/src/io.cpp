#include "rankaudit/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>

#include <fmt/format.h>

#include "rankaudit/error.hpp"
#include "rankaudit/structured_text.hpp"

namespace rankaudit {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::ifstream open_input(const std::filesystem::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw ValidationError(fmt::format("cannot open '{}'", path.string()));
  return in;
}

std::ofstream open_output(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw ValidationError(fmt::format("cannot write '{}'", path.string()));
  return out;
}

double parse_score(std::string_view text, std::size_t line) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw ParseError(line, fmt::format("score '{}' is not a decimal number", text));
  }
  return value;
}

}  // namespace

std::size_t DelimitedFile::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return std::string::npos;
}

std::vector<std::string> split_delimited(std::string_view line, char delimiter, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current += c;
      }
    } else if (c == '"' && trim(current).empty()) {
      quoted = true;
      was_quoted = true;
      current.clear();
    } else if (c == delimiter) {
      fields.emplace_back(was_quoted ? current : std::string(trim(current)));
      current.clear();
      was_quoted = false;
    } else {
      current += c;
    }
  }
  if (quoted) throw ParseError(line_no, "unterminated quoted field");
  fields.emplace_back(was_quoted ? current : std::string(trim(current)));
  return fields;
}

std::string escape_field(std::string_view field, char delimiter) {
  if (field.find_first_of(std::string{delimiter, '"', '\n', '\r'}) == std::string_view::npos &&
      trim(field).size() == field.size()) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

DelimitedFile read_delimited(const std::filesystem::path& path, char delimiter) {
  auto in = open_input(path);
  DelimitedFile file;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    auto fields = split_delimited(line, delimiter, line_no);
    if (!have_header) {
      file.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != file.header.size()) {
      throw ParseError(line_no, fmt::format("expected {} columns, found {}", file.header.size(), fields.size()));
    }
    file.rows.push_back({line_no, std::move(fields)});
  }
  if (!have_header) throw ParseError(line_no, fmt::format("'{}' has no header row", path.string()));
  return file;
}

ScoreTable load_score_table(const std::filesystem::path& path, const ScoreSchema& schema) {
  const DelimitedFile file = read_delimited(path, schema.delimiter);
  auto require = [&](const std::string& name) {
    const std::size_t col = file.column(name);
    if (col == std::string::npos) throw ParseError(1, fmt::format("missing required column '{}'", name));
    return col;
  };
  const std::size_t c_method = require(schema.method);
  const std::size_t c_case = require(schema.case_id);
  const std::size_t c_target = require(schema.target);
  const std::size_t c_metric = require(schema.metric);
  const std::size_t c_score = require(schema.score);
  const std::size_t c_family = file.column(schema.family);

  ScoreTable::Builder builder;
  for (const auto& row : file.rows) {
    const auto& f = row.fields;
    try {
      const MetricKind metric = parse_metric_kind(f[c_metric]);
      std::optional<double> score;
      if (!f[c_score].empty()) score = parse_score(f[c_score], row.line);
      builder.set(f[c_method], f[c_case], f[c_target], metric, score);
      if (c_family != std::string::npos && !f[c_family].empty()) builder.set_family(f[c_method], f[c_family]);
    } catch (const ParseError&) {
      throw;
    } catch (const ValidationError& e) {
      throw ValidationError(fmt::format("{}: line {}: {}", path.string(), row.line, e.what()));
    }
  }
  return builder.build();
}

void write_score_table(const ScoreTable& table, const std::filesystem::path& path, const ScoreSchema& schema) {
  auto out = open_output(path);
  const char d = schema.delimiter;
  const bool with_family = !table.families().empty();
  out << escape_field(schema.method, d) << d << escape_field(schema.case_id, d) << d
      << escape_field(schema.target, d) << d << escape_field(schema.metric, d) << d
      << escape_field(schema.score, d);
  if (with_family) out << d << escape_field(schema.family, d);
  out << '\n';
  for (std::size_t m = 0; m < table.methods().size(); ++m) {
    const std::string family = table.family(table.methods()[m]).value_or("");
    for (std::size_t c = 0; c < table.cases().size(); ++c) {
      for (std::size_t t = 0; t < table.targets().size(); ++t) {
        for (MetricKind k : kAllMetrics) {
          const auto state = table.state(m, c, t, k);
          if (state == ScoreTable::CellState::Absent) continue;
          out << escape_field(table.methods()[m], d) << d << escape_field(table.cases()[c], d) << d
              << escape_field(table.targets()[t], d) << d << to_string(k) << d;
          if (state == ScoreTable::CellState::Present) out << fmt::format("{}", *table.score(m, c, t, k));
          if (with_family) out << d << escape_field(family, d);
          out << '\n';
        }
      }
    }
  }
}

DemographicTable load_demographics(const std::filesystem::path& path, char delimiter) {
  const DelimitedFile file = read_delimited(path, delimiter);
  if (file.header.empty() || file.header.front().empty()) {
    throw ParseError(1, "demographics header must start with the case column");
  }
  std::vector<std::string> attributes(file.header.begin() + 1, file.header.end());
  DemographicTable table(std::move(attributes));
  for (const auto& row : file.rows) {
    std::vector<std::string> values(row.fields.begin() + 1, row.fields.end());
    try {
      table.add_record(row.fields.front(), std::move(values));
    } catch (const ValidationError& e) {
      throw ValidationError(fmt::format("{}: line {}: {}", path.string(), row.line, e.what()));
    }
  }
  return table;
}

void write_demographics(const DemographicTable& table, const std::filesystem::path& path, char delimiter) {
  auto out = open_output(path);
  out << "case";
  for (const auto& a : table.attributes()) out << delimiter << escape_field(a, delimiter);
  out << '\n';
  for (const auto& c : table.cases()) {
    out << escape_field(c, delimiter);
    for (const auto& v : table.record(c)) out << delimiter << escape_field(v, delimiter);
    out << '\n';
  }
}

VoxelMask load_mask(const std::filesystem::path& header_path) {
  const StDocument doc = load_structured_text(header_path.string());
  auto require = [&](std::string_view key) -> const StValue& {
    const StEntry* e = doc.find(key);
    if (e == nullptr) throw FormatError(fmt::format("{}: missing key '{}'", header_path.string(), key));
    return e->value;
  };
  const std::vector<double> dims_raw = require("dims").as_numbers("dims");
  const std::vector<double> spacing_raw = require("spacing_mm").as_numbers("spacing_mm");
  const std::string& data_file = require("data_file").as_string("data_file");
  if (dims_raw.size() != 3 || spacing_raw.size() != 3) {
    throw FormatError(fmt::format("{}: dims and spacing_mm need three entries", header_path.string()));
  }
  Dims dims{};
  Spacing spacing{};
  for (std::size_t a = 0; a < 3; ++a) {
    if (!(dims_raw[a] >= 1.0) || dims_raw[a] != std::floor(dims_raw[a]) || dims_raw[a] > 1e9) {
      throw ValidationError(fmt::format("{}: dims must be positive integers", header_path.string()));
    }
    dims[a] = static_cast<std::size_t>(dims_raw[a]);
    spacing[a] = spacing_raw[a];
  }

  const auto raw_path = header_path.parent_path() / data_file;
  auto in = open_input(raw_path, std::ios::binary);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::size_t expected = dims[0] * dims[1] * dims[2];
  if (bytes.size() != expected) {
    throw FormatError(fmt::format("{}: {} bytes, dims {}x{}x{} require {}", raw_path.string(), bytes.size(),
                                  dims[0], dims[1], dims[2], expected));
  }
  try {
    return VoxelMask(dims, spacing, std::move(bytes));
  } catch (const FormatError& e) {
    throw FormatError(fmt::format("{}: {}", raw_path.string(), e.what()));
  } catch (const ValidationError& e) {
    throw ValidationError(fmt::format("{}: {}", header_path.string(), e.what()));
  }
}

void write_mask(const VoxelMask& mask, const std::filesystem::path& header_path, const std::string& data_file) {
  {
    auto out = open_output(header_path);
    const auto& d = mask.dims();
    const auto& s = mask.spacing();
    out << fmt::format("dims = [{}, {}, {}]\n", d[0], d[1], d[2]);
    out << fmt::format("spacing_mm = [{}, {}, {}]\n", s[0], s[1], s[2]);
    out << "data_file = " << quote_string(data_file) << '\n';
  }
  auto raw = open_output(header_path.parent_path() / data_file, std::ios::binary);
  raw.write(reinterpret_cast<const char*>(mask.voxels().data()), static_cast<std::streamsize>(mask.size()));
}

}  // namespace rankaudit
