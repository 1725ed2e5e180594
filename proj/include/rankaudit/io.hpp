#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "rankaudit/data_model.hpp"

namespace rankaudit {

// Column names of a score file. Columns are located by header name, so
// extra columns are ignored. The family column is optional.
struct ScoreSchema {
  std::string method = "method";
  std::string case_id = "case";
  std::string target = "target";
  std::string metric = "metric";
  std::string score = "score";
  std::string family = "family";
  char delimiter = ',';
};

struct DelimitedRow {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

struct DelimitedFile {
  std::vector<std::string> header;
  std::vector<DelimitedRow> rows;

  // Index of a header column, or npos.
  std::size_t column(std::string_view name) const;
};

// Splits one record. Double-quoted fields may contain the delimiter and
// doubled quotes. Throws ParseError on an unterminated quote.
std::vector<std::string> split_delimited(std::string_view line, char delimiter, std::size_t line_no);
// Reads a header plus rows, skipping blank lines. Throws ParseError for rows
// whose field count differs from the header.
DelimitedFile read_delimited(const std::filesystem::path& path, char delimiter = ',');
std::string escape_field(std::string_view field, char delimiter = ',');

ScoreTable load_score_table(const std::filesystem::path& path, const ScoreSchema& schema = {});
void write_score_table(const ScoreTable& table, const std::filesystem::path& path,
                       const ScoreSchema& schema = {});

// First column is the case id; remaining columns are attributes.
DemographicTable load_demographics(const std::filesystem::path& path, char delimiter = ',');
void write_demographics(const DemographicTable& table, const std::filesystem::path& path,
                        char delimiter = ',');

// Header keys: dims = [nx, ny, nz], spacing_mm = [sx, sy, sz],
// data_file = "<raw file relative to the header>".
VoxelMask load_mask(const std::filesystem::path& header_path);
// Writes the header and a sibling raw file named `data_file`.
void write_mask(const VoxelMask& mask, const std::filesystem::path& header_path, const std::string& data_file);

}  // namespace rankaudit
