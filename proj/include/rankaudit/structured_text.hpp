#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rankaudit {

// A TOML subset sufficient for mask headers, metric policies and run
// configs: one `key = value` per line, `#` comments, values are quoted
// strings, numbers, booleans, flat arrays `[...]` and inline tables `{...}`.
struct StValue {
  enum class Kind { String, Number, Bool, Array, Table };

  Kind kind = Kind::String;
  std::string text;
  double number = 0.0;
  bool boolean = false;
  std::vector<StValue> items;      // Array elements, or Table values
  std::vector<std::string> keys;   // Table keys, parallel to items

  const StValue* find(std::string_view key) const;

  // Typed accessors throw ConfigError naming `what` on a kind mismatch.
  const std::string& as_string(std::string_view what) const;
  double as_number(std::string_view what) const;
  bool as_bool(std::string_view what) const;
  std::vector<double> as_numbers(std::string_view what) const;
};

struct StEntry {
  std::string key;
  StValue value;
  std::size_t line = 0;
};

struct StDocument {
  std::vector<StEntry> entries;

  const StEntry* find(std::string_view key) const;
};

// Throws ConfigError with the line number on any syntax error or duplicate key.
StDocument parse_structured_text(std::string_view text);
StDocument load_structured_text(const std::string& path);

// Quote and escape for writing.
std::string quote_string(std::string_view s);

}  // namespace rankaudit
