#include "rankaudit/structured_text.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "rankaudit/error.hpp"

namespace rankaudit {

const StValue* StValue::find(std::string_view key) const {
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (keys[i] == key) return &items[i];
  }
  return nullptr;
}

const std::string& StValue::as_string(std::string_view what) const {
  if (kind != Kind::String) throw ConfigError(fmt::format("{}: expected a quoted string", what));
  return text;
}

double StValue::as_number(std::string_view what) const {
  if (kind != Kind::Number) throw ConfigError(fmt::format("{}: expected a number", what));
  return number;
}

bool StValue::as_bool(std::string_view what) const {
  if (kind != Kind::Bool) throw ConfigError(fmt::format("{}: expected true or false", what));
  return boolean;
}

std::vector<double> StValue::as_numbers(std::string_view what) const {
  if (kind != Kind::Array) throw ConfigError(fmt::format("{}: expected an array of numbers", what));
  std::vector<double> out;
  out.reserve(items.size());
  for (const auto& item : items) out.push_back(item.as_number(what));
  return out;
}

const StEntry* StDocument::find(std::string_view key) const {
  for (const auto& e : entries) {
    if (e.key == key) return &e;
  }
  return nullptr;
}

namespace {

class LineParser {
 public:
  LineParser(std::string_view s, std::size_t line) : s_(s), line_(line) {}

  StEntry entry() {
    StEntry e;
    e.line = line_;
    e.key = key();
    skip_ws();
    expect('=');
    e.value = value();
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] != '#') fail("trailing characters");
    return e;
  }

 private:
  [[noreturn]] void fail(std::string_view what) const {
    throw ConfigError(fmt::format("line {}: {} at column {}", line_, what, pos_ + 1));
  }

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= s_.size() || s_[pos_] != c) fail(fmt::format("expected '{}'", c));
    ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < s_.size() && s_[pos_] == c;
  }

  std::string key() {
    skip_ws();
    if (peek('"')) return quoted();
    const std::size_t start = pos_;
    while (pos_ < s_.size()) {
      const char c = s_[pos_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.') {
        ++pos_;
      } else {
        break;
      }
    }
    if (pos_ == start) fail("expected a key");
    return std::string(s_.substr(start, pos_ - start));
  }

  std::string quoted() {
    expect('"');
    std::string out;
    while (true) {
      if (pos_ >= s_.size()) fail("unterminated string");
      const char c = s_[pos_++];
      if (c == '"') break;
      if (c == '\\') {
        if (pos_ >= s_.size()) fail("unterminated escape");
        const char e = s_[pos_++];
        switch (e) {
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          default: fail("unsupported escape");
        }
      } else {
        out += c;
      }
    }
    return out;
  }

  StValue value() {
    skip_ws();
    if (pos_ >= s_.size()) fail("missing value");
    StValue v;
    const char c = s_[pos_];
    if (c == '"') {
      v.kind = StValue::Kind::String;
      v.text = quoted();
    } else if (c == '[') {
      v.kind = StValue::Kind::Array;
      ++pos_;
      if (!peek(']')) {
        while (true) {
          v.items.push_back(value());
          if (peek(',')) {
            ++pos_;
            if (peek(']')) break;
            continue;
          }
          break;
        }
      }
      expect(']');
    } else if (c == '{') {
      v.kind = StValue::Kind::Table;
      ++pos_;
      if (!peek('}')) {
        while (true) {
          std::string k = key();
          if (v.find(k) != nullptr) fail(fmt::format("duplicate key '{}'", k));
          expect('=');
          v.keys.push_back(std::move(k));
          v.items.push_back(value());
          if (peek(',')) {
            ++pos_;
            continue;
          }
          break;
        }
      }
      expect('}');
    } else if (s_.substr(pos_, 4) == "true") {
      v.kind = StValue::Kind::Bool;
      v.boolean = true;
      pos_ += 4;
    } else if (s_.substr(pos_, 5) == "false") {
      v.kind = StValue::Kind::Bool;
      v.boolean = false;
      pos_ += 5;
    } else {
      const std::size_t start = pos_;
      while (pos_ < s_.size()) {
        const char d = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(d)) || d == '+' || d == '-' || d == '.' || d == 'e' ||
            d == 'E' || d == '_') {
          ++pos_;
        } else {
          break;
        }
      }
      std::string digits;
      for (char d : s_.substr(start, pos_ - start)) {
        if (d != '_') digits += d;
      }
      if (digits.empty()) fail("expected a value");
      char* end = nullptr;
      v.kind = StValue::Kind::Number;
      v.number = std::strtod(digits.c_str(), &end);
      if (end != digits.c_str() + digits.size()) fail(fmt::format("invalid number '{}'", digits));
    }
    return v;
  }

  std::string_view s_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

}  // namespace

StDocument parse_structured_text(std::string_view text) {
  StDocument doc;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::size_t first = line.find_first_not_of(" \t");
    if (first != std::string_view::npos && line[first] != '#') {
      StEntry e = LineParser(line, line_no).entry();
      if (doc.find(e.key) != nullptr) {
        throw ConfigError(fmt::format("line {}: duplicate key '{}'", line_no, e.key));
      }
      doc.entries.push_back(std::move(e));
    }
    if (end == text.size()) break;
    start = end + 1;
  }
  return doc;
}

StDocument load_structured_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot open '{}'", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_structured_text(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", path, e.what()));
  }
}

std::string quote_string(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

}  // namespace rankaudit
