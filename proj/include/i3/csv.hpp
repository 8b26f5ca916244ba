#pragma once

// Minimal RFC 4180 style reader/writer shared by the corpus, events and
// report code. Quoted fields may contain commas, doubled quotes and newlines.

#include <charconv>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "i3/error.hpp"

namespace i3::csv {

struct Row {
  std::size_t line = 0;  // 1-based physical line where the record starts
  std::vector<std::string> fields;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  /// Reads the next non-blank record. Returns false at end of input.
  bool next(Row& row) {
    row.fields.clear();
    std::string line;
    while (true) {
      if (!std::getline(in_, line)) return false;
      ++line_no_;
      strip_cr(line);
      if (line_no_ == 1) strip_bom(line);
      if (!line.empty()) break;
    }
    row.line = line_no_;

    std::string field;
    bool quoted = false;
    std::size_t i = 0;
    while (true) {
      if (i == line.size()) {
        if (quoted) {
          // record continues on the next physical line
          std::string more;
          if (!std::getline(in_, more)) {
            throw InputError("unterminated quoted field starting at line " +
                                     std::to_string(row.line));
          }
          ++line_no_;
          strip_cr(more);
          field.push_back('\n');
          line = std::move(more);
          i = 0;
          continue;
        }
        row.fields.push_back(std::move(field));
        return true;
      }
      const char c = line[i];
      if (quoted) {
        if (c == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            field.push_back('"');
            ++i;
          } else {
            quoted = false;
          }
        } else {
          field.push_back(c);
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        row.fields.push_back(std::move(field));
        field.clear();
      } else {
        field.push_back(c);
      }
      ++i;
    }
  }

 private:
  static void strip_cr(std::string& s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
  }
  static void strip_bom(std::string& s) {
    if (s.rfind("\xEF\xBB\xBF", 0) == 0) s.erase(0, 3);
  }

  std::istream& in_;
  std::size_t line_no_ = 0;
};

inline std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << escape(fields[i]);
  }
  out << '\n';
}

/// Strict base-10 integer parse; the whole field must be consumed.
inline std::optional<std::int64_t> parse_int(std::string_view s) {
  std::int64_t v = 0;
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::optional<double> parse_real(std::string_view s) {
  double v = 0;
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

/// Locale-independent "%.6g" style formatting.
inline std::string format_g6(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 6);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace i3::csv
