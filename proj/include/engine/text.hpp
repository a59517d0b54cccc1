#ifndef ENGINE_TEXT_HPP
#define ENGINE_TEXT_HPP

#include <charconv>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

// Shared tokenizer for the line-oriented formats (event wire protocol,
// weather feed, rule/profile/registry files, config files, command lists).
// A line is a sequence of whitespace-separated tokens; each token is either
// a bare word or key=value. Values may mix quoted and unquoted runs; quoted
// runs understand the escapes \" \\ \n \t.

namespace engine::text {

struct token {
  std::string key;    // empty for a bare word
  std::string value;  // word text, or the (unescaped) value
};

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

namespace detail {

inline std::string read_quoted(std::string_view s, std::size_t& i) {
  std::string out;
  ++i;  // opening quote
  while (i < s.size() && s[i] != '"') {
    char c = s[i];
    if (c == '\\') {
      if (i + 1 >= s.size()) throw std::runtime_error("dangling escape");
      char e = s[++i];
      switch (e) {
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        default: throw std::runtime_error(std::string("bad escape \\") + e);
      }
    } else {
      out.push_back(c);
    }
    ++i;
  }
  if (i >= s.size()) throw std::runtime_error("unterminated quote");
  ++i;  // closing quote
  return out;
}

}  // namespace detail

// Splits one line into tokens. Throws std::runtime_error on quoting errors.
inline std::vector<token> split_line(std::string_view line) {
  std::vector<token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    if (i >= line.size()) break;
    std::string head;
    bool has_key = false;
    // Read up to '=', whitespace, or quote.
    while (i < line.size() && !is_space(line[i]) && line[i] != '=' && line[i] != '"') {
      head.push_back(line[i++]);
    }
    if (i < line.size() && line[i] == '=') {
      has_key = true;
      ++i;
    }
    std::string value;
    if (has_key) {
      while (i < line.size() && !is_space(line[i])) {
        if (line[i] == '"') {
          value += detail::read_quoted(line, i);
        } else {
          value.push_back(line[i++]);
        }
      }
    } else if (i < line.size() && line[i] == '"') {
      // Bare quoted word.
      value = head + detail::read_quoted(line, i);
      head.clear();
    } else {
      value = head;
      head.clear();
    }
    out.push_back(token{has_key ? std::move(head) : std::string{}, std::move(value)});
  }
  return out;
}

// Escapes and double-quotes a string for the line formats.
inline std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  out.push_back('"');
  return out;
}

inline std::optional<std::int64_t> to_int64(std::string_view s) {
  std::int64_t v = 0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [p, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || p != last) return std::nullopt;
  return v;
}

inline std::optional<double> to_double(std::string_view s) {
  double v = 0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [p, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || p != last) return std::nullopt;
  return v;
}

// Splits on a separator with no quoting rules. Empty fields are preserved.
inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.emplace_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

// True when the line carries no record: blank or a '#' comment.
inline bool is_blank_or_comment(std::string_view line) {
  for (char c : line) {
    if (c == '#') return true;
    if (!is_space(c)) return false;
  }
  return true;
}

}  // namespace engine::text

#endif  // ENGINE_TEXT_HPP
