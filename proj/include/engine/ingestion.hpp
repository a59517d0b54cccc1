#ifndef ENGINE_INGESTION_HPP
#define ENGINE_INGESTION_HPP

#include <cctype>
#include <cstdint>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "engine/errors.hpp"
#include "engine/invariant.hpp"
#include "engine/text.hpp"

// Conversion of external feeds into model terms: weather cells become
// time-guarded occupancy invariants, wall-clock timestamps become ticks.

namespace engine {

// One observed weather cell on the model grid.
// Line format: wx t=<int> kind=<word> box=<x1>,<y1>,<x2>,<y2> [intensity=<0..1>]
struct weather_cell {
  tick at = 0;
  std::string kind;  // owner label, e.g. "cloud"
  box area;
  double intensity = 1.0;  // in [0, 1]; carried through, unused by coverage

  bool operator==(const weather_cell&) const = default;
};

struct weather_feed_result {
  std::vector<weather_cell> cells;
  std::size_t skipped = 0;                // malformed record lines
  std::vector<std::string> skip_reasons;  // one per skipped line, for logging
};

namespace detail {

inline weather_cell parse_weather_line(std::string_view line) {
  std::vector<text::token> tokens = text::split_line(line);
  if (tokens.empty() || !tokens[0].key.empty() || tokens[0].value != "wx") {
    throw std::runtime_error("not a weather line");
  }
  weather_cell cell;
  bool have_t = false, have_kind = false, have_box = false;
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    const text::token& tok = tokens[i];
    if (tok.key == "t") {
      auto v = text::to_int64(tok.value);
      if (!v) throw std::runtime_error("invalid t");
      cell.at = *v;
      have_t = true;
    } else if (tok.key == "kind") {
      cell.kind = tok.value;
      have_kind = true;
    } else if (tok.key == "box") {
      std::vector<std::string> parts = text::split(tok.value, ',');
      if (parts.size() != 4) throw std::runtime_error("box needs 4 coordinates");
      std::int64_t c[4];
      for (int j = 0; j < 4; ++j) {
        auto v = text::to_int64(parts[j]);
        if (!v) throw std::runtime_error("invalid box coordinate");
        c[j] = *v;
      }
      cell.area = box(c[0], c[1], c[2], c[3]);
      have_box = true;
    } else if (tok.key == "intensity") {
      auto v = text::to_double(tok.value);
      if (!v || *v < 0.0 || *v > 1.0) throw std::runtime_error("intensity out of [0,1]");
      cell.intensity = *v;
    } else {
      throw std::runtime_error("unknown key \"" + tok.key + "\"");
    }
  }
  if (!have_t) throw std::runtime_error("missing t");
  if (!have_kind || cell.kind.empty()) throw std::runtime_error("missing kind");
  if (!have_box) throw std::runtime_error("missing box");
  return cell;
}

}  // namespace detail

// Skip-and-count policy: malformed record lines never abort the feed.
// Blank and '#' comment lines are not records and are ignored.
inline weather_feed_result parse_weather_feed(std::istream& in) {
  weather_feed_result result;
  std::string line;
  while (std::getline(in, line)) {
    if (text::is_blank_or_comment(line)) continue;
    try {
      result.cells.push_back(detail::parse_weather_line(line));
    } catch (const std::exception& e) {
      result.skipped += 1;
      result.skip_reasons.push_back(e.what());
    }
  }
  return result;
}

// Each cell is assumed valid from its tick until the next expected feed:
// IMPLIES(AND(TimeInterval(t, t+horizon-1), Owner(kind)), OccupyBox(...)).
inline std::vector<invariant> cells_to_invariants(const std::vector<weather_cell>& cells,
                                                  tick horizon_ticks) {
  if (horizon_ticks < 1) throw precondition_error("horizon_ticks must be >= 1");
  std::vector<invariant> out;
  out.reserve(cells.size());
  for (const weather_cell& cell : cells) {
    out.push_back(invariant::implication(
        invariant::conjunction(
            invariant::time_interval(cell.at, cell.at + horizon_ticks - 1),
            invariant::owner_atom(cell.kind)),
        invariant::occupy_box(cell.area)));
  }
  return out;
}

// ── wall-clock mapping ──────────────────────────────────────────────────────

namespace detail {

// Days since 1970-01-01 for a civil date (proleptic Gregorian).
inline std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline bool leap_year(std::int64_t y) {
  return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

inline unsigned days_in_month(std::int64_t y, unsigned m) {
  static constexpr unsigned lengths[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m == 2 && leap_year(y)) return 29;
  return lengths[m - 1];
}

// Parses ISO-8601 timestamps of the form YYYY-MM-DDThh:mm:ss with an
// optional fractional part (truncated) and a Z or +hh:mm offset. Returns
// seconds since the Unix epoch.
inline std::int64_t parse_iso8601_utc(std::string_view s) {
  const std::string original(s);
  auto fail = [&original]() -> std::int64_t { throw timestamp_error(original); };

  std::size_t i = 0;
  auto digits = [&](int n) -> std::int64_t {
    std::int64_t v = 0;
    for (int k = 0; k < n; ++k) {
      if (i >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i]))) fail();
      v = v * 10 + (s[i++] - '0');
    }
    return v;
  };
  auto expect = [&](char c) {
    if (i >= s.size() || s[i] != c) fail();
    ++i;
  };

  const std::int64_t year = digits(4);
  expect('-');
  const std::int64_t month = digits(2);
  expect('-');
  const std::int64_t day = digits(2);
  if (i >= s.size() || (s[i] != 'T' && s[i] != 't' && s[i] != ' ')) fail();
  ++i;
  const std::int64_t hour = digits(2);
  expect(':');
  const std::int64_t minute = digits(2);
  expect(':');
  const std::int64_t second = digits(2);

  if (month < 1 || month > 12) fail();
  if (day < 1 || day > days_in_month(year, static_cast<unsigned>(month))) fail();
  if (hour > 23 || minute > 59 || second > 59) fail();

  // Fractional seconds truncate toward the preceding whole second.
  if (i < s.size() && s[i] == '.') {
    ++i;
    if (i >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i]))) fail();
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  }

  std::int64_t offset_seconds = 0;
  if (i < s.size() && (s[i] == 'Z' || s[i] == 'z')) {
    ++i;
  } else if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
    const int sign = s[i] == '+' ? 1 : -1;
    ++i;
    const std::int64_t oh = digits(2);
    expect(':');
    const std::int64_t om = digits(2);
    if (oh > 23 || om > 59) fail();
    offset_seconds = sign * (oh * 3600 + om * 60);
  } else {
    fail();
  }
  if (i != s.size()) fail();

  const std::int64_t days =
      days_from_civil(year, static_cast<unsigned>(month), static_cast<unsigned>(day));
  return days * 86400 + hour * 3600 + minute * 60 + second - offset_seconds;
}

}  // namespace detail

// floor((timestamp - epoch) / tick_seconds); ticks may be negative for
// pre-epoch data.
inline tick tick_from_wall_clock(std::string_view iso_timestamp, std::string_view epoch,
                                 std::int64_t tick_seconds) {
  if (tick_seconds < 1) throw precondition_error("tick_seconds must be >= 1");
  const std::int64_t ts = detail::parse_iso8601_utc(iso_timestamp);
  const std::int64_t ep = detail::parse_iso8601_utc(epoch);
  std::int64_t diff = ts - ep;
  std::int64_t q = diff / tick_seconds;
  if (diff % tick_seconds != 0 && diff < 0) --q;  // floor, not trunc
  return q;
}

}  // namespace engine

#endif  // ENGINE_INGESTION_HPP
