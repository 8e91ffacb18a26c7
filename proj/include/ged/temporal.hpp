#pragma once

// Interaction logs, timeframe windowing and per-frame snapshot networks.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ged/error.hpp"

namespace ged {

using NodeId = std::uint64_t;

/// Calendar day, stored as days since 1970-01-01. Finer timestamps are
/// truncated to the day they fall on.
struct Day {
  std::int64_t value = 0;

  friend constexpr auto operator<=>(Day, Day) = default;
  friend constexpr Day operator+(Day d, std::int64_t n) { return Day{d.value + n}; }
  friend constexpr Day operator-(Day d, std::int64_t n) { return Day{d.value - n}; }
  friend constexpr std::int64_t operator-(Day a, Day b) { return a.value - b.value; }
};

inline Day day_from_civil(int y, unsigned m, unsigned d) {
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{m}, std::chrono::day{d}};
  return Day{sys_days{ymd}.time_since_epoch().count()};
}

inline Day day_from_epoch_seconds(std::int64_t seconds) {
  // floor division so that pre-1970 instants land on the right day
  std::int64_t q = seconds / 86400;
  if (seconds % 86400 != 0 && seconds < 0) --q;
  return Day{q};
}

inline std::string to_iso(Day d) {
  using namespace std::chrono;
  const year_month_day ymd{sys_days{days{d.value}}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char delim) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(delim, pos);
    out.push_back(trim(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

template <typename Int>
std::optional<Int> parse_int(std::string_view s) {
  Int v{};
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::optional<double> parse_double(std::string_view s) {
  double v{};
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

// Shortest representation that round-trips; keeps text outputs byte-stable.
inline std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace detail

enum class TimestampFormat { Auto, IsoDate, EpochSeconds };

/// Parses "YYYY-MM-DD" (anything after the date, such as "T12:00", is
/// dropped) or integer epoch seconds.
inline std::optional<Day> parse_timestamp(std::string_view text, TimestampFormat format = TimestampFormat::Auto) {
  text = detail::trim(text);
  const bool looks_iso = text.size() >= 10 && text[4] == '-' && text[7] == '-';
  if (format == TimestampFormat::IsoDate || (format == TimestampFormat::Auto && looks_iso)) {
    if (!looks_iso) return std::nullopt;
    if (text.size() > 10 && text[10] != 'T' && text[10] != ' ') return std::nullopt;
    const auto y = detail::parse_int<int>(text.substr(0, 4));
    const auto m = detail::parse_int<unsigned>(text.substr(5, 2));
    const auto d = detail::parse_int<unsigned>(text.substr(8, 2));
    if (!y || !m || !d) return std::nullopt;
    const std::chrono::year_month_day ymd{std::chrono::year{*y}, std::chrono::month{*m}, std::chrono::day{*d}};
    if (!ymd.ok()) return std::nullopt;
    return day_from_civil(*y, *m, *d);
  }
  const auto secs = detail::parse_int<std::int64_t>(text);
  if (!secs) return std::nullopt;
  return day_from_epoch_seconds(*secs);
}

struct InteractionRecord {
  NodeId source = 0;
  NodeId target = 0;
  Day timestamp;
  std::string kind;

  friend bool operator==(const InteractionRecord&, const InteractionRecord&) = default;
};

/// Time-ordered interaction records together with the span they are declared
/// to cover (inclusive on both ends).
class TemporalEventLog {
 public:
  TemporalEventLog(std::vector<InteractionRecord> records, Day span_start, Day span_end, std::size_t rejected = 0)
      : records_(std::move(records)), span_start_(span_start), span_end_(span_end), rejected_(rejected) {
    if (span_end_ < span_start_) throw Error(ErrorCode::InvalidWindowSpec, "span end precedes span start");
    std::erase_if(records_, [&](const InteractionRecord& r) {
      const bool bad = r.source == r.target || r.timestamp < span_start_ || r.timestamp > span_end_;
      if (bad) ++rejected_;
      return bad;
    });
    std::stable_sort(records_.begin(), records_.end(),
                     [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
  }

  const std::vector<InteractionRecord>& records() const { return records_; }
  Day span_start() const { return span_start_; }
  Day span_end() const { return span_end_; }
  std::int64_t span_days() const { return span_end_ - span_start_ + 1; }
  std::size_t rejected_count() const { return rejected_; }
  bool empty() const { return records_.empty(); }

 private:
  std::vector<InteractionRecord> records_;
  Day span_start_;
  Day span_end_;
  std::size_t rejected_;
};

struct LogFormat {
  char delimiter = ',';
  TimestampFormat timestamps = TimestampFormat::Auto;
  std::optional<Day> span_start;
  std::optional<Day> span_end;
};

/// Reads `source,target,timestamp[,kind]` lines. Blank lines and lines
/// starting with '#' are skipped, except for a `# span: START END` directive
/// which declares the covered span. Lines with the wrong field count,
/// non-integer node ids or a self-loop are counted as rejected; a timestamp
/// that cannot be parsed is an error.
inline TemporalEventLog parse_event_log(std::istream& in, const LogFormat& format = {}) {
  std::vector<InteractionRecord> records;
  std::size_t rejected = 0;
  std::optional<Day> declared_start, declared_end;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = detail::trim(line);
    if (text.empty()) continue;
    if (text.front() == '#') {
      auto body = detail::trim(text.substr(1));
      if (body.starts_with("span:")) {
        const auto parts = detail::split(detail::trim(body.substr(5)), ' ');
        if (parts.size() != 2) throw Error(ErrorCode::Parse, "malformed span directive on line " + std::to_string(line_no));
        declared_start = parse_timestamp(parts[0], format.timestamps);
        declared_end = parse_timestamp(parts[1], format.timestamps);
        if (!declared_start || !declared_end)
          throw Error(ErrorCode::UnparseableTimestamp, "span directive on line " + std::to_string(line_no));
      }
      continue;
    }
    const auto fields = detail::split(text, format.delimiter);
    if (fields.size() < 3 || fields.size() > 4) {
      ++rejected;
      continue;
    }
    const auto source = detail::parse_int<NodeId>(fields[0]);
    const auto target = detail::parse_int<NodeId>(fields[1]);
    if (!source || !target || *source == *target) {
      ++rejected;
      continue;
    }
    const auto ts = parse_timestamp(fields[2], format.timestamps);
    if (!ts)
      throw Error(ErrorCode::UnparseableTimestamp,
                  "line " + std::to_string(line_no) + ": '" + std::string(fields[2]) + "'");
    records.push_back({*source, *target, *ts, fields.size() == 4 ? std::string(fields[3]) : std::string{}});
  }
  if (records.empty()) throw Error(ErrorCode::EmptyLog, "no valid interaction records");

  const auto [lo, hi] = std::minmax_element(records.begin(), records.end(),
                                            [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
  const Day start = format.span_start.value_or(declared_start.value_or(lo->timestamp));
  const Day end = format.span_end.value_or(declared_end.value_or(hi->timestamp));
  TemporalEventLog log(std::move(records), start, end, rejected);
  if (log.empty()) throw Error(ErrorCode::EmptyLog, "no records inside the declared span");
  return log;
}

/// Writes a log in the same format parse_event_log reads, including the span
/// directive, so that it round-trips.
inline void write_event_log(std::ostream& out, const TemporalEventLog& log) {
  out << "# span: " << to_iso(log.span_start()) << ' ' << to_iso(log.span_end()) << '\n';
  for (const auto& r : log.records()) {
    out << r.source << ',' << r.target << ',' << to_iso(r.timestamp);
    if (!r.kind.empty()) out << ',' << r.kind;
    out << '\n';
  }
}

enum class WindowScheme { Disjoint, Overlapping, Increasing };

constexpr std::string_view to_string(WindowScheme s) {
  switch (s) {
    case WindowScheme::Disjoint: return "disjoint";
    case WindowScheme::Overlapping: return "overlapping";
    case WindowScheme::Increasing: return "increasing";
  }
  return "?";
}

inline std::optional<WindowScheme> parse_window_scheme(std::string_view s) {
  if (s == "disjoint") return WindowScheme::Disjoint;
  if (s == "overlapping") return WindowScheme::Overlapping;
  if (s == "increasing") return WindowScheme::Increasing;
  return std::nullopt;
}

struct WindowSpec {
  WindowScheme scheme = WindowScheme::Disjoint;
  std::int64_t size_days = 30;  // ignored for increasing
  std::int64_t offset_days = 30;
  bool keep_partial = false;

  void validate() const {
    if (offset_days < 1) throw Error(ErrorCode::InvalidWindowSpec, "offset must be positive");
    switch (scheme) {
      case WindowScheme::Disjoint:
        if (size_days != offset_days) throw Error(ErrorCode::InvalidWindowSpec, "disjoint windows need offset == size");
        break;
      case WindowScheme::Overlapping:
        if (size_days < 1 || offset_days >= size_days)
          throw Error(ErrorCode::InvalidWindowSpec, "overlapping windows need 0 < offset < size");
        break;
      case WindowScheme::Increasing:
        break;
    }
  }

  /// Short tag such as `disjoint_s90o90` or `increasing_o30`.
  std::string tag() const {
    if (scheme == WindowScheme::Increasing) return "increasing_o" + std::to_string(offset_days);
    return std::string(to_string(scheme)) + "_s" + std::to_string(size_days) + "o" + std::to_string(offset_days);
  }

  friend bool operator==(const WindowSpec&, const WindowSpec&) = default;
};

/// Directed interaction graph of one timeframe. Edge weight is the number of
/// records for the ordered pair.
struct SocialNetwork {
  std::set<NodeId> nodes;
  std::map<std::pair<NodeId, NodeId>, std::uint32_t> edges;

  void add_interaction(NodeId x, NodeId y) {
    if (x == y) return;
    nodes.insert(x);
    nodes.insert(y);
    ++edges[{x, y}];
  }

  friend bool operator==(const SocialNetwork&, const SocialNetwork&) = default;
};

/// Snapshot of the records whose timestamp lies in [start, end).
inline SocialNetwork build_snapshot(std::span<const InteractionRecord> records, Day start, Day end) {
  SocialNetwork net;
  for (const auto& r : records)
    if (r.timestamp >= start && r.timestamp < end) net.add_interaction(r.source, r.target);
  return net;
}

struct Timeframe {
  std::size_t index = 1;  // 1-based
  Day window_start;
  Day window_end;  // exclusive
  SocialNetwork snapshot;

  friend bool operator==(const Timeframe&, const Timeframe&) = default;
};

struct TemporalSocialNetwork {
  std::vector<Timeframe> frames;
  WindowSpec spec;

  std::size_t size() const { return frames.size(); }
  friend bool operator==(const TemporalSocialNetwork&, const TemporalSocialNetwork&) = default;
};

/// Window boundaries for a span under a spec, without touching records.
inline std::vector<std::pair<Day, Day>> window_bounds(Day span_start, std::int64_t span_days, const WindowSpec& spec) {
  spec.validate();
  const Day span_stop = span_start + span_days;  // exclusive
  std::vector<std::pair<Day, Day>> out;
  if (spec.scheme == WindowScheme::Increasing) {
    if (spec.offset_days > span_days)
      throw Error(ErrorCode::WindowLargerThanSpan, "offset " + std::to_string(spec.offset_days) +
                                                       " exceeds span of " + std::to_string(span_days) + " days");
    const auto full = span_days / spec.offset_days;
    for (std::int64_t i = 1; i <= full; ++i) out.emplace_back(span_start, span_start + i * spec.offset_days);
    if (spec.keep_partial && span_days % spec.offset_days != 0) out.emplace_back(span_start, span_stop);
    return out;
  }
  if (spec.size_days > span_days)
    throw Error(ErrorCode::WindowLargerThanSpan, "window size " + std::to_string(spec.size_days) +
                                                     " exceeds span of " + std::to_string(span_days) + " days");
  for (Day start = span_start; start < span_stop; start = start + spec.offset_days) {
    const Day end = start + spec.size_days;
    if (end > span_stop) {
      if (spec.keep_partial) out.emplace_back(start, span_stop);
      else break;
    } else {
      out.emplace_back(start, end);
    }
  }
  return out;
}

/// Cuts a log into timeframes. Windows are half-open, so a record on a shared
/// boundary day belongs to the later frame only. Trailing partial windows are
/// dropped unless `spec.keep_partial` is set.
inline TemporalSocialNetwork slice(const TemporalEventLog& log, const WindowSpec& spec) {
  if (log.empty()) throw Error(ErrorCode::EmptyLog, "cannot slice an empty log");
  TemporalSocialNetwork tsn;
  tsn.spec = spec;
  const auto& recs = log.records();
  const auto by_time = [](const InteractionRecord& r, Day d) { return r.timestamp < d; };
  std::size_t index = 1;
  for (const auto& [start, end] : window_bounds(log.span_start(), log.span_days(), spec)) {
    const auto first = std::lower_bound(recs.begin(), recs.end(), start, by_time);
    const auto last = std::lower_bound(first, recs.end(), end, by_time);
    tsn.frames.push_back({index++, start, end, build_snapshot(std::span(first, last), start, end)});
  }
  return tsn;
}

inline void write_edge_list(std::ostream& out, const SocialNetwork& net) {
  out << "# x,y,weight\n";
  for (const auto& [pair, w] : net.edges) out << pair.first << ',' << pair.second << ',' << w << '\n';
}

/// One row per frame: index, window start, exclusive window end, node and
/// edge counts.
inline void write_frame_manifest(std::ostream& out, const TemporalSocialNetwork& tsn) {
  out << "index,start,end,nodes,edges\n";
  for (const auto& f : tsn.frames)
    out << f.index << ',' << to_iso(f.window_start) << ',' << to_iso(f.window_end) << ',' << f.snapshot.nodes.size()
        << ',' << f.snapshot.edges.size() << '\n';
}

}  // namespace ged
