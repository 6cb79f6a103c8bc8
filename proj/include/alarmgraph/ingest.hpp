#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "alarmgraph/csv.hpp"
#include "alarmgraph/errors.hpp"
#include "alarmgraph/timeparse.hpp"

namespace alarmgraph {

enum class Priority { low, medium, high };

inline const char* priority_name(Priority p) {
  switch (p) {
    case Priority::low: return "Low";
    case Priority::medium: return "Medium";
    case Priority::high: return "High";
  }
  return "?";
}

inline std::optional<Priority> parse_priority(std::string_view s) {
  std::string t;
  t.reserve(s.size());
  for (char c : s) t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (t == "low") return Priority::low;
  if (t == "medium") return Priority::medium;
  if (t == "high") return Priority::high;
  return std::nullopt;
}

/// One timestamped alarm record. Timestamps are epoch seconds (1 s resolution);
/// duration is in minutes. finished/duration/priority may be absent in the source.
struct AlarmEvent {
  std::string tag;
  std::string subblock;
  std::int64_t triggered_at = 0;
  std::optional<std::int64_t> finished_at;
  std::optional<double> duration_min;
  std::optional<Priority> priority;

  friend bool operator==(const AlarmEvent&, const AlarmEvent&) = default;
};

/// Chronologically ordered alarm records (triggered_at non-decreasing).
struct AlarmLog {
  std::vector<AlarmEvent> events;
};

enum class DiagnosticCode { malformed_row, bad_timestamp, negative_duration };

inline const char* diagnostic_name(DiagnosticCode c) {
  switch (c) {
    case DiagnosticCode::malformed_row: return "MalformedRow";
    case DiagnosticCode::bad_timestamp: return "BadTimestamp";
    case DiagnosticCode::negative_duration: return "NegativeDuration";
  }
  return "?";
}

/// A skipped input row: 1-based file line number, what went wrong.
struct ParseDiagnostic {
  std::size_t line = 0;
  DiagnosticCode code = DiagnosticCode::malformed_row;
  std::string message;
};

struct ParseResult {
  AlarmLog log;
  std::vector<ParseDiagnostic> diagnostics;
};

struct LogFormat {
  char delimiter = ',';
};

/// Bijective tag <-> dense index map; indices are contiguous, assigned in
/// first-appearance order.
class TagVocabulary {
 public:
  int add(const std::string& tag) {
    auto it = index_.find(tag);
    if (it != index_.end()) return it->second;
    int idx = static_cast<int>(tags_.size());
    tags_.push_back(tag);
    index_.emplace(tag, idx);
    return idx;
  }

  std::optional<int> index_of(const std::string& tag) const {
    auto it = index_.find(tag);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const std::string& tag_of(int index) const { return tags_.at(static_cast<std::size_t>(index)); }
  std::size_t size() const { return tags_.size(); }
  const std::vector<std::string>& tags() const { return tags_; }

 private:
  std::vector<std::string> tags_;
  std::unordered_map<std::string, int> index_;
};

namespace detail {

// Header names matched case-insensitively, with ' ' and '_' interchangeable.
inline std::string normalize_column(std::string_view s) {
  std::string out;
  for (char c : trim(s)) {
    if (c == ' ') c = '_';
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

struct ColumnMap {
  int tag = -1;
  int subblock = -1;
  int triggered = -1;
  int finished = -1;
  int duration = -1;
  int priority = -1;
};

}  // namespace detail

/// Parse a delimited alarm table (header row required, at least the tag and
/// triggered-time columns). Bad rows are skipped and reported; the returned
/// events are stably sorted by triggered_at.
inline ParseResult parse_log(std::istream& in, LogFormat format = {}) {
  ParseResult result;
  std::string line;
  if (!getline_norm(in, line)) return result;

  detail::ColumnMap cols;
  auto header = split_delimited(line, format.delimiter);
  for (std::size_t i = 0; i < header.size(); ++i) {
    std::string name = detail::normalize_column(header[i]);
    int idx = static_cast<int>(i);
    if (name == "alarm_tag") cols.tag = idx;
    else if (name == "subblock") cols.subblock = idx;
    else if (name == "triggered_time") cols.triggered = idx;
    else if (name == "finished_time") cols.finished = idx;
    else if (name == "alarm_duration") cols.duration = idx;
    else if (name == "priority") cols.priority = idx;
  }
  if (cols.tag < 0 || cols.triggered < 0)
    throw error(errc::missing_input, "header must name the Alarm_tag and Triggered Time columns");

  const std::size_t ncols = header.size();
  std::size_t lineno = 1;
  while (getline_norm(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto fields = split_delimited(line, format.delimiter);
    if (fields.size() != ncols) {
      result.diagnostics.push_back({lineno, DiagnosticCode::malformed_row,
                                    "expected " + std::to_string(ncols) + " columns, got " +
                                        std::to_string(fields.size())});
      continue;
    }

    AlarmEvent ev;
    ev.tag = fields[static_cast<std::size_t>(cols.tag)];
    if (ev.tag.empty()) {
      result.diagnostics.push_back({lineno, DiagnosticCode::malformed_row, "empty alarm tag"});
      continue;
    }
    if (cols.subblock >= 0) ev.subblock = fields[static_cast<std::size_t>(cols.subblock)];

    auto triggered = parse_timestamp(fields[static_cast<std::size_t>(cols.triggered)]);
    if (!triggered) {
      result.diagnostics.push_back({lineno, DiagnosticCode::bad_timestamp,
                                    "unparseable triggered time '" +
                                        fields[static_cast<std::size_t>(cols.triggered)] + "'"});
      continue;
    }
    ev.triggered_at = *triggered;

    bool bad = false;
    if (cols.finished >= 0) {
      const std::string& f = fields[static_cast<std::size_t>(cols.finished)];
      if (!f.empty()) {
        auto finished = parse_timestamp(f);
        if (!finished) {
          result.diagnostics.push_back(
              {lineno, DiagnosticCode::bad_timestamp, "unparseable finished time '" + f + "'"});
          continue;
        }
        if (*finished < ev.triggered_at) {
          result.diagnostics.push_back({lineno, DiagnosticCode::negative_duration,
                                        "finished time precedes triggered time"});
          continue;
        }
        ev.finished_at = *finished;
      }
    }
    if (cols.duration >= 0) {
      const std::string& f = fields[static_cast<std::size_t>(cols.duration)];
      if (!f.empty()) {
        auto dur = parse_double(f);
        if (!dur) {
          result.diagnostics.push_back(
              {lineno, DiagnosticCode::malformed_row, "unparseable duration '" + f + "'"});
          continue;
        }
        if (*dur < 0) {
          result.diagnostics.push_back(
              {lineno, DiagnosticCode::negative_duration, "negative duration"});
          continue;
        }
        // Durations in the source are rounded; allow half a minute of slack.
        if (ev.finished_at) {
          double expected = static_cast<double>(*ev.finished_at - ev.triggered_at) / 60.0;
          if (std::abs(*dur - expected) > 0.5) {
            result.diagnostics.push_back({lineno, DiagnosticCode::malformed_row,
                                          "duration inconsistent with timestamps"});
            continue;
          }
        }
        ev.duration_min = *dur;
      }
    }
    if (cols.priority >= 0) {
      const std::string& f = fields[static_cast<std::size_t>(cols.priority)];
      if (!f.empty()) {
        auto pr = parse_priority(f);
        if (!pr) {
          result.diagnostics.push_back(
              {lineno, DiagnosticCode::malformed_row, "unknown priority '" + f + "'"});
          bad = true;
        } else {
          ev.priority = pr;
        }
      }
    }
    if (bad) continue;
    result.log.events.push_back(std::move(ev));
  }

  std::stable_sort(result.log.events.begin(), result.log.events.end(),
                   [](const AlarmEvent& a, const AlarmEvent& b) {
                     return a.triggered_at < b.triggered_at;
                   });
  return result;
}

inline ParseResult parse_log_file(const std::string& path, LogFormat format = {}) {
  std::ifstream in(path);
  if (!in) throw error(errc::io_error, "cannot open alarm log '" + path + "'");
  return parse_log(in, format);
}

/// One vocabulary entry per distinct tag, indexed in first-appearance order.
inline TagVocabulary build_vocabulary(const AlarmLog& log) {
  TagVocabulary vocab;
  for (const auto& ev : log.events) vocab.add(ev.tag);
  return vocab;
}

/// Canonical event table: same six columns, ISO-8601 times, absent fields empty.
inline void write_canonical_log(std::ostream& out, const AlarmLog& log, LogFormat format = {}) {
  const char d = format.delimiter;
  out << "Alarm_tag" << d << "Subblock" << d << "Triggered Time" << d << "Finished Time" << d
      << "Alarm Duration" << d << "Priority\n";
  for (const auto& ev : log.events) {
    out << csv_escape(ev.tag, d) << d << csv_escape(ev.subblock, d) << d
        << format_iso(ev.triggered_at) << d;
    if (ev.finished_at) out << format_iso(*ev.finished_at);
    out << d;
    if (ev.duration_min) out << format_double(*ev.duration_min);
    out << d;
    if (ev.priority) out << priority_name(*ev.priority);
    out << "\n";
  }
}

inline void write_vocabulary(std::ostream& out, const TagVocabulary& vocab) {
  out << "tag,index\n";
  for (std::size_t i = 0; i < vocab.size(); ++i)
    out << csv_escape(vocab.tag_of(static_cast<int>(i))) << "," << i << "\n";
}

inline TagVocabulary read_vocabulary(std::istream& in) {
  TagVocabulary vocab;
  std::string line;
  getline_norm(in, line);  // header
  while (getline_norm(in, line)) {
    if (trim(line).empty()) continue;
    auto fields = split_delimited(line);
    if (fields.size() != 2) throw error(errc::io_error, "bad vocabulary row '" + line + "'");
    int idx = vocab.add(fields[0]);
    auto want = parse_int(fields[1]);
    if (!want || *want != idx)
      throw error(errc::io_error, "vocabulary indices must be contiguous from 0");
  }
  return vocab;
}

}  // namespace alarmgraph
