#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "alarmgraph/errors.hpp"
#include "alarmgraph/ingest.hpp"

namespace alarmgraph {

/// Knobs for chattering removal and sequence formation.
struct PreprocessConfig {
  double chatter_window_s = 60.0;
  double gap_threshold_s = 300.0;
  std::size_t min_len = 5;

  void validate() const {
    if (chatter_window_s <= 0)
      throw error(errc::invalid_config, "preprocess.chatter_window must be > 0");
    if (gap_threshold_s <= 0)
      throw error(errc::invalid_config, "preprocess.gap_threshold must be > 0");
    if (min_len == 0) throw error(errc::invalid_config, "preprocess.min_len must be > 0");
  }
};

/// Debounce chattering alarms, per tag independently: an event is kept iff it
/// is strictly more than `window_s` seconds after the last KEPT event of the
/// same tag. Suppressed events do not extend the window, so the result is
/// idempotent. Relative order is preserved.
inline AlarmLog dechatter(const AlarmLog& log, double window_s) {
  AlarmLog out;
  out.events.reserve(log.events.size());
  std::unordered_map<std::string, std::int64_t> last_kept;
  for (const auto& ev : log.events) {
    auto it = last_kept.find(ev.tag);
    if (it != last_kept.end() &&
        static_cast<double>(ev.triggered_at - it->second) <= window_s) {
      continue;  // within the window of the anchoring kept event
    }
    last_kept[ev.tag] = ev.triggered_at;
    out.events.push_back(ev);
  }
  return out;
}

/// A gap-delimited run of alarms: (tag index, triggered_at) in time order.
struct AlarmSequence {
  int id = 0;
  std::vector<std::pair<int, std::int64_t>> items;
};

/// Sequences that survived the min-length filter plus the events of dropped
/// runs, so the two together always partition the input.
struct Segmentation {
  std::vector<AlarmSequence> sequences;
  std::vector<AlarmEvent> dropped;
};

/// Split a (dechattered) log into alarm sequences: a new sequence starts when
/// the gap between consecutive triggered times is strictly larger than
/// `gap_threshold_s`; runs shorter than `min_len` events are dropped.
inline Segmentation segment(const AlarmLog& log, const TagVocabulary& vocab,
                            double gap_threshold_s, std::size_t min_len) {
  Segmentation out;
  std::vector<const AlarmEvent*> run;
  auto flush = [&]() {
    if (run.empty()) return;
    if (run.size() >= min_len) {
      AlarmSequence seq;
      seq.id = static_cast<int>(out.sequences.size());
      seq.items.reserve(run.size());
      for (const AlarmEvent* ev : run) {
        auto idx = vocab.index_of(ev->tag);
        if (!idx)
          throw error(errc::index_out_of_vocabulary, "tag '" + ev->tag + "' not in vocabulary");
        seq.items.emplace_back(*idx, ev->triggered_at);
      }
      out.sequences.push_back(std::move(seq));
    } else {
      for (const AlarmEvent* ev : run) out.dropped.push_back(*ev);
    }
    run.clear();
  };

  for (const auto& ev : log.events) {
    if (!run.empty() &&
        static_cast<double>(ev.triggered_at - run.back()->triggered_at) > gap_threshold_s) {
      flush();
    }
    run.push_back(&ev);
  }
  flush();
  return out;
}

/// Line-delimited sequence export: id, then ordered tag,timestamp pairs
/// (tab-separated pairs; tags CSV-escaped so embedded commas stay parseable).
inline void write_sequences(std::ostream& out, const std::vector<AlarmSequence>& sequences,
                            const TagVocabulary& vocab) {
  for (const auto& seq : sequences) {
    out << seq.id;
    for (const auto& [tag_idx, ts] : seq.items)
      out << "\t" << csv_escape(vocab.tag_of(tag_idx)) << "," << format_iso(ts);
    out << "\n";
  }
}

inline std::vector<AlarmSequence> read_sequences(std::istream& in, const TagVocabulary& vocab) {
  std::vector<AlarmSequence> sequences;
  std::string line;
  while (getline_norm(in, line)) {
    if (trim(line).empty()) continue;
    AlarmSequence seq;
    std::size_t pos = line.find('\t');
    auto id = parse_int(line.substr(0, pos));
    if (!id) throw error(errc::io_error, "bad sequence id in '" + line + "'");
    seq.id = static_cast<int>(*id);
    while (pos != std::string::npos) {
      std::size_t next = line.find('\t', pos + 1);
      std::string pair = line.substr(pos + 1, next == std::string::npos ? next : next - pos - 1);
      auto fields = split_delimited(pair);
      if (fields.size() != 2) throw error(errc::io_error, "bad sequence item '" + pair + "'");
      auto idx = vocab.index_of(fields[0]);
      if (!idx)
        throw error(errc::index_out_of_vocabulary, "tag '" + fields[0] + "' not in vocabulary");
      auto ts = parse_timestamp(fields[1]);
      if (!ts) throw error(errc::io_error, "bad timestamp in sequence item '" + pair + "'");
      seq.items.emplace_back(*idx, *ts);
      pos = next;
    }
    sequences.push_back(std::move(seq));
  }
  return sequences;
}

}  // namespace alarmgraph
