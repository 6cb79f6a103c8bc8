#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "alarmgraph/errors.hpp"
#include "alarmgraph/ingest.hpp"
#include "alarmgraph/rng.hpp"

namespace alarmgraph {

/// The 41 Tennessee-Eastman process variables' alarm tags.
inline const std::vector<std::string>& te_base_tags() {
  static const std::vector<std::string> tags = {
      "AF",   "DF",   "EF",   "ACF",  "RcF",  "RFR",  "RP",   "RL",   "RT",   "PuR",
      "PST",  "PSL",  "PSP",  "PSU",  "SL",   "SIP",  "SiU",  "SiT",  "SiSF", "CW",
      "RCT",  "SpCT", "CAR",  "CBR",  "CCR",  "CDR",  "CER",  "CFR",  "CAPu", "CBPu",
      "CCPu", "CDPu", "CEPu", "CFPu", "CGPu", "CHPu", "CDPr", "CEPr", "CFPr", "CGPr",
      "CHPr"};
  return tags;
}

/// High/low alarm variants of every base tag, ASCII-rendered (RT_HI, RT_LO).
inline std::vector<std::string> te_alarm_tags() {
  std::vector<std::string> out;
  out.reserve(te_base_tags().size() * 2);
  for (const auto& t : te_base_tags()) {
    out.push_back(t + "_HI");
    out.push_back(t + "_LO");
  }
  return out;
}

/// Map arrow direction suffixes to their ASCII file form (RT↑ -> RT_HI).
inline std::string normalize_direction(std::string tag) {
  auto replace_suffix = [&](const char* arrow, const char* ascii) {
    std::size_t n = std::string(arrow).size();
    if (tag.size() >= n && tag.compare(tag.size() - n, n, arrow) == 0)
      tag = tag.substr(0, tag.size() - n) + ascii;
  };
  replace_suffix("↑", "_HI");
  replace_suffix("↓", "_LO");
  return tag;
}

/// Scenario with planted correlated groups: each group fires in Poisson
/// bursts, background noise fires independently, chatter duplicates are
/// injected near originals, and a fault tag ticks at an exact interval.
struct ScenarioSpec {
  std::string fault_label = "F1";
  std::optional<int> fault_group;      // causally linked group, metadata only
  double fault_interval_s = 600.0;
  std::vector<std::vector<std::string>> groups;
  double burst_rate_per_hour = 2.0;    // per group
  double burst_spread_s = 60.0;
  double noise_rate_per_hour = 30.0;   // total across noise tags
  std::vector<std::string> noise_tags;
  double chatter_probability = 0.0;    // per kept non-fault alarm
  std::size_t total_alarms = 4000;
  std::uint64_t seed = 1;

  void validate() const {
    if (groups.empty()) throw error(errc::invalid_spec, "scenario needs at least one group");
    std::set<std::string> known(te_base_tags().begin(), te_base_tags().end());
    for (const auto& t : te_alarm_tags()) known.insert(t);
    auto check_known = [&](const std::string& t) {
      if (!known.count(t))
        throw error(errc::invalid_spec, "tag '" + t + "' is not a Tennessee-Eastman alarm tag");
    };
    std::set<std::string> seen;
    for (const auto& g : groups) {
      if (g.empty()) throw error(errc::invalid_spec, "empty correlated group");
      for (const auto& t : g) {
        check_known(t);
        if (!seen.insert(t).second)
          throw error(errc::invalid_spec, "tag '" + t + "' appears in more than one group");
      }
    }
    std::set<std::string> noise_seen;
    for (const auto& t : noise_tags) {
      check_known(t);
      if (seen.count(t)) throw error(errc::invalid_spec, "noise tag '" + t + "' is in a group");
      if (!noise_seen.insert(t).second)
        throw error(errc::invalid_spec, "duplicate noise tag '" + t + "'");
    }
    if (seen.count(fault_label) || noise_seen.count(fault_label))
      throw error(errc::invalid_spec, "fault label collides with an alarm tag");
    if (burst_rate_per_hour <= 0) throw error(errc::invalid_spec, "burst rate must be > 0");
    if (burst_spread_s <= 0) throw error(errc::invalid_spec, "burst spread must be > 0");
    if (noise_rate_per_hour < 0) throw error(errc::invalid_spec, "noise rate must be >= 0");
    if (!noise_tags.empty() && noise_rate_per_hour <= 0)
      throw error(errc::invalid_spec, "noise tags given but noise rate is 0");
    if (chatter_probability < 0 || chatter_probability > 1)
      throw error(errc::invalid_spec, "chatter probability must be in [0, 1]");
    if (fault_interval_s <= 0) throw error(errc::invalid_spec, "fault interval must be > 0");
    if (total_alarms < 1) throw error(errc::invalid_spec, "total alarms must be >= 1");
    if (fault_group && (*fault_group < 0 || *fault_group >= static_cast<int>(groups.size())))
      throw error(errc::invalid_spec, "fault group id out of range");
  }
};

/// Planted structure: which group each tag belongs to (noise tags absent) and
/// which group each fault label is causally linked to.
struct GroundTruth {
  std::map<std::string, int> tag_group;
  std::map<std::string, int> fault_links;
};

struct SynthStats {
  std::size_t originals = 0;
  std::size_t duplicates = 0;
  std::size_t dropped_for_spacing = 0;
  /// (tag, triggered_at) of every injected chatter duplicate.
  std::vector<std::pair<std::string, std::int64_t>> duplicate_events;
};

struct SynthResult {
  AlarmLog log;
  GroundTruth truth;
  SynthStats stats;
};

namespace detail {

// Chatter duplicates land within this many seconds of their original; kept
// originals of one tag are spaced strictly farther apart than it, so a
// 60-second dechatter pass removes exactly the duplicates.
constexpr std::int64_t kChatterWindowS = 60;

struct PendingEvent {
  std::string tag;
  std::int64_t at = 0;
  int group = -1;       // -1 noise, -2 fault
  std::size_t seq = 0;  // insertion order, for deterministic tie-breaks
};

}  // namespace detail

inline SynthResult generate(const ScenarioSpec& spec, std::int64_t start_epoch = 1551916800) {
  // default start: 2019-03-07T00:00:00Z
  spec.validate();

  SynthResult result;
  for (std::size_t g = 0; g < spec.groups.size(); ++g)
    for (const auto& tag : spec.groups[g])
      result.truth.tag_group[tag] = static_cast<int>(g);
  if (spec.fault_group) result.truth.fault_links[spec.fault_label] = *spec.fault_group;

  std::size_t group_tag_count = 0;
  for (const auto& g : spec.groups) group_tag_count += g.size();

  // Horizon sized so the expected event count (originals + chatter + fault
  // ticks) hits the target.
  const double hourly_originals =
      spec.burst_rate_per_hour * static_cast<double>(group_tag_count) +
      (spec.noise_tags.empty() ? 0.0 : spec.noise_rate_per_hour);
  const double per_second = (1.0 + spec.chatter_probability) * hourly_originals / 3600.0 +
                            1.0 / spec.fault_interval_s;
  const double horizon_s = static_cast<double>(spec.total_alarms) / per_second;

  std::vector<detail::PendingEvent> pending;
  std::size_t seq = 0;

  // Correlated groups: Poisson bursts; each member fires once per burst with
  // uniform jitter inside the spread.
  for (std::size_t g = 0; g < spec.groups.size(); ++g) {
    rng burst_rng(derive_seed(spec.seed, 0x6275727374ull, g));
    double t = 0.0;
    const double rate = spec.burst_rate_per_hour / 3600.0;
    while (true) {
      t += burst_rng.exponential(rate);
      if (t >= horizon_s) break;
      for (const auto& tag : spec.groups[g]) {
        double jitter = burst_rng.uniform() * spec.burst_spread_s;
        pending.push_back({tag, start_epoch + static_cast<std::int64_t>(t + jitter),
                           static_cast<int>(g), seq++});
      }
    }
  }

  // Background noise: one Poisson stream, tags drawn uniformly.
  if (!spec.noise_tags.empty() && spec.noise_rate_per_hour > 0) {
    rng noise_rng(derive_seed(spec.seed, 0x6e6f697365ull));
    double t = 0.0;
    const double rate = spec.noise_rate_per_hour / 3600.0;
    while (true) {
      t += noise_rng.exponential(rate);
      if (t >= horizon_s) break;
      const auto& tag = spec.noise_tags[noise_rng.below(spec.noise_tags.size())];
      pending.push_back({tag, start_epoch + static_cast<std::int64_t>(t), -1, seq++});
    }
  }

  // Fault tag: exact arithmetic progression.
  const std::int64_t interval = static_cast<std::int64_t>(spec.fault_interval_s);
  for (std::int64_t t = interval; t < static_cast<std::int64_t>(horizon_s); t += interval)
    pending.push_back({spec.fault_label, start_epoch + t, -2, seq++});

  std::sort(pending.begin(), pending.end(),
            [](const detail::PendingEvent& a, const detail::PendingEvent& b) {
              return std::make_pair(a.at, a.seq) < std::make_pair(b.at, b.seq);
            });

  // Spacing pass: same-tag originals must be strictly more than the chatter
  // window apart or dechattering could eat a genuine alarm. Fault ticks are
  // exempt (the progression is exact by construction and never that dense).
  std::map<std::string, std::int64_t> last_original;
  std::vector<detail::PendingEvent> kept;
  kept.reserve(pending.size());
  for (const auto& ev : pending) {
    if (ev.group != -2) {
      auto it = last_original.find(ev.tag);
      if (it != last_original.end() && ev.at - it->second <= detail::kChatterWindowS) {
        ++result.stats.dropped_for_spacing;
        continue;
      }
    }
    last_original[ev.tag] = ev.at;
    kept.push_back(ev);
  }

  // Chatter injection: with the configured probability, one duplicate within
  // the window after each kept non-fault original.
  rng chatter_rng(derive_seed(spec.seed, 0x63686174ull));
  rng body_rng(derive_seed(spec.seed, 0x626f6479ull));
  std::vector<detail::PendingEvent> with_chatter;
  with_chatter.reserve(kept.size() * 2);
  for (const auto& ev : kept) {
    with_chatter.push_back(ev);
    ++result.stats.originals;
    if (ev.group != -2 && chatter_rng.uniform() < spec.chatter_probability) {
      std::int64_t offset = 1 + static_cast<std::int64_t>(chatter_rng.below(
                                    static_cast<std::uint64_t>(detail::kChatterWindowS)));
      detail::PendingEvent dup{ev.tag, ev.at + offset, ev.group, seq++};
      with_chatter.push_back(dup);
      ++result.stats.duplicates;
      result.stats.duplicate_events.emplace_back(dup.tag, dup.at);
    }
  }

  std::sort(with_chatter.begin(), with_chatter.end(),
            [](const detail::PendingEvent& a, const detail::PendingEvent& b) {
              return std::make_pair(a.at, a.seq) < std::make_pair(b.at, b.seq);
            });

  result.log.events.reserve(with_chatter.size());
  for (const auto& ev : with_chatter) {
    AlarmEvent out;
    out.tag = ev.tag;
    out.triggered_at = ev.at;
    if (ev.group == -2) {
      out.subblock = "Fault";
      out.priority = Priority::high;
    } else if (ev.group == -1) {
      out.subblock = "Background";
      out.priority = Priority::low;
      out.finished_at = ev.at + 60 + static_cast<std::int64_t>(body_rng.below(540));
      out.duration_min = static_cast<double>(*out.finished_at - ev.at) / 60.0;
    } else {
      out.subblock = "Group" + std::to_string(ev.group);
      out.priority = Priority::high;
      out.finished_at = ev.at + 60 + static_cast<std::int64_t>(body_rng.below(540));
      out.duration_min = static_cast<double>(*out.finished_at - ev.at) / 60.0;
    }
    result.log.events.push_back(std::move(out));
  }
  return result;
}

/// Concatenate several scenarios into one log: each runs in its own time
/// window (one day apart), group ids are offset per scenario.
inline SynthResult generate(const std::vector<ScenarioSpec>& specs,
                            std::int64_t start_epoch = 1551916800) {
  if (specs.empty()) throw error(errc::invalid_spec, "no scenarios given");
  std::set<std::string> fault_labels;
  for (const auto& s : specs)
    if (!fault_labels.insert(s.fault_label).second)
      throw error(errc::invalid_spec, "duplicate fault label '" + s.fault_label + "'");

  SynthResult merged;
  std::int64_t offset = start_epoch;
  int group_offset = 0;
  for (const auto& spec : specs) {
    SynthResult one = generate(spec, offset);
    for (const auto& [tag, g] : one.truth.tag_group) {
      auto it = merged.truth.tag_group.find(tag);
      if (it != merged.truth.tag_group.end() && it->second != g + group_offset)
        throw error(errc::invalid_spec, "tag '" + tag + "' has conflicting groups across scenarios");
      merged.truth.tag_group[tag] = g + group_offset;
    }
    for (const auto& [label, g] : one.truth.fault_links)
      merged.truth.fault_links[label] = g + group_offset;
    merged.stats.originals += one.stats.originals;
    merged.stats.duplicates += one.stats.duplicates;
    merged.stats.dropped_for_spacing += one.stats.dropped_for_spacing;
    for (auto& d : one.stats.duplicate_events)
      merged.stats.duplicate_events.push_back(std::move(d));
    for (auto& ev : one.log.events) merged.log.events.push_back(std::move(ev));
    if (!merged.log.events.empty())
      offset = merged.log.events.back().triggered_at + 86400;
    group_offset += static_cast<int>(spec.groups.size());
  }
  std::stable_sort(merged.log.events.begin(), merged.log.events.end(),
                   [](const AlarmEvent& a, const AlarmEvent& b) {
                     return a.triggered_at < b.triggered_at;
                   });
  return merged;
}

/// Ground-truth table: (tag, group id), noise tags with an empty group column,
/// fault labels included with their linked group.
inline void write_ground_truth(std::ostream& out, const GroundTruth& truth,
                               const std::vector<std::string>& noise_tags) {
  out << "tag,group\n";
  for (const auto& [tag, g] : truth.tag_group) out << csv_escape(tag) << "," << g << "\n";
  for (const auto& tag : noise_tags)
    if (!truth.tag_group.count(tag)) out << csv_escape(tag) << ",\n";
  for (const auto& [label, g] : truth.fault_links) out << csv_escape(label) << "," << g << "\n";
}

}  // namespace alarmgraph
