#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "madtasks/error.hpp"
#include "madtasks/registry.hpp"

namespace madtasks {

enum class Taxonomy { Shrp2, G14 };

inline constexpr std::array<Taxonomy, 2> kTaxonomies{Taxonomy::Shrp2, Taxonomy::G14};

inline std::string_view to_string(Taxonomy t) { return t == Taxonomy::Shrp2 ? "shrp2" : "g14"; }

inline std::optional<Taxonomy> parse_taxonomy(std::string_view s) {
  if (s == "shrp2" || s == "SHRP2" || s == "Shrp2") return Taxonomy::Shrp2;
  if (s == "g14" || s == "G14") return Taxonomy::G14;
  return std::nullopt;
}

enum class EventKind { Baseline, NearCrash, Crash };

inline std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::Baseline: return "baseline";
    case EventKind::NearCrash: return "near_crash";
    case EventKind::Crash: return "crash";
  }
  return "?";
}

inline std::optional<EventKind> parse_event_kind(std::string_view s) {
  if (s == "baseline") return EventKind::Baseline;
  if (s == "near_crash") return EventKind::NearCrash;
  if (s == "crash") return EventKind::Crash;
  return std::nullopt;
}

inline constexpr std::size_t kMaxTasksPerEvent = 3;

struct EventRecord {
  std::string event_id;
  EventKind kind = EventKind::Baseline;
  std::optional<int> severity;  // 1..4, crashes only
  bool balanced = false;         // baselines only
  bool speed_over_5mph = false;  // baselines only
  bool at_fault = false;
  bool run_off_road = false;
  bool rear_end_striking = false;
  std::vector<TaskCode> tasks;
  bool engagement_known = true;

  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

// Checks the record-level invariants; throws ContractViolation describing the
// first one broken.
inline void check_record(const EventRecord& e) {
  if (e.tasks.size() > kMaxTasksPerEvent) {
    throw ContractViolation("event " + e.event_id + " has more than 3 tasks");
  }
  for (std::size_t i = 0; i < e.tasks.size(); ++i) {
    for (std::size_t j = i + 1; j < e.tasks.size(); ++j) {
      if (e.tasks[i] == e.tasks[j]) throw ContractViolation("event " + e.event_id + " repeats a task");
    }
  }
  if (e.severity.has_value() != (e.kind == EventKind::Crash)) {
    throw ContractViolation("event " + e.event_id + ": severity must be present exactly for crashes");
  }
  if (e.severity && (*e.severity < 1 || *e.severity > 4)) {
    throw ContractViolation("event " + e.event_id + ": severity out of range");
  }
}

enum class EventType : std::uint8_t {
  CDS,
  CNC,
  L1_4,
  L1_2,
  L1_3,
  L1_3_NC,
  L1_3_AtFault,
  RunOffRoad,
  RearEndStriking,
};

inline constexpr std::array<EventType, 9> kEventTypes{
    EventType::CDS,  EventType::CNC,          EventType::L1_4,       EventType::L1_2,           EventType::L1_3,
    EventType::L1_3_NC, EventType::L1_3_AtFault, EventType::RunOffRoad, EventType::RearEndStriking,
};

inline constexpr std::array<EventType, 8> kSafetyCriticalTypes{
    EventType::CNC,          EventType::L1_4,       EventType::L1_2,           EventType::L1_3, EventType::L1_3_NC,
    EventType::L1_3_AtFault, EventType::RunOffRoad, EventType::RearEndStriking,
};

inline std::string_view to_string(EventType t) {
  switch (t) {
    case EventType::CDS: return "CDS";
    case EventType::CNC: return "CNC";
    case EventType::L1_4: return "L1-4";
    case EventType::L1_2: return "L1-2";
    case EventType::L1_3: return "L1-3";
    case EventType::L1_3_NC: return "L1-3+NC";
    case EventType::L1_3_AtFault: return "L1-3-at-fault";
    case EventType::RunOffRoad: return "run-off-road";
    case EventType::RearEndStriking: return "rear-end-striking";
  }
  return "?";
}

// Accepts the CLI labels. "L1-3 NC" is taken as "L1-3+NC" since a literal
// '+' in a URL query decodes to a space.
inline std::optional<EventType> parse_event_type(std::string_view s) {
  for (auto t : kEventTypes) {
    if (to_string(t) == s) return t;
  }
  if (s == "L1-3 NC") return EventType::L1_3_NC;
  return std::nullopt;
}

struct EventTypeSet {
  std::uint16_t bits = 0;

  bool contains(EventType t) const noexcept { return bits & (1u << static_cast<unsigned>(t)); }
  void insert(EventType t) noexcept { bits |= static_cast<std::uint16_t>(1u << static_cast<unsigned>(t)); }
  bool empty() const noexcept { return bits == 0; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(__builtin_popcount(bits)); }

  std::vector<EventType> to_vector() const {
    std::vector<EventType> out;
    for (auto t : kEventTypes) {
      if (contains(t)) out.push_back(t);
    }
    return out;
  }

  friend bool operator==(const EventTypeSet&, const EventTypeSet&) = default;
};

inline EventTypeSet membership_of(const EventRecord& e) {
  EventTypeSet s;
  if (e.kind == EventKind::Baseline) {
    if (e.balanced && e.speed_over_5mph) s.insert(EventType::CDS);
    return s;
  }
  s.insert(EventType::CNC);
  const bool crash = e.kind == EventKind::Crash && e.severity.has_value();
  const bool l1_3 = crash && *e.severity <= 3;
  if (crash) s.insert(EventType::L1_4);
  if (crash && *e.severity <= 2) s.insert(EventType::L1_2);
  if (l1_3) s.insert(EventType::L1_3);
  if (l1_3 || e.kind == EventKind::NearCrash) s.insert(EventType::L1_3_NC);
  if (l1_3 && e.at_fault) s.insert(EventType::L1_3_AtFault);
  if (l1_3 && e.run_off_road) s.insert(EventType::RunOffRoad);
  if (l1_3 && e.rear_end_striking) s.insert(EventType::RearEndStriking);
  return s;
}

inline bool is_member(const EventRecord& e, EventType t) { return membership_of(e).contains(t); }

// Task identifiers under a taxonomy: TaskCode ids for Shrp2, group ids for G14.
// Sorted ascending, distinct.
inline std::vector<int> task_set(const EventRecord& e, Taxonomy taxonomy) {
  if (!e.engagement_known) {
    throw ContractViolation("event " + e.event_id + " has unknown secondary task engagement");
  }
  std::vector<int> ids;
  ids.reserve(e.tasks.size());
  for (const auto& t : e.tasks) ids.push_back(taxonomy == Taxonomy::Shrp2 ? t.id : group_id_of(t));
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

// Name of a task identifier as produced by task_set().
inline std::string node_name(int id, Taxonomy taxonomy) {
  return std::string(taxonomy == Taxonomy::Shrp2 ? task_by_id(static_cast<std::uint16_t>(id)).name : group_name(id));
}

enum class Engagement { NoTask, SAD, MAD };

inline std::string_view to_string(Engagement e) {
  switch (e) {
    case Engagement::NoTask: return "NoTask";
    case Engagement::SAD: return "SAD";
    case Engagement::MAD: return "MAD";
  }
  return "?";
}

struct EngagementLevel {
  Engagement label = Engagement::NoTask;
  bool three_plus = false;

  friend bool operator==(const EngagementLevel&, const EngagementLevel&) = default;
};

inline EngagementLevel engagement_for_cardinality(std::size_t n) {
  if (n == 0) return {Engagement::NoTask, false};
  if (n == 1) return {Engagement::SAD, false};
  return {Engagement::MAD, n >= 3};
}

inline EngagementLevel classify_engagement(const EventRecord& e, Taxonomy taxonomy) {
  return engagement_for_cardinality(task_set(e, taxonomy).size());
}

}  // namespace madtasks
