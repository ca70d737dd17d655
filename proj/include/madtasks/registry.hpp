#pragma once

// Closed registry of coded secondary tasks and their 14 general groups.
//
// Task ids follow the row-major order of the grouping table and are frozen
// (see data/task_registry.v1.tsv, which must stay byte-identical to
// `registry_tsv()`).

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "madtasks/error.hpp"

namespace madtasks {

inline constexpr int kRegistryVersion = 1;
inline constexpr int kGroupCount = 14;

struct TaskCode {
  std::uint16_t id = 0;  // 1-based, stable
  std::string_view name;

  friend constexpr bool operator==(const TaskCode& a, const TaskCode& b) { return a.id == b.id; }
  friend constexpr auto operator<=>(const TaskCode& a, const TaskCode& b) { return a.id <=> b.id; }
};

namespace detail {

struct RegistryRow {
  std::string_view name;
  int group;
};

inline constexpr std::array<RegistryRow, 62> kRows{{
    {"Talking/singing, audience unknown", 1},
    {"Dancing", 1},
    {"Reading", 2},
    {"Writing", 2},
    {"Passenger in adjacent seat – interaction", 3},
    {"Passenger in rear seat – interaction", 3},
    {"Child in adjacent seat – interaction", 3},
    {"Child in rear seat – interaction", 3},
    {"Moving object in vehicle", 4},
    {"Insect in vehicle", 4},
    {"Pet in vehicle", 4},
    {"Object dropped by driver", 4},
    {"Reaching for object, other", 4},
    {"Object in vehicle, other", 4},
    {"Cell phone, Holding", 5},
    {"Cell phone, Talking/listening, hand-held", 5},
    {"Cell phone, Talking/listening, hands-free", 5},
    {"Cell phone, Texting", 5},
    {"Cell phone, Browsing", 5},
    {"Cell phone, Dialing hand-held", 5},
    {"Cell phone, Dialing hand-held using quick keys", 5},
    {"Cell phone, Dialing hands-free using voice-activated software", 5},
    {"Cell phone, Locating/reaching/answering", 5},
    {"Cell phone, other", 5},
    {"Tablet device, Locating/reaching", 6},
    {"Tablet device, Operating", 6},
    {"Tablet device, Viewing", 6},
    {"Tablet device, Other", 6},
    {"Adjusting/monitoring climate control", 7},
    {"Adjusting/monitoring radio", 7},
    {"Inserting/retrieving CD (or similar)", 7},
    {"Adjusting/monitoring other devices integral to vehicle", 7},
    {"Looking at previous crash or incident", 8},
    {"Looking at pedestrian", 8},
    {"Looking at animal", 8},
    {"Looking at an object external to the vehicle", 8},
    {"Distracted by construction", 8},
    {"Other external distraction", 8},
    {"Reaching for food-related or drink-related item", 9},
    {"Eating with utensils", 9},
    {"Eating without utensils", 9},
    {"Drinking with lid and straw", 9},
    {"Drinking with lid, no straw", 9},
    {"Drinking with straw, no lid", 9},
    {"Drinking from open container", 9},
    {"Reaching for cigar/cigarette", 10},
    {"Lighting cigar/cigarette", 10},
    {"Smoking cigar/cigarette", 10},
    {"Extinguishing cigar/cigarette", 10},
    {"Reaching for personal body-related item", 11},
    {"Combing/brushing/fixing hair", 11},
    {"Applying make-up", 11},
    {"Shaving", 11},
    {"Brushing/flossing teeth", 11},
    {"Biting nails/cuticles", 11},
    {"Removing/adjusting clothing", 11},
    {"Removing/adjusting jewelry", 11},
    {"Removing/inserting/adjusting contact lenses or glasses", 11},
    {"Other personal hygiene", 11},
    {"Other non-specific internal eye glance", 12},
    {"Other known secondary task", 13},
    {"Unknown type (secondary task present)", 14},
}};

// Short display names for the general groups.
inline constexpr std::array<std::string_view, kGroupCount> kGroupNames{{
    "Talking/singing/dancing",
    "Reading/writing",
    "Passenger/child interaction",
    "Object/animal in vehicle",
    "Cell phone",
    "Tablet device",
    "Vehicle-integral devices",
    "External distraction",
    "Food/drink",
    "Smoking",
    "Personal hygiene",
    "Internal eye glance",
    "Other known task",
    "Unknown task",
}};

}  // namespace detail

inline constexpr std::size_t task_count() noexcept { return detail::kRows.size(); }

inline TaskCode task_by_id(std::uint16_t id) {
  if (id == 0 || id > detail::kRows.size()) {
    throw RegistryError("unknown task id " + std::to_string(id));
  }
  return TaskCode{id, detail::kRows[id - 1].name};
}

inline std::optional<TaskCode> find_task(std::string_view name) noexcept {
  for (std::size_t i = 0; i < detail::kRows.size(); ++i) {
    if (detail::kRows[i].name == name) return TaskCode{static_cast<std::uint16_t>(i + 1), detail::kRows[i].name};
  }
  return std::nullopt;
}

inline TaskCode parse_task(std::string_view name) {
  if (auto t = find_task(name)) return *t;
  throw RegistryError("unknown task name \"" + std::string(name) + "\"");
}

inline int group_id_of(TaskCode code) { return detail::kRows.at(code.id - 1).group; }

inline std::string_view group_name(int group_id) {
  if (group_id < 1 || group_id > kGroupCount) {
    throw RegistryError("unknown group id " + std::to_string(group_id));
  }
  return detail::kGroupNames[group_id - 1];
}

struct TaskGroup {
  int group_id = 0;
  std::vector<TaskCode> member_codes;
};

inline TaskGroup group_members(int group_id) {
  group_name(group_id);  // validates
  TaskGroup g{group_id, {}};
  for (std::size_t i = 0; i < detail::kRows.size(); ++i) {
    if (detail::kRows[i].group == group_id) g.member_codes.push_back(task_by_id(static_cast<std::uint16_t>(i + 1)));
  }
  return g;
}

inline TaskGroup group_of(TaskCode code) { return group_members(group_id_of(code)); }

inline TaskGroup group_of(std::string_view name) { return group_of(parse_task(name)); }

inline std::size_t group_size(int group_id) {
  std::size_t n = 0;
  for (const auto& r : detail::kRows) n += (r.group == group_id);
  return n;
}

// One `id<TAB>group_id<TAB>name\n` line per task.
inline std::string registry_tsv() {
  std::string out;
  for (std::size_t i = 0; i < detail::kRows.size(); ++i) {
    out += std::to_string(i + 1);
    out += '\t';
    out += std::to_string(detail::kRows[i].group);
    out += '\t';
    out += detail::kRows[i].name;
    out += '\n';
  }
  return out;
}

}  // namespace madtasks
