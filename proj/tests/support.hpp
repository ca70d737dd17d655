#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "madtasks/dataset.hpp"
#include "madtasks/event.hpp"
#include "madtasks/registry.hpp"

namespace testing_support {

using namespace madtasks;

inline std::vector<TaskCode> tasks_of(std::initializer_list<const char*> names) {
  std::vector<TaskCode> out;
  for (const char* n : names) out.push_back(parse_task(n));
  return out;
}

inline EventRecord baseline(std::string id, std::vector<TaskCode> tasks = {}) {
  EventRecord e;
  e.event_id = std::move(id);
  e.kind = EventKind::Baseline;
  e.balanced = true;
  e.speed_over_5mph = true;
  e.tasks = std::move(tasks);
  return e;
}

inline EventRecord crash(std::string id, int severity, std::vector<TaskCode> tasks = {}) {
  EventRecord e;
  e.event_id = std::move(id);
  e.kind = EventKind::Crash;
  e.severity = severity;
  e.tasks = std::move(tasks);
  return e;
}

inline EventRecord near_crash(std::string id, std::vector<TaskCode> tasks = {}) {
  EventRecord e;
  e.event_id = std::move(id);
  e.kind = EventKind::NearCrash;
  e.tasks = std::move(tasks);
  return e;
}

// Random valid record: any kind, 0..3 distinct tasks.
inline EventRecord random_event(std::mt19937_64& rng, std::size_t index) {
  EventRecord e;
  e.event_id = "R" + std::to_string(index);
  const auto kind = rng() % 3;
  if (kind == 0) {
    e.kind = EventKind::Baseline;
    e.balanced = rng() % 4 != 0;
    e.speed_over_5mph = rng() % 4 != 0;
  } else if (kind == 1) {
    e.kind = EventKind::NearCrash;
  } else {
    e.kind = EventKind::Crash;
    e.severity = static_cast<int>(rng() % 4) + 1;
  }
  if (e.kind != EventKind::Baseline) {
    e.at_fault = rng() % 2;
    e.run_off_road = rng() % 3 == 0;
    e.rear_end_striking = !e.run_off_road && rng() % 3 == 0;
  }
  const auto n = rng() % 4;
  while (e.tasks.size() < n) {
    const auto t = task_by_id(static_cast<std::uint16_t>(rng() % task_count() + 1));
    if (std::find(e.tasks.begin(), e.tasks.end(), t) == e.tasks.end()) e.tasks.push_back(t);
  }
  return e;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("madtasks_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing_support
