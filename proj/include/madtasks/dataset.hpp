#pragma once

// Event datasets: strict csv/jsonl ingestion, canonical csv output and the
// per-event-type engagement breakdown.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "madtasks/error.hpp"
#include "madtasks/event.hpp"

namespace madtasks {

enum class DataFormat { Csv, Jsonl };

inline std::optional<DataFormat> parse_data_format(std::string_view s) {
  if (s == "csv") return DataFormat::Csv;
  if (s == "jsonl") return DataFormat::Jsonl;
  return std::nullopt;
}

struct Dataset {
  std::vector<EventRecord> events;
  std::size_t excluded_unknown = 0;
  std::string source_digest;
};

inline constexpr std::string_view kCsvHeader =
    "event_id,kind,severity,balanced,speed_over_5mph,at_fault,run_off_road,rear_end_striking,"
    "task1,task2,task3,engagement_known";

// 64-bit FNV-1a, lowercase hex.
inline std::string content_digest(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace detail {

inline std::vector<std::string> split_csv_line(std::string_view line, std::size_t lineno) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  bool field_started_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          fields.back() += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        fields.back() += c;
      }
    } else if (c == ',') {
      fields.emplace_back();
      field_started_quoted = false;
    } else if (c == '"' && fields.back().empty() && !field_started_quoted) {
      quoted = true;
      field_started_quoted = true;
    } else {
      fields.back() += c;
    }
  }
  if (quoted) throw LoadError(lineno, "<row>", "unterminated quoted field");
  return fields;
}

inline std::string csv_escape(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline bool parse_bool_field(const std::string& v, std::size_t lineno, const char* field) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw LoadError(lineno, field, "expected true/false, got \"" + v + "\"");
}

inline std::optional<bool> parse_opt_bool_field(const std::string& v, std::size_t lineno, const char* field) {
  if (v.empty()) return std::nullopt;
  return parse_bool_field(v, lineno, field);
}

struct RawRow {
  std::string event_id;
  std::string kind;
  std::optional<int> severity;
  std::optional<bool> balanced;
  std::optional<bool> speed_over_5mph;
  std::optional<bool> at_fault;
  std::optional<bool> run_off_road;
  std::optional<bool> rear_end_striking;
  std::vector<std::string> tasks;
  std::optional<bool> engagement_known;
};

// Shared validation for both formats.
inline EventRecord build_record(const RawRow& raw, std::size_t lineno) {
  EventRecord e;
  if (raw.event_id.empty()) throw LoadError(lineno, "event_id", "empty event id");
  e.event_id = raw.event_id;
  auto kind = parse_event_kind(raw.kind);
  if (!kind) throw LoadError(lineno, "kind", "unknown event kind \"" + raw.kind + "\"");
  e.kind = *kind;

  if (raw.severity) {
    if (e.kind != EventKind::Crash) throw LoadError(lineno, "severity", "severity given for a non-crash event");
    if (*raw.severity < 1 || *raw.severity > 4) {
      throw LoadError(lineno, "severity", "severity must be 1..4, got " + std::to_string(*raw.severity));
    }
    e.severity = raw.severity;
  } else if (e.kind == EventKind::Crash) {
    throw LoadError(lineno, "severity", "crash without severity");
  }

  if (e.kind == EventKind::Baseline) {
    if (!raw.balanced) throw LoadError(lineno, "balanced", "required for baselines");
    if (!raw.speed_over_5mph) throw LoadError(lineno, "speed_over_5mph", "required for baselines");
    e.balanced = *raw.balanced;
    e.speed_over_5mph = *raw.speed_over_5mph;
  } else {
    if (raw.balanced) throw LoadError(lineno, "balanced", "only applicable to baselines");
    if (raw.speed_over_5mph) throw LoadError(lineno, "speed_over_5mph", "only applicable to baselines");
  }
  e.at_fault = raw.at_fault.value_or(false);
  e.run_off_road = raw.run_off_road.value_or(false);
  e.rear_end_striking = raw.rear_end_striking.value_or(false);

  if (raw.tasks.size() > kMaxTasksPerEvent) throw LoadError(lineno, "tasks", "more than 3 tasks");
  for (std::size_t i = 0; i < raw.tasks.size(); ++i) {
    const std::string field = "task" + std::to_string(i + 1);
    auto t = find_task(raw.tasks[i]);
    if (!t) throw LoadError(lineno, field, "unknown task name \"" + raw.tasks[i] + "\"");
    for (const auto& prev : e.tasks) {
      if (prev == *t) throw LoadError(lineno, field, "duplicate task \"" + raw.tasks[i] + "\"");
    }
    e.tasks.push_back(*t);
  }

  if (!raw.engagement_known) throw LoadError(lineno, "engagement_known", "required");
  e.engagement_known = *raw.engagement_known;
  return e;
}

inline RawRow raw_from_csv(const std::vector<std::string>& f, std::size_t lineno) {
  if (f.size() != 12) {
    throw LoadError(lineno, "<row>", "expected 12 fields, got " + std::to_string(f.size()));
  }
  RawRow r;
  r.event_id = f[0];
  r.kind = f[1];
  if (!f[2].empty()) {
    if (f[2].size() != 1 || f[2][0] < '0' || f[2][0] > '9') {
      throw LoadError(lineno, "severity", "expected 1..4, got \"" + f[2] + "\"");
    }
    r.severity = f[2][0] - '0';
  }
  r.balanced = parse_opt_bool_field(f[3], lineno, "balanced");
  r.speed_over_5mph = parse_opt_bool_field(f[4], lineno, "speed_over_5mph");
  r.at_fault = parse_opt_bool_field(f[5], lineno, "at_fault");
  r.run_off_road = parse_opt_bool_field(f[6], lineno, "run_off_road");
  r.rear_end_striking = parse_opt_bool_field(f[7], lineno, "rear_end_striking");
  bool gap = false;
  for (int i = 8; i <= 10; ++i) {
    if (f[i].empty()) {
      gap = true;
    } else {
      if (gap) throw LoadError(lineno, "task" + std::to_string(i - 7), "task follows an empty task column");
      r.tasks.push_back(f[i]);
    }
  }
  r.engagement_known = parse_opt_bool_field(f[11], lineno, "engagement_known");
  return r;
}

inline RawRow raw_from_json(const nlohmann::json& j, std::size_t lineno) {
  if (!j.is_object()) throw LoadError(lineno, "<row>", "expected a JSON object");
  static const std::unordered_set<std::string> known{
      "event_id",         "kind",         "severity", "balanced", "speed_over_5mph", "at_fault", "run_off_road",
      "rear_end_striking", "tasks", "engagement_known"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) throw LoadError(lineno, it.key(), "unknown field");
  }
  auto opt_bool = [&](const char* key) -> std::optional<bool> {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    if (!j[key].is_boolean()) throw LoadError(lineno, key, "expected a boolean");
    return j[key].get<bool>();
  };
  RawRow r;
  if (!j.contains("event_id") || !j["event_id"].is_string()) throw LoadError(lineno, "event_id", "expected a string");
  r.event_id = j["event_id"].get<std::string>();
  if (!j.contains("kind") || !j["kind"].is_string()) throw LoadError(lineno, "kind", "expected a string");
  r.kind = j["kind"].get<std::string>();
  if (j.contains("severity") && !j["severity"].is_null()) {
    if (!j["severity"].is_number_integer()) throw LoadError(lineno, "severity", "expected an integer");
    r.severity = j["severity"].get<int>();
  }
  r.balanced = opt_bool("balanced");
  r.speed_over_5mph = opt_bool("speed_over_5mph");
  r.at_fault = opt_bool("at_fault");
  r.run_off_road = opt_bool("run_off_road");
  r.rear_end_striking = opt_bool("rear_end_striking");
  if (j.contains("tasks")) {
    if (!j["tasks"].is_array()) throw LoadError(lineno, "tasks", "expected an array");
    for (const auto& t : j["tasks"]) {
      if (!t.is_string()) throw LoadError(lineno, "tasks", "expected task names");
      r.tasks.push_back(t.get<std::string>());
    }
  }
  r.engagement_known = opt_bool("engagement_known");
  return r;
}

}  // namespace detail

// Parses dataset bytes. Every row becomes a record or the whole parse fails
// with a LoadError naming the line and field.
inline Dataset parse_dataset(std::string_view bytes, DataFormat format) {
  Dataset ds;
  ds.source_digest = content_digest(bytes);
  std::unordered_set<std::string> ids;

  auto accept = [&](EventRecord e, std::size_t lineno) {
    if (!ids.insert(e.event_id).second) throw LoadError(lineno, "event_id", "duplicate event id \"" + e.event_id + "\"");
    if (!e.engagement_known) {
      ++ds.excluded_unknown;
      return;
    }
    ds.events.push_back(std::move(e));
  };

  std::size_t lineno = 0;
  std::size_t pos = 0;
  bool header_seen = false;
  while (pos < bytes.size()) {
    std::size_t end = bytes.find('\n', pos);
    if (end == std::string_view::npos) end = bytes.size();
    std::string_view line = bytes.substr(pos, end - pos);
    pos = end + 1;
    ++lineno;
    if (format == DataFormat::Csv) {
      if (!header_seen) {
        if (line != kCsvHeader) throw LoadError(lineno, "<header>", "header does not match the canonical column list");
        header_seen = true;
        continue;
      }
      if (line.empty()) throw LoadError(lineno, "<row>", "empty line");
      accept(detail::build_record(detail::raw_from_csv(detail::split_csv_line(line, lineno), lineno), lineno), lineno);
    } else {
      if (line.empty()) continue;
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::parse_error& err) {
        throw LoadError(lineno, "<row>", std::string("invalid JSON: ") + err.what());
      }
      accept(detail::build_record(detail::raw_from_json(j, lineno), lineno), lineno);
    }
  }
  if (format == DataFormat::Csv && !header_seen) throw LoadError(1, "<header>", "missing header row");
  return ds;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline Dataset load_dataset(const std::string& path, DataFormat format) {
  return parse_dataset(read_file(path), format);
}

namespace detail {

inline std::string bool_str(bool b) { return b ? "true" : "false"; }

}  // namespace detail

inline std::string write_csv(const std::vector<EventRecord>& events) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& e : events) {
    const bool baseline = e.kind == EventKind::Baseline;
    out += detail::csv_escape(e.event_id);
    out += ',';
    out += to_string(e.kind);
    out += ',';
    if (e.severity) out += std::to_string(*e.severity);
    out += ',';
    if (baseline) out += detail::bool_str(e.balanced);
    out += ',';
    if (baseline) out += detail::bool_str(e.speed_over_5mph);
    out += ',';
    out += detail::bool_str(e.at_fault) + ',' + detail::bool_str(e.run_off_road) + ',' +
           detail::bool_str(e.rear_end_striking);
    for (std::size_t i = 0; i < kMaxTasksPerEvent; ++i) {
      out += ',';
      if (i < e.tasks.size()) out += detail::csv_escape(e.tasks[i].name);
    }
    out += ',';
    out += detail::bool_str(e.engagement_known);
    out += '\n';
  }
  return out;
}

inline std::string write_csv(const Dataset& ds) { return write_csv(ds.events); }

inline std::string write_jsonl(const std::vector<EventRecord>& events) {
  std::string out;
  for (const auto& e : events) {
    nlohmann::ordered_json j;
    const bool baseline = e.kind == EventKind::Baseline;
    j["event_id"] = e.event_id;
    j["kind"] = to_string(e.kind);
    j["severity"] = e.severity ? nlohmann::ordered_json(*e.severity) : nlohmann::ordered_json(nullptr);
    j["balanced"] = baseline ? nlohmann::ordered_json(e.balanced) : nlohmann::ordered_json(nullptr);
    j["speed_over_5mph"] = baseline ? nlohmann::ordered_json(e.speed_over_5mph) : nlohmann::ordered_json(nullptr);
    j["at_fault"] = e.at_fault;
    j["run_off_road"] = e.run_off_road;
    j["rear_end_striking"] = e.rear_end_striking;
    auto tasks = nlohmann::ordered_json::array();
    for (const auto& t : e.tasks) tasks.push_back(std::string(t.name));
    j["tasks"] = std::move(tasks);
    j["engagement_known"] = e.engagement_known;
    out += j.dump();
    out += '\n';
  }
  return out;
}

// Digest of the canonical csv form; equal for datasets with equal records.
inline std::string normalized_digest(const Dataset& ds) { return content_digest(write_csv(ds)); }

// ---------------------------------------------------------------------------
// Engagement breakdown

struct EngagementCounts {
  std::size_t n = 0;
  std::size_t no_task = 0;
  std::size_t sad = 0;
  std::size_t mad = 0;
  std::size_t three_plus = 0;

  double pct(std::size_t count) const { return n == 0 ? 0.0 : 100.0 * static_cast<double>(count) / static_cast<double>(n); }
  double no_task_pct() const { return pct(no_task); }
  double sad_pct() const { return pct(sad); }
  double mad_pct() const { return pct(mad); }
  double three_plus_pct() const { return pct(three_plus); }

  friend bool operator==(const EngagementCounts&, const EngagementCounts&) = default;
};

inline void tally(EngagementCounts& c, EngagementLevel lvl) {
  ++c.n;
  switch (lvl.label) {
    case Engagement::NoTask: ++c.no_task; break;
    case Engagement::SAD: ++c.sad; break;
    case Engagement::MAD: ++c.mad; break;
  }
  if (lvl.three_plus) ++c.three_plus;
}

inline EngagementCounts engagement_counts(const std::vector<EventRecord>& events, EventType type, Taxonomy taxonomy) {
  EngagementCounts c;
  for (const auto& e : events) {
    if (is_member(e, type)) tally(c, classify_engagement(e, taxonomy));
  }
  return c;
}

struct PrevalenceRow {
  EventType event_type{};
  Taxonomy taxonomy{};
  EngagementCounts counts;
};

// One row per event type per taxonomy (Shrp2 rows first). Rows with n = 0
// report 0 for every percentage.
inline std::vector<PrevalenceRow> validate_counts(const Dataset& ds) {
  std::vector<PrevalenceRow> rows;
  for (auto tax : kTaxonomies) {
    std::array<EngagementCounts, kEventTypes.size()> acc{};
    for (const auto& e : ds.events) {
      const auto members = membership_of(e);
      if (members.empty()) continue;
      const auto lvl = classify_engagement(e, tax);
      for (auto t : kEventTypes) {
        if (members.contains(t)) tally(acc[static_cast<std::size_t>(t)], lvl);
      }
    }
    for (auto t : kEventTypes) rows.push_back({t, tax, acc[static_cast<std::size_t>(t)]});
  }
  return rows;
}

}  // namespace madtasks
