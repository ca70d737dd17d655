#pragma once

// End-to-end report: engagement prevalence per event type and crude odds
// ratios of SAD, MAD and 3+ tasks against no task engagement, with CDS as
// controls for every case definition.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "madtasks/dataset.hpp"
#include "madtasks/error.hpp"
#include "madtasks/event.hpp"
#include "madtasks/format.hpp"
#include "madtasks/stats.hpp"

namespace madtasks {

inline constexpr std::array<Behavior, 3> kBehaviors{Behavior::SAD, Behavior::MAD, Behavior::ThreePlus};

struct PrevalenceEntry {
  EventType event_type{};
  EngagementCounts counts;
};

struct AnalysisReport {
  Taxonomy taxonomy = Taxonomy::Shrp2;
  std::vector<PrevalenceEntry> prevalence;  // event-type order
  std::vector<OddsRatioResult> odds;        // type-major, then SAD, MAD, 3+

  const PrevalenceEntry* find_prevalence(EventType t) const {
    for (const auto& p : prevalence) {
      if (p.event_type == t) return &p;
    }
    return nullptr;
  }
  const OddsRatioResult* find_or(EventType t, Behavior b) const {
    for (const auto& o : odds) {
      if (o.event_type == t && o.behavior == b) return &o;
    }
    return nullptr;
  }
};

inline std::uint64_t behavior_count(const EngagementCounts& c, Behavior b) {
  switch (b) {
    case Behavior::SAD: return c.sad;
    case Behavior::MAD: return c.mad;
    case Behavior::ThreePlus: return c.three_plus;
  }
  return 0;
}

inline CrossTab cross_tab(const EngagementCounts& cases, const EngagementCounts& controls, Behavior b) {
  return CrossTab{behavior_count(cases, b), behavior_count(controls, b), cases.no_task, controls.no_task};
}

// Prevalence only; empty event types are kept with n = 0.
inline AnalysisReport prevalence_report(const Dataset& ds, Taxonomy taxonomy) {
  AnalysisReport report;
  report.taxonomy = taxonomy;
  std::array<EngagementCounts, kEventTypes.size()> acc{};
  for (const auto& e : ds.events) {
    const auto members = membership_of(e);
    if (members.empty()) continue;
    const auto lvl = classify_engagement(e, taxonomy);
    for (auto t : kEventTypes) {
      if (members.contains(t)) tally(acc[static_cast<std::size_t>(t)], lvl);
    }
  }
  for (auto t : kEventTypes) report.prevalence.push_back({t, acc[static_cast<std::size_t>(t)]});
  return report;
}

inline AnalysisReport compute_report(const Dataset& ds, Taxonomy taxonomy, double z = kDefaultZ) {
  AnalysisReport report = prevalence_report(ds, taxonomy);
  for (const auto& p : report.prevalence) {
    if (p.counts.n == 0) throw EmptyPopulationError(std::string(to_string(p.event_type)));
  }
  const auto& controls = report.find_prevalence(EventType::CDS)->counts;
  for (auto t : kSafetyCriticalTypes) {
    const auto& cases = report.find_prevalence(t)->counts;
    for (auto b : kBehaviors) {
      report.odds.push_back(odds_ratio(cross_tab(cases, controls, b), b, Reference::NoTasks, t, taxonomy, z));
    }
  }
  return report;
}

struct SensitivityRow {
  EventType event_type{};
  EngagementCounts shrp2;
  EngagementCounts g14;
  double mad_pct_delta = 0;           // g14 - shrp2, percentage points
  std::optional<double> or_mad_shrp2;  // absent for CDS
  std::optional<double> or_mad_g14;
  std::optional<double> or_mad_delta;
};

struct SensitivityReport {
  AnalysisReport shrp2;
  AnalysisReport g14;
  std::vector<SensitivityRow> rows;
};

inline SensitivityReport sensitivity_compare(const Dataset& ds, double z = kDefaultZ) {
  SensitivityReport s{compute_report(ds, Taxonomy::Shrp2, z), compute_report(ds, Taxonomy::G14, z), {}};
  for (auto t : kEventTypes) {
    SensitivityRow row;
    row.event_type = t;
    row.shrp2 = s.shrp2.find_prevalence(t)->counts;
    row.g14 = s.g14.find_prevalence(t)->counts;
    if (row.shrp2.sad + row.shrp2.mad != row.g14.sad + row.g14.mad || row.shrp2.no_task != row.g14.no_task) {
      throw ContractViolation("engagement prevalence differs between taxonomies for " + std::string(to_string(t)));
    }
    row.mad_pct_delta = row.g14.mad_pct() - row.shrp2.mad_pct();
    if (t != EventType::CDS) {
      row.or_mad_shrp2 = s.shrp2.find_or(t, Behavior::MAD)->or_hat;
      row.or_mad_g14 = s.g14.find_or(t, Behavior::MAD)->or_hat;
      row.or_mad_delta = *row.or_mad_g14 - *row.or_mad_shrp2;
    }
    s.rows.push_back(row);
  }
  return s;
}

// ---------------------------------------------------------------------------
// CSV forms

inline std::string prevalence_csv(const std::vector<PrevalenceRow>& rows) {
  std::string out = "taxonomy,event_type,n,no_task,sad,mad,three_plus,no_task_pct,sad_pct,mad_pct,three_plus_pct\n";
  for (const auto& r : rows) {
    const auto& c = r.counts;
    out += std::string(to_string(r.taxonomy)) + ',' + std::string(to_string(r.event_type)) + ',' +
           std::to_string(c.n) + ',' + std::to_string(c.no_task) + ',' + std::to_string(c.sad) + ',' +
           std::to_string(c.mad) + ',' + std::to_string(c.three_plus) + ',' + fixed(c.no_task_pct(), 4) + ',' +
           fixed(c.sad_pct(), 4) + ',' + fixed(c.mad_pct(), 4) + ',' + fixed(c.three_plus_pct(), 4) + '\n';
  }
  return out;
}

inline std::vector<PrevalenceRow> prevalence_rows(const AnalysisReport& r) {
  std::vector<PrevalenceRow> rows;
  for (const auto& p : r.prevalence) rows.push_back({p.event_type, r.taxonomy, p.counts});
  return rows;
}

inline std::string odds_csv(const std::vector<const AnalysisReport*>& reports) {
  std::string out = "taxonomy,event_type,behavior,reference,a,b,c,d,or,ci_low,ci_high\n";
  for (const auto* rep : reports) {
    for (const auto& o : rep->odds) {
      out += std::string(to_string(o.taxonomy)) + ',' + std::string(to_string(o.event_type)) + ',' +
             std::string(to_string(o.behavior)) + ',' + std::string(to_string(o.reference)) + ',' +
             std::to_string(o.cross_tab.a) + ',' + std::to_string(o.cross_tab.b) + ',' +
             std::to_string(o.cross_tab.c) + ',' + std::to_string(o.cross_tab.d) + ',' + fixed(o.or_hat, 4) + ',' +
             fixed(o.ci_low, 4) + ',' + fixed(o.ci_high, 4) + '\n';
    }
  }
  return out;
}

inline std::string odds_csv(const AnalysisReport& r) { return odds_csv(std::vector<const AnalysisReport*>{&r}); }

inline std::string sensitivity_csv(const SensitivityReport& s) {
  std::string out =
      "event_type,n,engaged,mad_shrp2,mad_g14,mad_pct_shrp2,mad_pct_g14,mad_pct_delta,or_mad_shrp2,or_mad_g14,"
      "or_mad_delta\n";
  auto opt = [](const std::optional<double>& v) { return v ? fixed(*v, 4) : std::string(); };
  for (const auto& r : s.rows) {
    out += std::string(to_string(r.event_type)) + ',' + std::to_string(r.shrp2.n) + ',' +
           std::to_string(r.shrp2.sad + r.shrp2.mad) + ',' + std::to_string(r.shrp2.mad) + ',' +
           std::to_string(r.g14.mad) + ',' + fixed(r.shrp2.mad_pct(), 4) + ',' + fixed(r.g14.mad_pct(), 4) + ',' +
           fixed(r.mad_pct_delta, 4) + ',' + opt(r.or_mad_shrp2) + ',' + opt(r.or_mad_g14) + ',' +
           opt(r.or_mad_delta) + '\n';
  }
  return out;
}

}  // namespace madtasks
