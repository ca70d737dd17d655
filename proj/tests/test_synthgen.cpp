#include <gtest/gtest.h>

#include <chrono>
#include <set>

#include "madtasks/cooccur.hpp"
#include "madtasks/render.hpp"
#include "madtasks/synthgen.hpp"
#include "support.hpp"

using namespace madtasks;
using namespace testing_support;

namespace {

CalibrationTarget published_target() {
  return load_calibration_target(std::string(MADTASKS_DATA_DIR) + "/calibration_target.json");
}

const Dataset& generated() {
  static const Dataset ds = generate(published_target());
  return ds;
}

// Independent membership predicate, written out per label.
bool in_type(const EventRecord& e, const std::string& label) {
  const bool base = e.kind == EventKind::Baseline;
  const int sev = e.severity.value_or(0);
  const bool l13 = e.kind == EventKind::Crash && sev >= 1 && sev <= 3;
  if (label == "CDS") return base && e.balanced && e.speed_over_5mph;
  if (label == "CNC") return !base;
  if (label == "L1-4") return e.kind == EventKind::Crash;
  if (label == "L1-2") return e.kind == EventKind::Crash && sev <= 2;
  if (label == "L1-3") return l13;
  if (label == "L1-3+NC") return l13 || e.kind == EventKind::NearCrash;
  if (label == "L1-3-at-fault") return l13 && e.at_fault;
  if (label == "run-off-road") return l13 && e.run_off_road;
  if (label == "rear-end-striking") return l13 && e.rear_end_striking;
  ADD_FAILURE() << label;
  return false;
}

struct Tally {
  std::size_t n = 0, mad = 0, three = 0, g_mad = 0, g_three = 0;
};

Tally tally_type(const Dataset& ds, const std::string& label) {
  Tally t;
  for (const auto& e : ds.events) {
    if (!in_type(e, label)) continue;
    ++t.n;
    std::set<int> ids, groups;
    for (const auto& c : e.tasks) {
      ids.insert(c.id);
      groups.insert(group_id_of(c));
    }
    t.mad += ids.size() >= 2;
    t.three += ids.size() >= 3;
    t.g_mad += groups.size() >= 2;
    t.g_three += groups.size() >= 3;
  }
  return t;
}

std::size_t with_task(const Dataset& ds, const std::string& label, std::initializer_list<const char*> names) {
  const auto want = tasks_of(names);
  std::size_t n = 0;
  for (const auto& e : ds.events) {
    if (!in_type(e, label)) continue;
    bool all = true;
    for (const auto& w : want) all = all && std::find(e.tasks.begin(), e.tasks.end(), w) != e.tasks.end();
    n += all;
  }
  return n;
}

const Edge* find_edge(const GraphSpec& g, const char* a, const char* b) {
  int x = parse_task(a).id, y = parse_task(b).id;
  if (x > y) std::swap(x, y);
  for (const auto& e : g.edges) {
    if (e.a == x && e.b == y) return &e;
  }
  return nullptr;
}

constexpr const char* kHolding = "Cell phone, Holding";
constexpr const char* kTexting = "Cell phone, Texting";
constexpr const char* kThh = "Cell phone, Talking/listening, hand-held";
constexpr const char* kOed = "Other external distraction";
constexpr const char* kPassenger = "Passenger in adjacent seat – interaction";
constexpr const char* kGlance = "Other non-specific internal eye glance";

}  // namespace

TEST(Synthgen, PublishedPrevalenceWithinOnePoint) {
  struct Row {
    const char* label;
    std::size_t n;
    int mad, three, g_mad, g_three;
  };
  // Published percentages; the L1-3+NC population follows from nesting instead.
  const Row rows[] = {
      {"CDS", 19991, 11, 2, 9, 1},        {"L1-4", 1524, 20, 4, 15, 2},        {"CNC", 4224, 22, 6, 16, 2},
      {"L1-2", 271, 23, 6, 17, 3},        {"L1-3+NC", 3591, 23, 6, 17, 2},     {"L1-3", 891, 26, 6, 19, 2},
      {"L1-3-at-fault", 622, 30, 7, 21, 2}, {"run-off-road", 402, 32, 6, 22, 2}, {"rear-end-striking", 112, 39, 11, 28, 4},
  };
  for (const auto& r : rows) {
    const auto t = tally_type(generated(), r.label);
    EXPECT_EQ(t.n, r.n) << r.label;
    auto pct = [&](std::size_t c) { return 100.0 * static_cast<double>(c) / static_cast<double>(t.n); };
    EXPECT_NEAR(pct(t.mad), r.mad, 1.0) << r.label;
    EXPECT_NEAR(pct(t.three), r.three, 1.0) << r.label;
    EXPECT_NEAR(pct(t.g_mad), r.g_mad, 1.0) << r.label;
    EXPECT_NEAR(pct(t.g_three), r.g_three, 1.0) << r.label;
  }
}

TEST(Synthgen, EngagementMixNearTarget) {
  const auto target = published_target();
  for (const auto& [type, goal] : target.event_types) {
    const auto c = engagement_counts(generated().events, type, Taxonomy::Shrp2);
    EXPECT_NEAR(c.no_task_pct(), goal.no_task_pct, 1.0) << to_string(type);
    EXPECT_NEAR(c.sad_pct(), goal.sad_pct, 1.0) << to_string(type);
  }
}

TEST(Synthgen, PinnedCountsExact) {
  const auto& ds = generated();
  EXPECT_EQ(with_task(ds, "CDS", {kHolding}), 437u);
  EXPECT_EQ(with_task(ds, "CDS", {kTexting}), 386u);
  EXPECT_EQ(with_task(ds, "CDS", {kHolding, kTexting}), 43u);
  EXPECT_EQ(with_task(ds, "CDS", {kOed}), 2021u);
  EXPECT_EQ(with_task(ds, "CDS", {kThh}), 639u);
  EXPECT_EQ(with_task(ds, "CDS", {kThh, kOed}), 32u);
  EXPECT_EQ(with_task(ds, "CDS", {kPassenger, kGlance}), 30u);
  EXPECT_EQ(with_task(ds, "CNC", {kPassenger, kGlance}), 60u);
  EXPECT_EQ(with_task(ds, "CNC", {kHolding, kTexting}), 140u);
}

TEST(Synthgen, PublishedEdgeRegimes) {
  const auto& ds = generated();
  const auto cds = build_graph(ds, EventType::CDS, Cutoffs{62, 0, 0.0});
  const auto* ht = find_edge(cds, kHolding, kTexting);
  ASSERT_NE(ht, nullptr);
  EXPECT_EQ(ht->edge_class, EdgeClass::StrongerThanIndependent);
  // 437 * 386 / 19991
  EXPECT_NEAR(ht->stats.expected_ab, 8.4379, 1e-4);
  EXPECT_EQ(edge_label(*ht), "43 (10%; 11%)");
  const auto* to = find_edge(cds, kThh, kOed);
  ASSERT_NE(to, nullptr);
  EXPECT_EQ(edge_label(*to), "32 (2%; 5%)");

  const auto* pg = find_edge(cds, kPassenger, kGlance);
  ASSERT_NE(pg, nullptr);
  EXPECT_EQ(pg->edge_class, EdgeClass::WeakerThanIndependent);
  const auto cnc = build_graph(ds, EventType::CNC, Cutoffs{62, 0, 0.0});
  const auto* pg2 = find_edge(cnc, kPassenger, kGlance);
  ASSERT_NE(pg2, nullptr);
  EXPECT_EQ(pg2->edge_class, EdgeClass::StrongerThanIndependent);
}

TEST(Synthgen, OedIsSecondLargestCdsNode) {
  const auto g = build_graph(generated(), EventType::CDS, Cutoffs{5, 10, 0.3});
  ASSERT_EQ(g.nodes.size(), 5u);
  std::vector<std::uint64_t> counts;
  std::uint64_t oed = 0;
  for (const auto& n : g.nodes) {
    counts.push_back(n.count);
    if (n.name == kOed) oed = n.count;
  }
  std::sort(counts.rbegin(), counts.rend());
  EXPECT_EQ(oed, counts[1]);
}

TEST(Synthgen, DeterministicAndLoadable) {
  const auto a = write_csv(generate(published_target()));
  const auto b = write_csv(generate(published_target()));
  EXPECT_EQ(a, b);
  const auto back = parse_dataset(a, DataFormat::Csv);
  EXPECT_EQ(back.events.size(), generated().events.size());
  EXPECT_EQ(back.source_digest, generated().source_digest);
  auto other = published_target();
  other.seed = 7;
  EXPECT_NE(write_csv(generate(other)), a);
}

TEST(Synthgen, ScaledTargetIsFast) {
  auto t = published_target();
  for (auto& [type, goal] : t.event_types) goal.n = goal.n * 4 / 3;
  // Keep nesting consistent after scaling.
  auto& nc = t.event_types[EventType::L1_3_NC];
  nc.n = t.event_types[EventType::L1_3].n + t.event_types[EventType::CNC].n - t.event_types[EventType::L1_4].n;
  const auto start = std::chrono::steady_clock::now();
  const auto ds = generate(t);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_GE(ds.events.size(), 32000u);
  EXPECT_LT(secs, 5.0);
}

TEST(Synthgen, EmptyTypeAllowed) {
  CalibrationTarget t;
  t.seed = 1;
  t.event_types[EventType::CDS] = EngagementTarget{100, 50, 40, 10, 2, 8, 1};
  t.event_types[EventType::CNC] = EngagementTarget{0, 0, 0, 0, 0, 0, 0};
  const auto ds = generate(t);
  EXPECT_EQ(ds.events.size(), 100u);
  EXPECT_EQ(tally_type(ds, "CNC").n, 0u);
}

TEST(Synthgen, InfeasibleTargetsRejected) {
  auto t = published_target();
  t.pins[EventType::CDS].pair_counts[0].count = 500;  // exceeds 437 and 386
  EXPECT_THROW(generate(t), InfeasibleError);

  t = published_target();
  t.event_types[EventType::L1_3_NC].n = 3613;
  try {
    generate(t);
    FAIL();
  } catch (const InfeasibleError& e) {
    EXPECT_NE(std::string(e.what()).find("L1-3+NC"), std::string::npos) << e.what();
  }

  t = published_target();
  t.event_types[EventType::CDS].mad_pct = 30;
  EXPECT_THROW(generate(t), InfeasibleError);

  t = published_target();
  t.event_types[EventType::RearEndStriking].g14_three_plus_pct = 20;
  EXPECT_THROW(generate(t), InfeasibleError);
}

TEST(Synthgen, TargetDocumentErrors) {
  EXPECT_THROW(parse_calibration_target(nlohmann::json::array()), ContractViolation);
  EXPECT_THROW(parse_calibration_target(nlohmann::json::parse(R"({"event_types":{"XYZ":{"n":1}}})")),
               ContractViolation);
  EXPECT_THROW(parse_calibration_target(nlohmann::json::parse(
                   R"({"event_types":{},"pins":{"CDS":{"task_counts":{"No such task":3}}}})")),
               RegistryError);
}
