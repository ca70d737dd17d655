#include <gtest/gtest.h>

#include "madtasks/serialize.hpp"
#include "support.hpp"

using namespace madtasks;
using namespace testing_support;

namespace {

Dataset small() {
  Dataset ds;
  const auto ht = tasks_of({"Cell phone, Holding", "Cell phone, Texting"});
  for (int i = 0; i < 6; ++i) ds.events.push_back(baseline("b" + std::to_string(i), i % 2 ? ht : std::vector<TaskCode>{}));
  for (int i = 0; i < 3; ++i) ds.events.push_back(baseline("s" + std::to_string(i), tasks_of({"Dancing"})));
  return ds;
}

std::vector<std::string> keys(const ojson& j) {
  std::vector<std::string> out;
  for (auto it = j.begin(); it != j.end(); ++it) out.push_back(it.key());
  return out;
}

}  // namespace

TEST(Serialize, GraphKeyOrderAndSchema) {
  const auto g = build_graph(small(), EventType::CDS, Cutoffs{5, 0, 0.0});
  const auto j = to_json(g);
  EXPECT_EQ(keys(j), (std::vector<std::string>{"schema", "event_type", "taxonomy", "population", "cutoffs",
                                                "unsimplified", "nodes", "edges"}));
  EXPECT_EQ(j["schema"], "graphspec/1");
  EXPECT_EQ(keys(j["nodes"][0]),
            (std::vector<std::string>{"id", "name", "count", "prevalence", "x", "y", "label", "label_visible"}));
  ASSERT_EQ(j["edges"].size(), 1u);
  EXPECT_EQ(keys(j["edges"][0]), (std::vector<std::string>{"a", "b", "count", "rel_a", "rel_b", "expected", "chi2",
                                                            "phi", "class", "label"}));
  // Nodes sorted by id.
  for (std::size_t i = 1; i < j["nodes"].size(); ++i) EXPECT_LT(j["nodes"][i - 1]["id"], j["nodes"][i]["id"]);
}

TEST(Serialize, RealsCarrySixSignificantDigits) {
  EXPECT_EQ(round_sig6(1.0 / 3.0), 0.333333);
  EXPECT_EQ(round_sig6(8.437857035666050), 8.43786);
  EXPECT_EQ(round_sig6(147.58175728042865), 147.582);
  EXPECT_EQ(real(2.0 / 3.0).dump(), "0.666667");
  const auto g = build_graph(small(), EventType::CDS, Cutoffs{5, 0, 0.0});
  // Three tasks, each in 3 of 9 events.
  const auto j = to_json(g);
  ASSERT_EQ(j["nodes"].size(), 3u);
  for (const auto& n : j["nodes"]) EXPECT_EQ(n["prevalence"].dump(), "0.333333");
}

TEST(Serialize, SmallExpectedEdgeFallsBackToPhi) {
  const auto g = build_graph(small(), EventType::CDS, Cutoffs{5, 0, 0.0});
  const auto j = to_json(g);
  const auto& e = j["edges"][0];
  // Expected 3*3/9 = 1 < 5: phi (here 1) decides the class.
  EXPECT_EQ(e["expected"].get<double>(), 1.0);
  EXPECT_EQ(e["phi"].get<double>(), 1.0);
  EXPECT_EQ(e["class"], "weak_positive");
  EXPECT_EQ(e["label"], "3 (100%; 100%)");
}

TEST(Serialize, DegenerateMarginalsGiveNulls) {
  // Dancing is present in every event of this population.
  Dataset ds;
  ds.events.push_back(baseline("x", tasks_of({"Dancing", "Reading"})));
  ds.events.push_back(baseline("y", tasks_of({"Dancing"})));
  const auto j = to_json(build_graph(ds, EventType::CDS, Cutoffs{5, 0, 0.0}));
  ASSERT_EQ(j["edges"].size(), 1u);
  EXPECT_TRUE(j["edges"][0]["chi2"].is_null());
  EXPECT_TRUE(j["edges"][0]["phi"].is_null());
  EXPECT_EQ(j["edges"][0]["class"], "indeterminate");
}

TEST(Serialize, ReportSchemas) {
  Dataset ds;
  int k = 0;
  for (const auto& ts : {std::vector<TaskCode>{}, tasks_of({"Dancing"}), tasks_of({"Dancing", "Reading", "Shaving"})}) {
    ds.events.push_back(baseline("b" + std::to_string(k), ts));
    auto c = crash("c" + std::to_string(k), 1, ts);
    c.at_fault = c.run_off_road = c.rear_end_striking = true;
    ds.events.push_back(c);
    ++k;
  }
  const auto r = compute_report(ds, Taxonomy::G14);
  const auto p = prevalence_json(r);
  EXPECT_EQ(p["schema"], "prevalence/1");
  EXPECT_EQ(p["taxonomy"], "g14");
  EXPECT_EQ(p["rows"].size(), 9u);
  EXPECT_EQ(keys(p["rows"][0]), (std::vector<std::string>{"event_type", "n", "no_task", "sad", "mad", "three_plus",
                                                           "no_task_pct", "sad_pct", "mad_pct", "three_plus_pct"}));
  const auto o = odds_json(r);
  EXPECT_EQ(o["schema"], "odds/1");
  EXPECT_EQ(o["rows"].size(), 24u);
  EXPECT_EQ(o["rows"][0]["or"].get<double>(), 1.0);
  EXPECT_EQ(to_json(std::vector<GraphSpec>{})["schema"], "comparison/1");
  const auto text = dump(p);
  EXPECT_EQ(text.back(), '\n');
  EXPECT_EQ(text.substr(0, 4), "{\n  ");
}
