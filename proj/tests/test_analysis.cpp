#include <gtest/gtest.h>

#include <random>

#include "madtasks/analysis.hpp"
#include "madtasks/synthgen.hpp"
#include "support.hpp"

using namespace madtasks;
using namespace testing_support;

namespace {

// Every safety-critical type gets the same population as CDS.
Dataset uniform_mix() {
  Dataset ds;
  const auto one = tasks_of({"Dancing"});
  const auto three = tasks_of({"Dancing", "Reading", "Shaving"});
  int k = 0;
  for (const auto& ts : {std::vector<TaskCode>{}, one, three}) {
    ds.events.push_back(baseline("b" + std::to_string(k), ts));
    auto c = crash("c" + std::to_string(k), 2, ts);
    c.at_fault = c.run_off_road = c.rear_end_striking = true;
    ds.events.push_back(c);
    auto nc = near_crash("n" + std::to_string(k), ts);
    ds.events.push_back(nc);
    ++k;
  }
  return ds;
}

const Dataset& calibrated() {
  static const Dataset ds = generate(load_calibration_target(std::string(MADTASKS_DATA_DIR) + "/calibration_target.json"));
  return ds;
}

}  // namespace

TEST(ComputeReport, IdenticalMixGivesUnitOddsRatios) {
  for (auto tax : kTaxonomies) {
    const auto r = compute_report(uniform_mix(), tax);
    ASSERT_EQ(r.odds.size(), 24u);
    for (const auto& o : r.odds) EXPECT_DOUBLE_EQ(o.or_hat, 1.0) << to_string(o.event_type);
  }
}

TEST(ComputeReport, CrossTabsUseCdsControls) {
  const auto ds = uniform_mix();
  const auto r = compute_report(ds, Taxonomy::Shrp2);
  const auto& cds = r.find_prevalence(EventType::CDS)->counts;
  for (const auto& o : r.odds) {
    const auto& cases = r.find_prevalence(o.event_type)->counts;
    EXPECT_EQ(o.cross_tab.d, cds.no_task);
    EXPECT_EQ(o.cross_tab.c, cases.no_task);
    EXPECT_LE(o.cross_tab.a + o.cross_tab.c, cases.n);
    EXPECT_LE(o.cross_tab.b + o.cross_tab.d, cds.n);
    EXPECT_EQ(o.reference, Reference::NoTasks);
  }
  // Type-major order, SAD then MAD then 3+.
  EXPECT_EQ(r.odds[0].event_type, EventType::CNC);
  EXPECT_EQ(r.odds[0].behavior, Behavior::SAD);
  EXPECT_EQ(r.odds[2].behavior, Behavior::ThreePlus);
  EXPECT_EQ(r.odds[23].event_type, EventType::RearEndStriking);
}

TEST(ComputeReport, EmptyPopulationNamesTheType) {
  auto ds = uniform_mix();
  for (auto& e : ds.events) e.rear_end_striking = false;
  try {
    compute_report(ds, Taxonomy::Shrp2);
    FAIL();
  } catch (const EmptyPopulationError& e) {
    EXPECT_EQ(e.event_type(), "rear-end-striking");
  }
}

TEST(ComputeReport, ZeroCellCarriesStratum) {
  auto ds = uniform_mix();
  // Both engaged controls collapse to SAD under G14.
  ds.events[6].tasks = tasks_of({"Dancing", "Talking/singing, audience unknown"});
  try {
    compute_report(ds, Taxonomy::G14);
    FAIL();
  } catch (const ZeroCellError& e) {
    EXPECT_EQ(e.cell(), 'b');
    EXPECT_NE(std::string(e.what()).find("CNC MAD/NoTasks g14"), std::string::npos) << e.what();
  }
}

TEST(ComputeReport, CalibratedOddsRatiosNearPublished) {
  const auto s = compute_report(calibrated(), Taxonomy::Shrp2);
  EXPECT_NEAR(s.find_or(EventType::CNC, Behavior::MAD)->or_hat, 2.38, 0.15 * 2.38);
  const auto g = compute_report(calibrated(), Taxonomy::G14);
  EXPECT_NEAR(g.find_or(EventType::L1_3, Behavior::MAD)->or_hat, 3.03, 0.15 * 3.03);
}

TEST(ComputeReport, Deterministic) {
  const auto a = compute_report(calibrated(), Taxonomy::G14);
  const auto b = compute_report(calibrated(), Taxonomy::G14);
  EXPECT_EQ(odds_csv(a), odds_csv(b));
  EXPECT_EQ(prevalence_csv(prevalence_rows(a)), prevalence_csv(prevalence_rows(b)));
}

TEST(Sensitivity, CalibratedMadDrops) {
  const auto s = sensitivity_compare(calibrated());
  auto row = [&](EventType t) {
    for (const auto& r : s.rows) {
      if (r.event_type == t) return r;
    }
    return SensitivityRow{};
  };
  EXPECT_EQ(percent_half_up(row(EventType::CDS).shrp2.mad, row(EventType::CDS).shrp2.n), 11);
  EXPECT_EQ(percent_half_up(row(EventType::CDS).g14.mad, row(EventType::CDS).g14.n), 9);
  const auto re = row(EventType::RearEndStriking);
  EXPECT_EQ(percent_half_up(re.shrp2.mad, re.shrp2.n), 39);
  EXPECT_EQ(percent_half_up(re.g14.mad, re.g14.n), 28);
  EXPECT_LT(re.mad_pct_delta, 0.0);
  EXPECT_FALSE(row(EventType::CDS).or_mad_shrp2.has_value());
  EXPECT_TRUE(re.or_mad_delta.has_value());
}

TEST(Sensitivity, InvariantsOnRandomData) {
  std::mt19937_64 rng(41);
  for (int round = 0; round < 20; ++round) {
    Dataset ds = uniform_mix();  // guarantees nonzero cells
    for (int i = 0; i < 300; ++i) ds.events.push_back(random_event(rng, static_cast<std::size_t>(i)));
    SensitivityReport s;
    try {
      s = sensitivity_compare(ds);
    } catch (const ZeroCellError&) {
      continue;
    }
    for (const auto& r : s.rows) {
      EXPECT_EQ(r.shrp2.sad + r.shrp2.mad, r.g14.sad + r.g14.mad);
      EXPECT_LE(r.g14.mad, r.shrp2.mad);
      EXPECT_LE(r.g14.three_plus, r.shrp2.three_plus);
    }
  }
}

TEST(Csv, ShapesAndHeaders) {
  const auto s = sensitivity_compare(uniform_mix());
  const auto odds = odds_csv({&s.shrp2, &s.g14});
  EXPECT_EQ(odds.substr(0, odds.find('\n')), "taxonomy,event_type,behavior,reference,a,b,c,d,or,ci_low,ci_high");
  EXPECT_EQ(std::count(odds.begin(), odds.end(), '\n'), 49);
  EXPECT_NE(odds.find("shrp2,CNC,SAD,NoTasks,2,1,2,1,1.0000,"), std::string::npos);
  const auto prev = prevalence_csv(prevalence_rows(s.g14));
  EXPECT_EQ(std::count(prev.begin(), prev.end(), '\n'), 10);
  EXPECT_NE(prev.find("g14,CDS,3,1,1,1,1,33.3333,33.3333,33.3333,33.3333"), std::string::npos) << prev;
  const auto sens = sensitivity_csv(s);
  EXPECT_EQ(std::count(sens.begin(), sens.end(), '\n'), 10);
  EXPECT_NE(sens.find("\nCDS,3,2,1,1,33.3333,33.3333,0.0000,,,\n"), std::string::npos) << sens;
}
