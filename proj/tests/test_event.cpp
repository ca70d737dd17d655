#include <gtest/gtest.h>

#include <random>

#include "madtasks/event.hpp"
#include "support.hpp"

using namespace madtasks;
using namespace testing_support;

namespace {

std::vector<EventType> members(const EventRecord& e) { return membership_of(e).to_vector(); }

}  // namespace

TEST(Membership, SevereRearEndAtFaultCrash) {
  auto e = crash("c", 2);
  e.rear_end_striking = true;
  e.at_fault = true;
  EXPECT_EQ(members(e), (std::vector<EventType>{EventType::CNC, EventType::L1_4, EventType::L1_2, EventType::L1_3,
                                                 EventType::L1_3_NC, EventType::L1_3_AtFault,
                                                 EventType::RearEndStriking}));
}

TEST(Membership, NearCrash) {
  EXPECT_EQ(members(near_crash("n")), (std::vector<EventType>{EventType::CNC, EventType::L1_3_NC}));
}

TEST(Membership, TireStrikeCrash) {
  auto e = crash("c", 4);
  e.at_fault = e.run_off_road = e.rear_end_striking = true;
  EXPECT_EQ(members(e), (std::vector<EventType>{EventType::CNC, EventType::L1_4}));
}

TEST(Membership, BalancedBaselineOverFiveMph) {
  EXPECT_EQ(members(baseline("b")), std::vector<EventType>{EventType::CDS});
  auto slow = baseline("s");
  slow.speed_over_5mph = false;
  EXPECT_TRUE(membership_of(slow).empty());
  auto extra = baseline("x");
  extra.balanced = false;
  EXPECT_TRUE(membership_of(extra).empty());
}

TEST(Membership, NestingHoldsOnRandomEvents) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 5000; ++i) {
    const auto e = random_event(rng, static_cast<std::size_t>(i));
    const auto m = membership_of(e);
    auto in = [&](EventType t) { return m.contains(t); };
    if (in(EventType::L1_2)) EXPECT_TRUE(in(EventType::L1_3));
    if (in(EventType::L1_3)) EXPECT_TRUE(in(EventType::L1_4));
    if (in(EventType::L1_4)) EXPECT_TRUE(in(EventType::CNC));
    for (auto t : {EventType::RearEndStriking, EventType::RunOffRoad, EventType::L1_3_AtFault}) {
      if (in(t)) EXPECT_TRUE(in(EventType::L1_3));
    }
    if (in(EventType::L1_3)) EXPECT_TRUE(in(EventType::L1_3_NC));
    if (in(EventType::CDS)) EXPECT_EQ(m.size(), 1u);
  }
}

TEST(TaskSet, PhonePairUnderBothTaxonomies) {
  const auto e = baseline("b", tasks_of({"Cell phone, Holding", "Cell phone, Texting"}));
  EXPECT_EQ(task_set(e, Taxonomy::Shrp2), (std::vector<int>{15, 18}));
  EXPECT_EQ(task_set(e, Taxonomy::G14), std::vector<int>{5});
}

TEST(TaskSet, EmptyUnderEitherTaxonomy) {
  const auto e = baseline("b");
  EXPECT_TRUE(task_set(e, Taxonomy::Shrp2).empty());
  EXPECT_TRUE(task_set(e, Taxonomy::G14).empty());
}

TEST(TaskSet, UnknownEngagementIsAContractViolation) {
  auto e = baseline("b");
  e.engagement_known = false;
  EXPECT_THROW(task_set(e, Taxonomy::Shrp2), ContractViolation);
  EXPECT_THROW(classify_engagement(e, Taxonomy::G14), ContractViolation);
}

TEST(Engagement, Examples) {
  EXPECT_EQ(classify_engagement(baseline("b"), Taxonomy::Shrp2), (EngagementLevel{Engagement::NoTask, false}));
  const auto phone = baseline("p", tasks_of({"Cell phone, Holding", "Cell phone, Texting"}));
  EXPECT_EQ(classify_engagement(phone, Taxonomy::Shrp2), (EngagementLevel{Engagement::MAD, false}));
  // Both tasks share a group, so the general definition sees one task.
  ASSERT_EQ(group_of("Cell phone, Holding").group_id, group_of("Cell phone, Texting").group_id);
  EXPECT_EQ(classify_engagement(phone, Taxonomy::G14), (EngagementLevel{Engagement::SAD, false}));
  const auto three = baseline("t", tasks_of({"Dancing", "Reading", "Shaving"}));
  EXPECT_EQ(classify_engagement(three, Taxonomy::Shrp2), (EngagementLevel{Engagement::MAD, true}));
  EXPECT_EQ(classify_engagement(three, Taxonomy::G14), (EngagementLevel{Engagement::MAD, true}));
  const auto two_groups = baseline("u", tasks_of({"Dancing", "Talking/singing, audience unknown", "Shaving"}));
  EXPECT_EQ(classify_engagement(two_groups, Taxonomy::G14), (EngagementLevel{Engagement::MAD, false}));
}

TEST(Engagement, UnknownTypeTaskCountsAsATask) {
  const auto e = baseline("b", tasks_of({"Unknown type (secondary task present)"}));
  EXPECT_EQ(classify_engagement(e, Taxonomy::Shrp2).label, Engagement::SAD);
  EXPECT_EQ(classify_engagement(e, Taxonomy::G14).label, Engagement::SAD);
}

TEST(Engagement, PartitionAndCoarseningOnRandomEvents) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 5000; ++i) {
    const auto e = random_event(rng, static_cast<std::size_t>(i));
    const auto s = classify_engagement(e, Taxonomy::Shrp2);
    const auto g = classify_engagement(e, Taxonomy::G14);
    EXPECT_EQ(s.label == Engagement::NoTask, e.tasks.empty());
    EXPECT_EQ(g.label == Engagement::NoTask, e.tasks.empty());
    EXPECT_EQ(s.label == Engagement::SAD, e.tasks.size() == 1);
    EXPECT_EQ(s.three_plus, e.tasks.size() == 3);
    if (g.label == Engagement::MAD) EXPECT_EQ(s.label, Engagement::MAD);
    if (g.three_plus) EXPECT_TRUE(s.three_plus);
    EXPECT_LE(task_set(e, Taxonomy::G14).size(), task_set(e, Taxonomy::Shrp2).size());
  }
}

TEST(Record, InvariantChecks) {
  EXPECT_NO_THROW(check_record(crash("c", 3)));
  auto bad = baseline("b");
  bad.severity = 2;
  EXPECT_THROW(check_record(bad), ContractViolation);
  auto missing = crash("c", 1);
  missing.severity.reset();
  EXPECT_THROW(check_record(missing), ContractViolation);
  auto four = baseline("f", tasks_of({"Dancing", "Reading", "Writing", "Shaving"}));
  EXPECT_THROW(check_record(four), ContractViolation);
  auto dup = baseline("d", tasks_of({"Dancing", "Dancing"}));
  EXPECT_THROW(check_record(dup), ContractViolation);
  EXPECT_THROW(check_record(crash("c", 5)), ContractViolation);
}

TEST(Labels, EventTypeLabelsRoundTrip) {
  for (auto t : kEventTypes) EXPECT_EQ(parse_event_type(to_string(t)), t);
  EXPECT_EQ(parse_event_type("L1-3 NC"), EventType::L1_3_NC);
  EXPECT_FALSE(parse_event_type("NOPE"));
  EXPECT_EQ(parse_taxonomy("g14"), Taxonomy::G14);
  EXPECT_FALSE(parse_taxonomy("G15"));
}
