#include <gtest/gtest.h>

#include "oracles.hpp"
#include "outage/errors.hpp"
#include "outage/model.hpp"

using namespace outage;

namespace {

Instance one_plant(int weeks, std::vector<int> da) {
  Instance inst = oracle::blank(weeks);
  inst.type2.push_back(oracle::plant(inst, 1.0, 10.0, static_cast<int>(da.size())));
  for (std::size_t k = 0; k < da.size(); ++k) inst.type2[0].cycles[k].da = da[k];
  return inst;
}

}  // namespace

TEST(DeriveCampaigns, SingleOutageUnfoldsToWeekSteps) {
  Instance inst = one_plant(4, {1});
  Schedule s = Schedule::unscheduled(inst);
  s.start[0][0] = 2;
  const auto tl = derive_timeline(inst, s, 0);
  ASSERT_EQ(tl.cycles.size(), 1u);
  EXPECT_EQ(tl.cycles[0].outage, (StepRange{2, 3}));
  EXPECT_EQ(tl.cycles[0].campaign, (StepRange{3, 4}));
  EXPECT_EQ(tl.initial_campaign, (StepRange{0, 2}));
}

TEST(DeriveCampaigns, AllUnscheduledIsOneCampaign) {
  Instance inst = one_plant(6, {1, 1});
  const auto tl = derive_timeline(inst, Schedule::unscheduled(inst), 0);
  EXPECT_TRUE(tl.cycles.empty());
  EXPECT_EQ(tl.initial_campaign, (StepRange{0, 6}));
}

TEST(DeriveCampaigns, TwoCyclesOnFiveWeeks) {
  Instance inst = one_plant(5, {1, 1});
  Schedule s = Schedule::unscheduled(inst);
  s.start[0] = {1, 3};
  const auto tl = derive_timeline(inst, s, 0);
  ASSERT_EQ(tl.cycles.size(), 2u);
  EXPECT_EQ(tl.cycles[0].campaign, (StepRange{2, 3}));
  EXPECT_EQ(tl.cycles[1].campaign, (StepRange{4, 5}));
}

TEST(DeriveCampaigns, OverlapIsStructuralError) {
  Instance inst = one_plant(6, {2, 1});
  Schedule s = Schedule::unscheduled(inst);
  s.start[0] = {1, 2};
  EXPECT_THROW(derive_timeline(inst, s, 0), StructuralError);
}

TEST(DeriveCampaigns, ScheduledAfterUnscheduledIsStructuralError) {
  Instance inst = one_plant(6, {1, 1});
  Schedule s = Schedule::unscheduled(inst);
  s.start[0][1] = 3;
  EXPECT_THROW(derive_timeline(inst, s, 0), StructuralError);
}

TEST(DeriveCampaigns, IntervalsPartitionHorizonOnGeneratedInstances) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto g = generate_instance(oracle::family(seed));
    const auto all = derive_campaigns(g.instance, g.witness);
    EXPECT_EQ(all, derive_campaigns(g.instance, g.witness));
    for (const auto& tl : all) {
      std::vector<int> cover(g.instance.steps(), 0);
      auto mark = [&](StepRange r) {
        for (int t = r.begin; t < r.end; ++t) ++cover[t];
      };
      mark(tl.initial_campaign);
      for (const auto& c : tl.cycles) {
        mark(c.outage);
        mark(c.campaign);
      }
      for (int t = 0; t < g.instance.steps(); ++t) ASSERT_EQ(cover[t], 1) << "seed " << seed << " step " << t;
    }
  }
}

TEST(TimeGrid, WeeksCoverStepsInOrder) {
  const TimeGrid g({2, 3, 1}, 4.0);
  EXPECT_EQ(g.steps(), 6);
  EXPECT_EQ(g.weeks(), 3);
  EXPECT_EQ(g.steps_of_week(1), (StepRange{2, 5}));
  EXPECT_EQ(g.week_of_step(5), 2);
  EXPECT_EQ(g.steps_of_weeks(1, 9), (StepRange{2, 6}));
  EXPECT_THROW(TimeGrid({2, 0}, 1.0), ValidationError);
  EXPECT_THROW(TimeGrid({2}, 0.0), ValidationError);
}

TEST(ProfileCurve, InterpolatesAndClamps) {
  const ProfileCurve pb({{0.0, 0.2}, {10.0, 0.6}, {20.0, 1.0}});
  EXPECT_DOUBLE_EQ(pb(0.0), 0.2);
  EXPECT_DOUBLE_EQ(pb(5.0), 0.4);
  EXPECT_DOUBLE_EQ(pb(15.0), 0.8);
  EXPECT_DOUBLE_EQ(pb(30.0), 1.0);
  EXPECT_DOUBLE_EQ(pb(-1.0), 0.2);
}

TEST(Validate, RejectsReloadBoundOrder) {
  Instance inst = one_plant(4, {1});
  inst.type2[0].cycles[0].rmin = 5.0;
  inst.type2[0].cycles[0].rmax = 4.0;
  try {
    validate(inst);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("rmin"), std::string::npos) << e.what();
  }
}

TEST(Validate, RejectsProfileNotReachingOne) {
  Instance inst = one_plant(4, {1});
  inst.type2[0].initial_campaign.bo = 10.0;
  inst.type2[0].initial_campaign.pb = ProfileCurve({{0.0, 0.1}, {10.0, 0.9}});
  EXPECT_THROW(validate(inst), ValidationError);
}

TEST(Validate, RejectsUnknownOutageReference) {
  Instance inst = one_plant(4, {1});
  inst.coupling.separations.push_back({{0, 0}, {1, 0}, 1, 1, 0, 3});
  EXPECT_THROW(validate(inst), ValidationError);
}

TEST(Numeric, CanonicalSurvivesTextRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, 123456.789012345, 1e-7, -2.5e9}) {
    const double c = canonical(v);
    EXPECT_EQ(std::stod(format_decimal(c)), c);
    EXPECT_LE(canonical_down(v), v);
    EXPECT_GE(canonical_up(v), v);
    EXPECT_EQ(canonical(canonical_down(v)), canonical_down(v));
  }
}
