#include <gtest/gtest.h>

#include "evonet/trial.hpp"
#include "test_support.hpp"

namespace {

using evonet::AttrValue;
using evonet::TrialStatus;
using testing_support::single_defector;
using testing_support::small_project;

TEST(TrialStatus, TransitionTable) {
  using S = TrialStatus;
  EXPECT_TRUE(evonet::transition_allowed(S::Ready, S::Queued));
  EXPECT_TRUE(evonet::transition_allowed(S::Queued, S::Running));
  EXPECT_TRUE(evonet::transition_allowed(S::Running, S::Paused));
  EXPECT_TRUE(evonet::transition_allowed(S::Paused, S::Running));
  EXPECT_TRUE(evonet::transition_allowed(S::Running, S::Finished));
  EXPECT_TRUE(evonet::transition_allowed(S::Ready, S::Failed));
  EXPECT_FALSE(evonet::transition_allowed(S::Ready, S::Running));
  EXPECT_FALSE(evonet::transition_allowed(S::Finished, S::Running));
  EXPECT_FALSE(evonet::transition_allowed(S::Failed, S::Failed));
  EXPECT_FALSE(evonet::transition_allowed(S::Finished, S::Failed));
}

TEST(Trial, StopAtZeroEmitsOnlyStepZero) {
  const auto p = small_project("a,prisonersDilemma,1,0,0,same(9),squareGrid,freq(strategy),3,3,true,vonNeumann,1.8\n");
  const auto r = evonet::run_trial(p.experiments[0], 0, evonet::builtin_models());
  EXPECT_EQ(r.status, TrialStatus::Finished);
  EXPECT_EQ(r.steps, 0u);
  ASSERT_EQ(r.frequencies.size(), 1u);
  EXPECT_EQ(r.frequencies[0].row_count(), 1u);
  EXPECT_EQ(r.frequencies[0].to_csv(), "step,0,1,2,3\n0,9,0,0,0\n");
}

TEST(Trial, SingleDefectorFirstSteps) {
  const auto r = evonet::run_trial(single_defector(2).experiments[0], 0, evonet::builtin_models());
  ASSERT_EQ(r.status, TrialStatus::Finished);
  const auto& rows = r.frequencies[0].rows();
  ASSERT_EQ(rows.size(), 3u);
  const evonet::Frequency step0{{AttrValue(0), 9800}, {AttrValue(1), 1}, {AttrValue(2), 0}, {AttrValue(3), 0}};
  EXPECT_EQ(rows[0].second, step0);
  const evonet::Frequency step1{{AttrValue(0), 9796}, {AttrValue(1), 1}, {AttrValue(2), 0}, {AttrValue(3), 4}};
  EXPECT_EQ(rows[1].second, step1);
  const evonet::Frequency step2{{AttrValue(0), 9788}, {AttrValue(1), 5}, {AttrValue(2), 0}, {AttrValue(3), 8}};
  EXPECT_EQ(rows[2].second, step2);
}

TEST(Trial, OutputCadence) {
  const auto p = small_project(
      "a,prisonersDilemma,1,4,10,random(25),squareGrid,freq(strategy)@3;nodes@5;edges@20,5,5,true,moore,1.4\n");
  const auto r = evonet::run_trial(p.experiments[0], 0, evonet::builtin_models());
  std::vector<std::uint64_t> steps;
  for (const auto& [s, _] : r.frequencies[0].rows()) steps.push_back(s);
  EXPECT_EQ(steps, (std::vector<std::uint64_t>{0, 3, 6, 9}));
  ASSERT_EQ(r.snapshots.size(), 4u);  // nodes at 0, 5, 10 and edges at 0
  EXPECT_EQ(r.snapshots[0].kind, evonet::OutputRequest::Kind::NodeSnapshot);
  EXPECT_EQ(r.snapshots[1].kind, evonet::OutputRequest::Kind::EdgeSnapshot);
  EXPECT_EQ(r.snapshots[2].step, 5u);
  EXPECT_EQ(r.snapshots[3].step, 10u);
  EXPECT_TRUE(r.snapshots[0].csv.starts_with("id,x,y,strategy\n0,0,0,"));
  EXPECT_TRUE(r.snapshots[1].csv.starts_with("id,origin,target\n"));
}

TEST(Trial, SameSeedSameOutputsDifferentTrialsDiffer) {
  const auto p = small_project("a,prisonersDilemma,3,7,20,random(100),squareGrid,freq(strategy),10,10,true,vonNeumann,1.7\n");
  const auto registry = evonet::builtin_models();
  const auto a = evonet::run_trial(p.experiments[0], 1, registry);
  const auto b = evonet::run_trial(p.experiments[0], 1, registry);
  const auto c = evonet::run_trial(p.experiments[0], 2, registry);
  EXPECT_EQ(a.serialize(), b.serialize());
  EXPECT_NE(a.serialize(), c.serialize());
}

TEST(Trial, SeedPlusIndexSelectsTheStream) {
  // Trial 1 of seed 7 equals trial 0 of seed 8.
  const auto registry = evonet::builtin_models();
  const auto p = small_project(
      "a,prisonersDilemma,2,7,5,random(36),squareGrid,freq(strategy),6,6,true,vonNeumann,1.7\n"
      "b,prisonersDilemma,1,8,5,random(36),squareGrid,freq(strategy),6,6,true,vonNeumann,1.7\n");
  const auto a = evonet::run_trial(p.experiments[0], 1, registry);
  const auto b = evonet::run_trial(p.experiments[1], 0, registry);
  EXPECT_EQ(a.frequencies, b.frequencies);
  EXPECT_EQ(evonet::nodes_snapshot_csv(*a.final_graph), evonet::nodes_snapshot_csv(*b.final_graph));
}

TEST(Trial, InitFailureIsReported) {
  auto p = small_project("a,prisonersDilemma,1,0,5,same(9),squareGrid,,3,3,true,vonNeumann,1.8\n");
  // Bypass the project checks to exercise model init.
  p.experiments[0].params = evonet::ParamTable(p.experiments[0].params.schema(), {AttrValue(1.8)});
  p.experiments[0].nodes = evonet::parse_nodes_spec("same(9; strategy=9)");
  const auto r = evonet::run_trial(p.experiments[0], 0, evonet::builtin_models());
  EXPECT_EQ(r.status, TrialStatus::Failed);
  EXPECT_FALSE(r.diagnostic.empty());
  EXPECT_FALSE(r.final_graph);
}

TEST(Trial, WritesFiles) {
  testing_support::TempDir dir;
  const auto p = small_project("a,prisonersDilemma,2,0,4,random(9),squareGrid,freq(strategy);nodes@2,3,3,true,vonNeumann,1.8\n");
  evonet::TrialOptions options;
  options.out_dir = dir.path();
  const auto r = evonet::run_trial(p.experiments[0], 1, evonet::builtin_models(), options);
  ASSERT_EQ(r.status, TrialStatus::Finished);
  for (const char* name : {"a_t1_freq_strategy.csv", "a_t1_nodes_0.csv", "a_t1_nodes_2.csv", "a_t1_nodes_4.csv"}) {
    EXPECT_TRUE(std::filesystem::exists(dir.path() / name)) << name;
  }
  EXPECT_EQ(testing_support::read_file(dir.path() / "a_t1_freq_strategy.csv"), r.frequencies[0].to_csv());
  EXPECT_TRUE(r.snapshots.empty());
  EXPECT_EQ(r.files.size(), 4u);
}

TEST(Trial, IllegalTransitionsThrow) {
  const auto p = small_project("a,prisonersDilemma,1,0,0,same(9),squareGrid,,3,3,true,vonNeumann,1.8\n");
  const auto registry = evonet::builtin_models();
  evonet::Trial t(p.experiments[0], 0, registry);
  EXPECT_THROW(t.transition(TrialStatus::Running), evonet::InvalidTransition);
  t.transition(TrialStatus::Queued);
  t.transition(TrialStatus::Running);
  t.transition(TrialStatus::Finished);
  EXPECT_THROW(t.transition(TrialStatus::Paused), evonet::InvalidTransition);
}

TEST(Output, FrequencyCsvUsesUnionOfValues) {
  evonet::FrequencySeries series("w");
  series.add(0, {{AttrValue(3), 2}});
  series.add(1, {{AttrValue(1), 1}, {AttrValue(3), 1}});
  EXPECT_EQ(series.to_csv(), "step,1,3\n0,0,2\n1,1,1\n");
}

}  // namespace
