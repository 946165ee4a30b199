// Copyright 2026 The redobs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include "redobs/hybrid_logic.hpp"
#include "support.hpp"

namespace redobs {
namespace {

const TwoLinkArm<double> kArm{TwoLinkParams{}};

HybridConfig config(double v_bar, double eta, JumpSemantics s) {
  HybridConfig c;
  c.v_bar = v_bar;
  c.eta = eta;
  c.semantics = s;
  return c;
}

// A vector with the given norm.
Eigen::VectorXd with_norm(double n) { return Eigen::Vector2d(0.6, 0.8) * n; }

const HybridConfig kPaper = config(3.0, 1.0, JumpSemantics::paper_faithful);
const HybridConfig kHyst = config(3.0, 1.0, JumpSemantics::hysteresis);

TEST(JumpSets, UpSetIsClosedAboveThreshold) {
  EXPECT_TRUE(jump_up_set(kPaper, 2, with_norm(5.2)));
  EXPECT_FALSE(jump_up_set(kPaper, 2, with_norm(4.5)));
  EXPECT_TRUE(jump_up_set(kPaper, 2, Eigen::Vector2d(5.0, 0.0)));
}

TEST(JumpSets, DownSetDependsOnSemantics) {
  EXPECT_TRUE(jump_down_set(kPaper, 2, with_norm(3.9)));
  EXPECT_FALSE(jump_down_set(kHyst, 2, with_norm(3.9)));
  EXPECT_TRUE(jump_down_set(kHyst, 2, with_norm(1.9)));
  EXPECT_FALSE(jump_down_set(kPaper, 0, with_norm(0.0)));
  EXPECT_FALSE(jump_down_set(kHyst, 0, with_norm(0.0)));
}

TEST(FlowSet, AnnulusMembership) {
  EXPECT_TRUE(flow_set(kPaper, 2, with_norm(4.5)));
  const auto interval = flow_interval(kPaper, 2);
  EXPECT_FALSE(interval.empty);
  EXPECT_DOUBLE_EQ(interval.lower, 4.0);
  EXPECT_DOUBLE_EQ(interval.upper, 5.0);
}

TEST(FlowSet, EmptyWithNarrowRegions) {
  const auto c = config(1.5, 1.0, JumpSemantics::paper_faithful);
  const auto interval = flow_interval(c, 1);
  EXPECT_TRUE(interval.empty);
  EXPECT_DOUBLE_EQ(interval.lower, 1.0);
  EXPECT_DOUBLE_EQ(interval.upper, 0.5);
  for (double n = 0.0; n < 4.0; n += 0.01) EXPECT_FALSE(flow_set(c, 1, with_norm(n)));
}

TEST(FlowSet, FlowAndJumpSetsCoverEverything) {
  testing::Random rng(21);
  for (auto s : {JumpSemantics::paper_faithful, JumpSemantics::hysteresis}) {
    for (double v_bar : {1.5, 3.0, 5.0}) {
      const auto c = config(v_bar, 1.0, s);
      for (int i = 0; i < 500; ++i) {
        const Eigen::VectorXd x = rng.normal(2, 6.0);
        for (int r = 0; r < 6; ++r) {
          EXPECT_TRUE(flow_set(c, r, x) || jump_up_set(c, r, x) || jump_down_set(c, r, x));
        }
      }
    }
  }
}

TEST(HybridConfig, HysteresisNeverReentersImmediately) {
  for (double v_bar : {0.5, 1.5, 3.0}) {
    for (double eta : {0.2, 1.0}) {
      const auto c = config(v_bar, eta, JumpSemantics::hysteresis);
      for (int r = 0; r < 20; ++r) EXPECT_LE(c.down_threshold(r + 1), c.up_threshold(r));
    }
  }
}

TEST(HybridConfig, Validation) {
  EXPECT_THROW(config(0.0, 1.0, JumpSemantics::hysteresis).validate(), std::invalid_argument);
  EXPECT_THROW(config(1.0, -1.0, JumpSemantics::hysteresis).validate(), std::invalid_argument);
  EXPECT_EQ(parse_jump_semantics("paper"), JumpSemantics::paper_faithful);
  EXPECT_EQ(parse_jump_semantics(to_string(JumpSemantics::hysteresis)), JumpSemantics::hysteresis);
  EXPECT_THROW(parse_jump_semantics("sticky"), std::invalid_argument);
}

TEST(LowestRestingMode, DefaultParameters) {
  EXPECT_EQ(lowest_resting_mode(config(1.5, 1.0, JumpSemantics::hysteresis)), 1);
  EXPECT_EQ(lowest_resting_mode(config(3.0, 1.0, JumpSemantics::hysteresis)), 1);
}

TEST(ScheduledGain, MatchesFrozenGridValues) {
  const auto c = config(1.5, 1.0, JumpSemantics::hysteresis);
  const GainSchedule schedule(kArm, c);
  for (int r = 0; r < 6; ++r) EXPECT_NEAR(schedule.gain(r), testing::kKr[r], 1e-9);
}

TEST(ScheduledGain, StructuralIdentities) {
  const auto c = config(1.5, 1.0, JumpSemantics::hysteresis);
  EXPECT_DOUBLE_EQ(compute_kr(kArm, c, 0), compute_k0(kArm, 1.0, 0.0).k0);
  EXPECT_DOUBLE_EQ(compute_kr(kArm, c, 1), compute_k0(kArm, 1.0, 1.5).k0);
  const GainSchedule schedule(kArm, c);
  for (int r = 0; r < 100; ++r) EXPECT_LT(schedule.gain(r), schedule.gain(r + 1));
  EXPECT_DOUBLE_EQ(schedule.gain(70), compute_kr(kArm, c, 70));
  EXPECT_THROW(schedule.gain(-1), std::invalid_argument);
}

class StepLogic : public ::testing::Test {
 protected:
  GainSchedule schedule{kArm, kHyst};
};

TEST_F(StepLogic, FlowKeepsMode) {
  const LogicState s{2, schedule.gain(2), 3, 1.0};
  const auto next = step_logic(kHyst, schedule, s, with_norm(4.5), 2.0);
  EXPECT_EQ(next.r, 2);
  EXPECT_EQ(next.jump_count, 3);
  EXPECT_EQ(next.last_jump_time, 1.0);
}

TEST_F(StepLogic, UpJump) {
  const LogicState s{2, schedule.gain(2), 0, 0.0};
  const auto next = step_logic(kHyst, schedule, s, with_norm(5.0), 2.5);
  EXPECT_EQ(next.r, 3);
  EXPECT_EQ(next.gain, schedule.gain(3));
  EXPECT_EQ(next.jump_count, 1);
  EXPECT_EQ(next.last_jump_time, 2.5);
}

TEST_F(StepLogic, DownJump) {
  const LogicState s{2, schedule.gain(2), 0, 0.0};
  const auto next = step_logic(kHyst, schedule, s, with_norm(1.0), 0.5);
  EXPECT_EQ(next.r, 1);
  EXPECT_EQ(next.gain, schedule.gain(1));
}

TEST_F(StepLogic, UpJumpWinsWhereSetsOverlap) {
  const auto c = config(1.5, 1.0, JumpSemantics::paper_faithful);
  const GainSchedule sched(kArm, c);
  const Eigen::VectorXd x = with_norm(0.7);
  ASSERT_TRUE(jump_up_set(c, 1, x) && jump_down_set(c, 1, x));
  EXPECT_EQ(step_logic(c, sched, LogicState{1, sched.gain(1), 0, 0.0}, x, 0.0).r, 2);
}

TEST_F(StepLogic, NeverBelowFloorAndSingleSteps) {
  testing::Random rng(22);
  LogicState s{0, schedule.gain(0), 0, 0.0};
  for (int i = 0; i < 2000; ++i) {
    const auto next = step_logic(kHyst, schedule, s, rng.normal(2, 5.0), i * 1e-3);
    EXPECT_LE(std::abs(next.r - s.r), 1);
    EXPECT_EQ(next.jump_count - s.jump_count, next.r != s.r ? 1 : 0);
    EXPECT_GE(next.r, kHyst.r_min);
    EXPECT_EQ(next.gain, schedule.gain(next.r));
    s = next;
  }
}

TEST(InitializeLogic, ZeroEstimateFallsToFloor) {
  const GainSchedule schedule(kArm, kPaper);
  EXPECT_EQ(initialize_logic(kPaper, schedule, with_norm(0.0), 1).r, 0);
  // In hysteresis mode the point sits in the flow set of mode 1 already.
  EXPECT_EQ(initialize_logic(kHyst, schedule, with_norm(0.0), 1).r, 1);
}

TEST(InitializeLogic, LargeEstimateClimbs) {
  const GainSchedule schedule(kArm, kPaper);
  for (const auto& c : {kPaper, kHyst}) {
    const auto s = initialize_logic(c, schedule, with_norm(10.0), 0);
    EXPECT_EQ(s.r, 4);
    EXPECT_EQ(s.gain, schedule.gain(4));
    EXPECT_EQ(s.jump_count, 0);
  }
}

TEST(InitializeLogic, FlowPointUnchanged) {
  const GainSchedule schedule(kArm, kPaper);
  EXPECT_EQ(initialize_logic(kPaper, schedule, with_norm(4.5), 2).r, 2);
}

TEST(InitializeLogic, GivesUpOnRunawayClimb) {
  const GainSchedule schedule(kArm, kHyst);
  EXPECT_THROW(initialize_logic(kHyst, schedule, with_norm(1e6), 0), std::runtime_error);
  EXPECT_THROW(initialize_logic(kHyst, schedule, with_norm(1.0), -1), std::invalid_argument);
}

TEST(VelocitySandwich, Examples) {
  const auto a = velocity_sandwich(1.0, with_norm(0.4));
  EXPECT_DOUBLE_EQ(a.lower, 0.0);
  EXPECT_DOUBLE_EQ(a.upper, 1.4);
  const auto b = velocity_sandwich(1.0, with_norm(3.0));
  EXPECT_DOUBLE_EQ(b.lower, 2.0);
  EXPECT_DOUBLE_EQ(b.upper, 4.0);
  EXPECT_THROW(velocity_sandwich(0.0, with_norm(1.0)), std::invalid_argument);
}

TEST(VelocitySandwich, BracketsSpeedWithinEtaBall) {
  testing::Random rng(23);
  for (int i = 0; i < 1000; ++i) {
    const Eigen::VectorXd x2 = rng.normal(2, 3.0);
    const Eigen::VectorXd eps = rng.unit(2) * std::abs(rng.normal(1)(0)) * 0.5;
    if (eps.norm() > 1.0) continue;
    const auto b = velocity_sandwich(1.0, x2 - eps);
    EXPECT_LE(b.lower, x2.norm() + 1e-12);
    EXPECT_GE(b.upper, x2.norm() - 1e-12);
  }
}

}  // namespace
}  // namespace redobs
