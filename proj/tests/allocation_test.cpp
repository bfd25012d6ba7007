#include "decsched/allocation.hpp"

#include <gtest/gtest.h>

#include <random>

#include "decsched/oracle.hpp"
#include "oracles.hpp"

namespace {

using namespace decsched;

Instance unit_instance(std::size_t n, double w) { return generate_instance(n, 1, Profile::kUMUC, w); }

Instance two_node(double w = 10.0) {
  return Instance(w, {NodeSpec{0, 1.0, 1.0, 1.0}, NodeSpec{1, 2.0, 2.0, 1.0}});
}

TEST(GapProfile, DefaultInstanceIdentityOrders) {
  const Instance inst = unit_instance(3, 10);
  const GapProfile g = gap_profile(inst, CommPlan::identity({0, 1, 2}));
  EXPECT_EQ(g.pre_gap, (std::vector<double>{2, 1, 0}));
  EXPECT_EQ(g.post_gap, (std::vector<double>{0, 1, 2}));
  EXPECT_EQ(g.total_fwd, 3.0);
  EXPECT_EQ(g.total_bwd, 3.0);
  EXPECT_EQ(g.total_rate, 3.0);
}

TEST(GapProfile, SingleNode) {
  const GapProfile g = gap_profile(unit_instance(1, 5), CommPlan::identity({0}));
  EXPECT_EQ(g.pre_gap, std::vector<double>{0});
  EXPECT_EQ(g.post_gap, std::vector<double>{0});
}

TEST(GapProfile, TwoNodes) {
  const GapProfile g = gap_profile(two_node(), CommPlan::identity({0, 1}));
  EXPECT_EQ(g.pre_gap, (std::vector<double>{2, 0}));
  EXPECT_EQ(g.post_gap, (std::vector<double>{0, 1}));
}

TEST(GapProfile, SumsOnlyOverSelected) {
  const Instance inst = generate_instance(6, 4, Profile::kDMDC);
  const CommPlan plan({1, 3, 4}, {4, 1, 3}, {3, 4, 1});
  const GapProfile g = gap_profile(inst, plan);
  EXPECT_DOUBLE_EQ(g.total_fwd, inst.node(1).fwd_delay + inst.node(3).fwd_delay + inst.node(4).fwd_delay);
  EXPECT_DOUBLE_EQ(g.total_rate, inst.node(1).rate + inst.node(3).rate + inst.node(4).rate);
  // node 3 is last forward and first backward
  EXPECT_EQ(g.pre_gap[1], 0.0);
  EXPECT_EQ(g.post_gap[1], 0.0);
}

TEST(MinDelay, GoldenValues) {
  const CommPlan id3 = CommPlan::identity({0, 1, 2});
  EXPECT_NEAR(min_delay(unit_instance(3, 10), id3), 22.0 / 3.0, 1e-12);
  EXPECT_EQ(min_delay(unit_instance(3, 0), id3), 6.0);
  EXPECT_NEAR(min_delay(two_node(), CommPlan::identity({0, 1})), 7.0, 1e-12);
}

TEST(MinDelay, MatchesBisectionOracle) {
  // Independent route: smallest horizon whose canonical capacity covers w.
  EXPECT_NEAR(oracle::bisect_delay(unit_instance(3, 10), std::vector<NodeId>{0, 1, 2}, std::vector<NodeId>{0, 1, 2}), 22.0 / 3.0, 1e-9);
  EXPECT_NEAR(oracle::bisect_delay(two_node(), std::vector<NodeId>{0, 1}, std::vector<NodeId>{0, 1}), 7.0, 1e-9);

  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const auto profile = static_cast<Profile>(trial % 4);
    const Instance inst = generate_instance(1 + trial % 6, rng(), profile, 40.0 * unit_draw(rng));
    const CommPlan plan = random_plan(inst.all_ids(), rng);
    const std::vector<NodeId> f(plan.fwd_order().begin(), plan.fwd_order().end());
    const std::vector<NodeId> b(plan.bwd_order().begin(), plan.bwd_order().end());
    EXPECT_TRUE(oracle::rel_close(min_delay(inst, plan), oracle::bisect_delay(inst, f, b), 1e-9))
        << "trial " << trial;
  }
}

TEST(Allocate, DefaultInstanceTrace) {
  const Allocation a = allocate(unit_instance(3, 10), CommPlan::identity({0, 1, 2}));
  ASSERT_EQ(a.per_node.size(), 3u);
  const double p1[] = {2, 1, 0}, p2[] = {0, 1, 2};
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(a.per_node[i].phase1, p1[i]);
    EXPECT_EQ(a.per_node[i].phase2, p2[i]);
    EXPECT_NEAR(a.per_node[i].phase3, 4.0 / 3.0, 1e-12);
    EXPECT_NEAR(a.per_node[i].total, 10.0 / 3.0, 1e-12);
  }
  EXPECT_NEAR(a.sum(), 10.0, 1e-12);
}

TEST(Allocate, PhaseOneExhaustsWorkload) {
  const Instance inst = unit_instance(3, 3);
  const CommPlan plan = CommPlan::identity({0, 1, 2});
  const Allocation a = allocate(inst, plan);
  EXPECT_EQ(a.totals(), (std::vector<double>{2, 1, 0}));
  EXPECT_EQ(delay_of_fixed_allocation(inst, plan, a.totals()), 6.0);
}

TEST(Allocate, TwoNodeTrace) {
  const Instance inst = two_node();
  const CommPlan plan = CommPlan::identity({0, 1});
  const Allocation a = allocate(inst, plan);
  EXPECT_NEAR(a.per_node[0].total, 4.0, 1e-12);
  EXPECT_NEAR(a.per_node[1].total, 6.0, 1e-12);
  EXPECT_EQ(a.per_node[0].phase1, 2.0);
  EXPECT_EQ(a.per_node[1].phase2, 2.0);
  EXPECT_NEAR(delay_of_fixed_allocation(inst, plan, a.totals()), 7.0, 1e-12);
}

TEST(DelayOfFixedAllocation, HandValues) {
  const Instance inst = unit_instance(3, 10);
  const CommPlan plan = CommPlan::identity({0, 1, 2});
  EXPECT_EQ(delay_of_fixed_allocation(inst, plan, std::vector<double>{10, 0, 0}), 14.0);
  const std::vector<double> eq(3, 10.0 / 3.0);
  EXPECT_NEAR(delay_of_fixed_allocation(inst, plan, eq), 22.0 / 3.0, 1e-12);
}

TEST(DelayOfFixedAllocation, Errors) {
  const Instance inst = unit_instance(3, 10);
  const CommPlan plan = CommPlan::identity({0, 1, 2});
  EXPECT_THROW(delay_of_fixed_allocation(inst, plan, std::vector<double>{5, 5, 1}), InputError);
  EXPECT_THROW(delay_of_fixed_allocation(inst, plan, std::vector<double>{11, -1, 0}), InputError);
  EXPECT_THROW(delay_of_fixed_allocation(inst, plan, std::vector<double>{10, 0}), InputError);
}

class AllocationProperties : public ::testing::TestWithParam<int> {};

TEST_P(AllocationProperties, DominanceConsistencyAndBounds) {
  const auto profile = static_cast<Profile>(GetParam());
  std::mt19937_64 rng(100 + GetParam());
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + trial % 6;
    const Instance inst = generate_instance(n, rng(), profile, 30.0 * unit_draw(rng));
    const CommPlan plan = random_plan(inst.all_ids(), rng);
    const double best = min_delay(inst, plan);
    const GapProfile g = gap_profile(inst, plan);
    const double cap0 = g.base_capacity(inst, plan);

    // communication lower bound, tight iff w fits the gaps
    EXPECT_GE(best, g.total_fwd + g.total_bwd);
    EXPECT_EQ(best == g.total_fwd + g.total_bwd, inst.workload() <= cap0);

    const Allocation a = allocate(inst, plan);
    EXPECT_TRUE(approx_eq(a.sum(), inst.workload()));
    EXPECT_TRUE(approx_eq(delay_of_fixed_allocation(inst, plan, a.totals()), best));
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_GE(a.per_node[i].phase1, 0.0);
      EXPECT_GE(a.per_node[i].phase2, 0.0);
      EXPECT_GE(a.per_node[i].phase3, 0.0);
    }
    const std::size_t last_fwd =
        std::lower_bound(plan.selected().begin(), plan.selected().end(), plan.fwd_order().back()) -
        plan.selected().begin();
    const std::size_t first_bwd =
        std::lower_bound(plan.selected().begin(), plan.selected().end(), plan.bwd_order().front()) -
        plan.selected().begin();
    EXPECT_EQ(a.per_node[last_fwd].phase1, 0.0);
    EXPECT_EQ(a.per_node[first_bwd].phase2, 0.0);

    for (int s = 0; s < 200; ++s) {
      const std::vector<double> x = random_allocation(n, inst.workload(), rng);
      EXPECT_GE(delay_of_fixed_allocation(inst, plan, x), best - tolerance(best, best));
    }
  }
}

TEST_P(AllocationProperties, MonotoneInWorkload) {
  std::mt19937_64 rng(500 + GetParam());
  const Instance base = generate_instance(5, rng(), static_cast<Profile>(GetParam()));
  const CommPlan plan = random_plan(base.all_ids(), rng);
  double prev = 0.0;
  for (double w = 0.0; w <= 40.0; w += 0.5) {
    const double d = min_delay(base.with_workload(w), plan);
    EXPECT_GE(d, prev);
    prev = d;
  }
}

INSTANTIATE_TEST_SUITE_P(Profiles, AllocationProperties, ::testing::Range(0, 4));

}  // namespace
