#include "decsched/selection.hpp"

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

namespace {

using namespace decsched;
using Ids = std::vector<NodeId>;

const OrderPolicy kAuto = OrderPolicy::parse("auto");
const OrderPolicy kExh = OrderPolicy::parse("exhaustive");

std::vector<double> delays_of(const SelectionResult& r) {
  std::vector<double> out;
  for (const TraceEntry& e : r.trace) out.push_back(e.delay);
  return out;
}

void expect_trace(const SelectionResult& r, const std::vector<double>& want) {
  const std::vector<double> got = delays_of(r);
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-12) << "k=" << i + 1;
}

TEST(SelectLinear, UniformTwoNodesBeatThree) {
  // D(k) = 2k + max(0, (4 - k(k-1)) / k)
  const Instance inst = generate_instance(5, 1, Profile::kUMUC, 4.0);
  for (RankBy by : {RankBy::kCommDelay, RankBy::kRate}) {
    const SelectionResult r = select_linear(inst, by);
    expect_trace(r, {6, 5, 6, 8, 10});
    EXPECT_EQ(r.selected, (Ids{0, 1}));
    EXPECT_EQ(r.delay, 5.0);
    EXPECT_EQ(r.method, SelectionMethod::kLinearUniform);
  }
}

TEST(SelectLinear, ZeroWorkloadPicksOneNode) {
  const Instance inst = generate_instance(6, 12, Profile::kDMUC, 0.0);
  const SelectionResult r = select_linear(inst, RankBy::kCommDelay);
  ASSERT_EQ(r.selected.size(), 1u);
  const NodeSpec& x = inst.node(r.selected[0]);
  EXPECT_EQ(r.delay, x.fwd_delay + x.bwd_delay);
  for (const NodeSpec& y : inst.nodes()) EXPECT_LE(x.fwd_delay + x.bwd_delay, y.fwd_delay + y.bwd_delay);
}

TEST(SelectLinear, RankingKeys) {
  const Instance inst(1.0, {NodeSpec{0, 1, 1, 5}, NodeSpec{1, 3, 2, 2}, NodeSpec{2, 2, 3, 1}});
  EXPECT_EQ(rank_nodes(inst, RankBy::kCommDelay), (Ids{1, 2, 0}));
  EXPECT_EQ(rank_nodes(inst, RankBy::kCommDelay, CommKey::kForward), (Ids{0, 1, 2}));
  EXPECT_EQ(rank_nodes(inst, RankBy::kCommDelay, CommKey::kBackward), (Ids{2, 1, 0}));
  EXPECT_EQ(rank_nodes(inst, RankBy::kRate), (Ids{1, 2, 0}));
}

TEST(SelectGreedy, UniformExample) {
  const Instance inst = generate_instance(5, 1, Profile::kUMUC, 4.0);
  const SelectionResult r = select_greedy(inst, kExh);
  EXPECT_EQ(r.selected, (Ids{0, 1}));
  EXPECT_EQ(r.delay, 5.0);
}

TEST(SelectGreedy, SingleNode) {
  const Instance inst(12.0, {NodeSpec{0, 4.0, 1.5, 2.5}});
  const SelectionResult r = select_greedy(inst, kExh);
  EXPECT_EQ(r.selected, Ids{0});
  EXPECT_EQ(r.delay, 1.5 + 3.0 + 2.5);
}

TEST(SelectGreedy, AddsFastNodeOnLdfCounterexample) {
  const Instance inst = counterexample(CounterexampleKind::kLDF, 3, 100.0, 1000.0);
  const SelectionResult g = select_greedy(inst, kExh);
  EXPECT_NE(std::find(g.selected.begin(), g.selected.end(), 0u), g.selected.end());
  const SelectionResult ex = select_exhaustive(inst, kExh);
  EXPECT_NE(std::find(ex.selected.begin(), ex.selected.end(), 0u), ex.selected.end());
  EXPECT_TRUE(oracle::rel_close(ex.delay, oracle::best_delay_all_subsets(inst), 1e-8));
}

TEST(SelectExhaustive, UniformExample) {
  const Instance inst = generate_instance(5, 1, Profile::kUMUC, 4.0);
  const SelectionResult r = select_exhaustive(inst, kAuto);
  EXPECT_EQ(r.selected, (Ids{0, 1}));
  EXPECT_EQ(r.delay, 5.0);
  expect_trace(r, {6, 5, 6, 8, 10});
}

TEST(SelectExhaustive, ZeroWorkloadSingleton) {
  const Instance inst = generate_instance(6, 5, Profile::kDMDC, 0.0);
  const SelectionResult r = select_exhaustive(inst, kAuto);
  ASSERT_EQ(r.selected.size(), 1u);
  const NodeSpec& x = inst.node(r.selected[0]);
  for (const NodeSpec& y : inst.nodes()) EXPECT_LE(x.fwd_delay + x.bwd_delay, y.fwd_delay + y.bwd_delay);
}

TEST(SelectExhaustive, MatchesBruteForce) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const Instance inst = generate_instance(1 + trial % 4, rng(), static_cast<Profile>(trial % 4), 40 * unit_draw(rng));
    const SelectionResult r = select_exhaustive(inst, kExh);
    EXPECT_TRUE(oracle::rel_close(r.delay, oracle::best_delay_all_subsets(inst), 1e-8)) << "trial " << trial;
    EXPECT_TRUE(approx_eq(r.delay, min_delay(inst, r.plan)));
  }
}

TEST(SelectExhaustive, Guard) {
  const Instance inst = generate_instance(13, 1, Profile::kUMUC);
  EXPECT_THROW(select_exhaustive(inst, kAuto), GuardError);
}

TEST(SelectGreedy, NoBetterThanExhaustiveAndMonotone) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    const Instance inst = generate_instance(2 + trial % 6, rng(), Profile::kDMDC, 60 * unit_draw(rng));
    const SelectionResult g = select_greedy(inst, kExh);
    const SelectionResult ex = select_exhaustive(inst, kExh);
    EXPECT_GE(g.delay, ex.delay - tolerance(g.delay, ex.delay));
    EXPECT_TRUE(approx_eq(g.delay, min_delay(inst, g.plan)));

    // best candidate per round; every round but the last one is accepted
    std::vector<double> rounds;
    for (std::size_t i = 0; i < g.trace.size(); ++i) {
      if (i == 0 || g.trace[i].subset.size() != g.trace[i - 1].subset.size()) rounds.push_back(g.trace[i].delay);
      rounds.back() = std::min(rounds.back(), g.trace[i].delay);
    }
    for (std::size_t j = 1; j + 1 < rounds.size(); ++j) EXPECT_LT(rounds[j], rounds[j - 1]);
    EXPECT_TRUE(approx_eq(*std::min_element(rounds.begin(), rounds.end()), g.delay));
  }
}

// Prefix property: on uniform instances an optimal subset is made
// of the best-ranked nodes, so the linear search finds the optimum.
class UniformSelection : public ::testing::TestWithParam<Profile> {};

TEST_P(UniformSelection, LinearMatchesExhaustive) {
  const Profile p = GetParam();
  const RankBy by = p == Profile::kDMUC ? RankBy::kCommDelay : RankBy::kRate;
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const Instance inst = generate_instance(1 + trial % 8, rng(), p, 60 * unit_draw(rng));
    const SelectionResult lin = select_linear(inst, by);
    const SelectionResult ex = select_exhaustive(inst, kAuto);
    EXPECT_TRUE(approx_eq(lin.delay, ex.delay)) << "trial " << trial << " " << lin.delay << " vs " << ex.delay;

    // the exhaustive winner is a ranking prefix up to ties
    const Ids ranked = rank_nodes(inst, by);
    auto key = [&](NodeId id) {
      const NodeSpec& x = inst.node(id);
      return by == RankBy::kRate ? -x.rate : x.fwd_delay + x.bwd_delay;
    };
    const double worst_in = key(*std::max_element(ex.selected.begin(), ex.selected.end(),
                                                  [&](NodeId a, NodeId b) { return key(a) < key(b); }));
    for (NodeId id : ranked) {
      const bool chosen = std::find(ex.selected.begin(), ex.selected.end(), id) != ex.selected.end();
      if (!chosen) {
        EXPECT_GE(key(id), worst_in);
      }
    }
  }
}

TEST_P(UniformSelection, DelayVsSizeIsUnimodal) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const Instance inst = generate_instance(8, rng(), GetParam(), 5 + 60 * unit_draw(rng));
    const std::vector<double> d =
        delays_of(select_linear(inst, GetParam() == Profile::kDMUC ? RankBy::kCommDelay : RankBy::kRate));
    std::size_t i = 1;
    while (i < d.size() && d[i] <= d[i - 1] + tolerance(d[i], d[i - 1])) ++i;
    while (i < d.size() && d[i] >= d[i - 1] - tolerance(d[i], d[i - 1])) ++i;
    EXPECT_EQ(i, d.size()) << "trial " << trial;
  }
}

INSTANTIATE_TEST_SUITE_P(Profiles, UniformSelection, ::testing::Values(Profile::kUMUC, Profile::kUMDC, Profile::kDMUC),
                         [](const auto& info) { return std::string(to_string(info.param)); });

}  // namespace
